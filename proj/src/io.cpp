#include "bdpz/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bdpz/errors.hpp"

namespace bdpz {

namespace {

State parse_endpoint(const Json& v, const char* field) {
    if (v.is_number_integer()) return v.get<State>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "-inf") return kNegInf;
        if (s == "+inf" || s == "inf") return kPosInf;
    }
    throw SchemaError(std::string("band.") + field + " must be an integer, \"-inf\" or \"+inf\"");
}

Json endpoint_json(State s) {
    if (s == kNegInf) return "-inf";
    if (s == kPosInf) return "+inf";
    return s;
}

double number_or(const Json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) throw SchemaError(std::string(key) + " must be a number");
    return obj.at(key).get<double>();
}

State parse_state_key(const std::string& key) {
    std::size_t pos = 0;
    State k = 0;
    try {
        k = std::stoll(key, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != key.size()) throw SchemaError("state key \"" + key + "\" is not an integer");
    return k;
}

StateFactor parse_factor(const Json& f) {
    if (!f.is_object() || !f.contains("kind") || !f.at("kind").is_string())
        throw SchemaError("factor must be an object with a string \"kind\"");
    const auto kind = f.at("kind").get<std::string>();
    if (kind == "one") return StateFactor::one();
    if (kind == "min_linear") {
        if (!f.contains("cap") || !f.at("cap").is_number_integer())
            throw SchemaError("min_linear factor needs an integer \"cap\"");
        return StateFactor::min_linear(f.at("cap").get<State>());
    }
    if (kind == "table") {
        std::map<State, double> entries;
        if (f.contains("entries")) {
            if (!f.at("entries").is_object()) throw SchemaError("table entries must be an object");
            for (const auto& [key, v] : f.at("entries").items()) {
                if (!v.is_number()) throw SchemaError("table entry " + key + " must be a number");
                entries[parse_state_key(key)] = v.get<double>();
            }
        }
        return StateFactor::table(std::move(entries), number_or(f, "default", 1.0));
    }
    throw SchemaError("unknown factor kind \"" + kind + "\"");
}

Json factor_json(const StateFactor& f) {
    switch (f.kind) {
        case StateFactor::Kind::one:
            return {{"kind", "one"}};
        case StateFactor::Kind::min_linear:
            return {{"kind", "min_linear"}, {"cap", f.cap}};
        case StateFactor::Kind::table: {
            Json entries = Json::object();
            for (const auto& [k, v] : f.entries) entries[std::to_string(k)] = v;
            return {{"kind", "table"}, {"entries", entries}, {"default", f.fallback}};
        }
    }
    return {};
}

std::vector<RateBand> parse_bands(const Json& doc, const char* key) {
    if (!doc.contains(key) || !doc.at(key).is_array())
        throw SchemaError(std::string("model needs a \"") + key + "\" array");
    std::vector<RateBand> bands;
    for (const auto& b : doc.at(key)) {
        if (!b.is_object()) throw SchemaError("band must be an object");
        for (const char* req : {"lo", "hi", "base"})
            if (!b.contains(req)) throw SchemaError(std::string("band is missing \"") + req + "\"");
        RateBand band;
        band.lo = parse_endpoint(b.at("lo"), "lo");
        band.hi = parse_endpoint(b.at("hi"), "hi");
        band.expr.base = number_or(b, "base", 0.0);
        band.expr.sin_amp = number_or(b, "sin_amp", 0.0);
        band.expr.cos_amp = number_or(b, "cos_amp", 0.0);
        band.expr.freq = number_or(b, "freq", 1.0);
        band.factor = b.contains("factor") ? parse_factor(b.at("factor")) : StateFactor::one();
        bands.push_back(std::move(band));
    }
    return bands;
}

Json bands_json(const std::vector<RateBand>& bands) {
    Json arr = Json::array();
    for (const auto& b : bands)
        arr.push_back({{"lo", endpoint_json(b.lo)},
                       {"hi", endpoint_json(b.hi)},
                       {"base", b.expr.base},
                       {"sin_amp", b.expr.sin_amp},
                       {"cos_amp", b.expr.cos_amp},
                       {"freq", b.expr.freq},
                       {"factor", factor_json(b.factor)}});
    return arr;
}

Json parse_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

RateModel parse_model(const Json& doc) {
    if (!doc.is_object()) throw SchemaError("model config must be a JSON object");
    if (!doc.contains("horizon")) throw SchemaError("model config is missing \"horizon\"");
    if (!doc.at("horizon").is_number_integer())
        throw SchemaError("model \"horizon\" must be an integer");
    const std::string name =
        doc.contains("name") && doc.at("name").is_string() ? doc.at("name").get<std::string>() : "";
    return RateModel(name, parse_bands(doc, "birth"), parse_bands(doc, "death"),
                     doc.at("horizon").get<State>());
}

RateModel parse_model(const std::string& text) { return parse_model(parse_text(text)); }

Json model_to_json(const RateModel& m) {
    return {{"name", m.name()},
            {"horizon", m.horizon()},
            {"birth", bands_json(m.birth_bands())},
            {"death", bands_json(m.death_bands())}};
}

RateModel resolve_model(const std::string& name_or_path) {
    if (auto m = builtin_model(name_or_path)) return *m;
    return parse_model(read_file(name_or_path));
}

WeightSequence parse_weights(const Json& doc) {
    if (!doc.is_object()) throw SchemaError("weight config must be a JSON object");
    if (!doc.contains("head") || !doc.at("head").is_object())
        throw SchemaError("weight config needs a \"head\" object");
    std::map<State, double> head;
    for (const auto& [key, v] : doc.at("head").items()) {
        if (!v.is_number()) throw SchemaError("weight d_" + key + " must be a number");
        head[parse_state_key(key)] = v.get<double>();
    }
    for (const char* req : {"pos_ratio", "neg_ratio"})
        if (!doc.contains(req) || !doc.at(req).is_number())
            throw SchemaError(std::string("weight config needs a numeric \"") + req + "\"");
    return WeightSequence(std::move(head), doc.at("pos_ratio").get<double>(),
                          doc.at("neg_ratio").get<double>());
}

WeightSequence parse_weights(const std::string& text) { return parse_weights(parse_text(text)); }

Json weights_to_json(const WeightSequence& w) {
    Json head = Json::object();
    for (const auto& [k, v] : w.head()) head[std::to_string(k)] = v;
    return {{"head", head}, {"pos_ratio", w.pos_ratio()}, {"neg_ratio", w.neg_ratio()}};
}

WeightSequence resolve_weights(const std::string& name_or_path) {
    if (name_or_path == "ex1") return WeightSequence::mirror_geometric(8.0 / 7.0);
    if (name_or_path == "ex1-star") return WeightSequence::mirror_geometric(4.0 / 3.0);
    if (name_or_path == "ex2") return WeightSequence::two_sided(2.0, 8.0 / 7.0);
    if (name_or_path == "ex2-star") return WeightSequence::two_sided(2.0, std::sqrt(2.0));
    return parse_weights(read_file(name_or_path));
}

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json report_to_json(const BoundReport& r) {
    Json inputs = Json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = format_number(v);
    return {{"kind", to_string(r.kind)}, {"value", format_number(r.value)}, {"inputs_digest", inputs}};
}

Json envelope_to_json(const EnvelopeConstants& env) {
    return {{"M", format_number(env.M)}, {"beta", format_number(env.beta)}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,k,p\n";
    for (const auto& s : traj.snapshots)
        for (std::size_t i = 0; i < s.probs.size(); ++i)
            os << format_number(s.time) << ',' << s.window.lo + static_cast<State>(i) << ','
               << format_number(s.probs[i]) << '\n';
}

void write_moments_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,mean,variance,mass\n";
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
        os << format_number(traj.snapshots[i].time) << ',' << format_number(traj.moments[i].mean)
           << ',' << format_number(traj.moments[i].variance) << ','
           << format_number(traj.snapshots[i].mass()) << '\n';
}

void write_histogram_csv(std::ostream& os, const EmpiricalDistribution& h) {
    os << "k,p_hat,stderr,n_paths,seed,t\n";
    for (std::size_t i = 0; i < h.snapshot.probs.size(); ++i)
        os << h.snapshot.window.lo + static_cast<State>(i) << ','
           << format_number(h.snapshot.probs[i]) << ',' << format_number(h.std_errors[i]) << ','
           << h.n_paths << ',' << h.seed << ',' << format_number(h.snapshot.time) << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace bdpz
