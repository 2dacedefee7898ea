#include "bdpz/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "bdpz/errors.hpp"

namespace bdpz {

namespace {

std::string state_str(State s) {
    if (s == kNegInf) return "-inf";
    if (s == kPosInf) return "+inf";
    return std::to_string(s);
}

State abs_state(State i) { return i < 0 ? -i : i; }

void validate_expr(const RateExpr& e, const std::string& where) {
    if (!std::isfinite(e.base) || !std::isfinite(e.sin_amp) || !std::isfinite(e.cos_amp) ||
        !std::isfinite(e.freq))
        throw SchemaError(where + ": non-finite rate expression");
    if (e.freq <= 0.0) throw SchemaError(where + ": freq must be positive");
    if (e.base < e.amplitude())
        throw SchemaError(where + ": negative-rate expression (base " + std::to_string(e.base) +
                          " < amplitude " + std::to_string(e.amplitude()) + ")");
}

void validate_factor(const StateFactor& f, const std::string& where) {
    switch (f.kind) {
        case StateFactor::Kind::one:
            break;
        case StateFactor::Kind::min_linear:
            if (f.cap < 1) throw SchemaError(where + ": min_linear cap must be >= 1");
            break;
        case StateFactor::Kind::table:
            if (!(f.fallback >= 0.0) || !std::isfinite(f.fallback))
                throw SchemaError(where + ": table default must be finite and >= 0");
            for (const auto& [k, v] : f.entries)
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw SchemaError(where + ": table entry " + std::to_string(k) +
                                      " must be finite and >= 0");
            break;
    }
}

// Sorts and checks that the bands tile Z without gaps or overlaps.
std::vector<RateBand> validate_bands(std::vector<RateBand> bands, const std::string& dir) {
    if (bands.empty()) throw SchemaError(dir + " bands: non-covering (no bands)");
    for (std::size_t b = 0; b < bands.size(); ++b) {
        const auto where = dir + " band " + std::to_string(b);
        if (bands[b].lo > bands[b].hi) throw SchemaError(where + ": lo > hi");
        if (bands[b].lo == kPosInf || bands[b].hi == kNegInf)
            throw SchemaError(where + ": infinite endpoint on the wrong side");
        validate_expr(bands[b].expr, where);
        validate_factor(bands[b].factor, where);
    }
    std::sort(bands.begin(), bands.end(),
              [](const RateBand& a, const RateBand& b) { return a.lo < b.lo; });
    if (bands.front().lo != kNegInf)
        throw SchemaError(dir + " bands: non-covering below " + state_str(bands.front().lo));
    if (bands.back().hi != kPosInf)
        throw SchemaError(dir + " bands: non-covering above " + state_str(bands.back().hi));
    for (std::size_t b = 1; b < bands.size(); ++b) {
        const State prev_hi = bands[b - 1].hi;
        if (prev_hi == kPosInf || bands[b].lo <= prev_hi)
            throw SchemaError(dir + " bands: overlap at " + state_str(bands[b].lo));
        if (bands[b].lo != prev_hi + 1)
            throw SchemaError(dir + " bands: non-covering between " + state_str(prev_hi) +
                              " and " + state_str(bands[b].lo));
    }
    return bands;
}

std::size_t find_band(const std::vector<RateBand>& bands, State i) {
    // Bands are sorted and contiguous; a handful per model, so linear is fine.
    for (std::size_t b = 0; b < bands.size(); ++b)
        if (bands[b].hi >= i) return b;
    return bands.size() - 1;
}

// Largest |state| at which the band/factor structure can still change.
State structural_extent(const std::vector<RateBand>& bands) {
    State ext = 0;
    auto bump = [&](State s) {
        if (s != kNegInf && s != kPosInf) ext = std::max(ext, abs_state(s));
    };
    for (const auto& b : bands) {
        bump(b.lo);
        bump(b.hi);
        if (b.factor.kind == StateFactor::Kind::min_linear) bump(b.factor.cap);
        if (b.factor.kind == StateFactor::Kind::table)
            for (const auto& [k, v] : b.factor.entries) bump(k);
    }
    return ext;
}

void validate_horizon(const std::vector<RateBand>& bands, State horizon, const std::string& dir) {
    const State ext = structural_extent(bands) + 2;
    for (const int sign : {-1, 1}) {
        const State anchor = sign * horizon;
        const auto& ref = bands[find_band(bands, anchor)];
        const double ref_factor = ref.factor(anchor);
        for (State a = horizon + 1; a <= std::max(ext, horizon + 1); ++a) {
            const State i = sign * a;
            const auto& band = bands[find_band(bands, i)];
            if (!(band.expr == ref.expr) || band.factor(i) != ref_factor)
                throw SchemaError(dir + " rates at state " + std::to_string(i) +
                                  " differ from state " + std::to_string(anchor) +
                                  "; horizon " + std::to_string(horizon) + " is too small");
        }
    }
}

}  // namespace

double RateExpr::operator()(double t) const {
    if (is_constant()) return base;
    const double phase = 2.0 * std::numbers::pi * freq * t;
    return base + sin_amp * std::sin(phase) + cos_amp * std::cos(phase);
}

double RateExpr::amplitude() const { return std::hypot(sin_amp, cos_amp); }

StateFactor StateFactor::min_linear(State cap) {
    StateFactor f;
    f.kind = Kind::min_linear;
    f.cap = cap;
    return f;
}

StateFactor StateFactor::table(std::map<State, double> entries, double fallback) {
    StateFactor f;
    f.kind = Kind::table;
    f.entries = std::move(entries);
    f.fallback = fallback;
    return f;
}

double StateFactor::operator()(State i) const {
    switch (kind) {
        case Kind::one:
            return 1.0;
        case Kind::min_linear:
            return static_cast<double>(std::min(abs_state(i), cap));
        case Kind::table: {
            const auto it = entries.find(i);
            return it == entries.end() ? fallback : it->second;
        }
    }
    return 1.0;
}

RateModel::RateModel(std::string name, std::vector<RateBand> birth, std::vector<RateBand> death,
                     State horizon)
    : name_(std::move(name)),
      birth_(validate_bands(std::move(birth), "birth")),
      death_(validate_bands(std::move(death), "death")),
      horizon_(horizon) {
    if (horizon_ < 1) throw SchemaError("horizon must be >= 1");
    validate_horizon(birth_, horizon_, "birth");
    validate_horizon(death_, horizon_, "death");

    // Past the horizon nothing changes, so the supremum is attained on
    // [-H-1, H+1] once the structural breakpoints are included.
    const State ext = std::max(structural_extent(birth_), structural_extent(death_));
    const State span = std::max(ext, horizon_) + 1;
    for (State i = -span; i <= span; ++i) {
        const auto ub = upper_bounds(i);
        global_bound_ = std::max({global_bound_, ub.birth, ub.death});
    }
}

std::size_t RateModel::birth_band_index(State i) const { return find_band(birth_, i); }
std::size_t RateModel::death_band_index(State i) const { return find_band(death_, i); }

double RateModel::birth_rate(State i, double t) const {
    const auto& b = birth_[find_band(birth_, i)];
    return b.factor(i) * b.expr(t);
}

double RateModel::death_rate(State i, double t) const {
    const auto& b = death_[find_band(death_, i)];
    return b.factor(i) * b.expr(t);
}

RateBounds RateModel::upper_bounds(State i) const {
    const auto& b = birth_[find_band(birth_, i)];
    const auto& d = death_[find_band(death_, i)];
    return {b.factor(i) * b.expr.upper(), d.factor(i) * d.expr.upper()};
}

std::optional<double> RateModel::period() const {
    std::optional<double> freq;
    for (const auto* bands : {&birth_, &death_}) {
        for (const auto& b : *bands) {
            if (b.expr.is_constant()) continue;
            if (freq && *freq != b.expr.freq)
                throw SchemaError("bands use different frequencies; pass the period explicitly");
            freq = b.expr.freq;
        }
    }
    if (!freq) return std::nullopt;
    return 1.0 / *freq;
}

RateModel example1() {
    const RateExpr lambda{1.0, 1.0, 0.0, 1.0};
    const RateExpr three{3.0, 0.0, 0.0, 1.0};
    const auto cap2 = StateFactor::min_linear(2);
    std::vector<RateBand> birth{
        {kNegInf, -1, three, cap2},
        {0, kPosInf, lambda, StateFactor::one()},
    };
    std::vector<RateBand> death{
        {kNegInf, 0, lambda, StateFactor::one()},
        {1, kPosInf, three, cap2},
    };
    return RateModel("ex1", std::move(birth), std::move(death), 2);
}

RateModel example2() {
    const RateExpr lambda{2.0, 0.25, 0.0, 1.0};
    const RateExpr mu1{1.0, 0.125, 0.0, 1.0};
    const RateExpr mu2{4.0, 0.0, 0.25, 1.0};
    std::vector<RateBand> birth{{kNegInf, kPosInf, lambda, StateFactor::one()}};
    std::vector<RateBand> death{
        {kNegInf, 0, mu1, StateFactor::one()},
        {1, kPosInf, mu2, StateFactor::one()},
    };
    return RateModel("ex2", std::move(birth), std::move(death), 1);
}

RateModel constant_model(double lambda, double mu) {
    std::vector<RateBand> birth{{kNegInf, kPosInf, RateExpr{lambda}, StateFactor::one()}};
    std::vector<RateBand> death{{kNegInf, kPosInf, RateExpr{mu}, StateFactor::one()}};
    return RateModel("constant", std::move(birth), std::move(death), 1);
}

std::optional<RateModel> builtin_model(const std::string& name) {
    if (name == "ex1") return example1();
    if (name == "ex2") return example2();
    return std::nullopt;
}

}  // namespace bdpz
