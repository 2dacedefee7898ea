#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "bdpz/bounds.hpp"
#include "bdpz/errors.hpp"
#include "bdpz/io.hpp"
#include "bdpz/simulate.hpp"
#include "bdpz/solver.hpp"

namespace py = pybind11;
using namespace bdpz;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

ProbabilitySnapshot snapshot_from(State lo, const std::vector<double>& probs, double time) {
    if (probs.empty()) throw SchemaError("empty probability vector");
    return {{lo, lo + static_cast<State>(probs.size()) - 1}, probs, time};
}

py::dict report_dict(const BoundReport& r) {
    py::dict inputs;
    for (const auto& [k, v] : r.inputs) inputs[py::str(k)] = v;
    py::dict d;
    d["kind"] = to_string(r.kind);
    d["value"] = r.value;
    d["inputs"] = inputs;
    return d;
}

EnvelopeStrategy strategy_of(const std::string& s) {
    if (s == "pointwise") return EnvelopeStrategy::pointwise;
    if (s == "period_average" || s == "period-average") return EnvelopeStrategy::period_average;
    throw SchemaError("unknown strategy \"" + s + "\"");
}

TailSide side_of(const std::string& s) {
    if (s == "left") return TailSide::left;
    if (s == "right") return TailSide::right;
    if (s == "both") return TailSide::both;
    throw SchemaError("side must be left, right or both");
}

}  // namespace

PYBIND11_MODULE(_bdpz, mod) {
    mod.doc() = "Bounds, solver and simulator for bilateral birth-death processes";

    auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
    py::register_exception<SchemaError>(mod, "SchemaError", base.ptr());
    py::register_exception<NotErgodicWithTheseWeights>(mod, "NotErgodicWithTheseWeights", base.ptr());
    py::register_exception<NotAchievable>(mod, "NotAchievable", base.ptr());
    py::register_exception<DecreasingQuotient>(mod, "DecreasingQuotient", base.ptr());
    auto solver_error = py::register_exception<SolverError>(mod, "SolverError", base.ptr());
    py::register_exception<StepTooLarge>(mod, "StepTooLarge", solver_error.ptr());
    py::register_exception<MassDrift>(mod, "MassDrift", solver_error.ptr());
    py::register_exception<NegativeProbability>(mod, "NegativeProbability", solver_error.ptr());
    py::register_exception<NoConvergence>(mod, "NoConvergence", solver_error.ptr());

    py::class_<RateModel>(mod, "RateModel")
        .def_property_readonly("name", &RateModel::name)
        .def_property_readonly("horizon", &RateModel::horizon)
        .def_property_readonly("global_bound", &RateModel::global_bound)
        .def("birth_rate", &RateModel::birth_rate, py::arg("i"), py::arg("t"))
        .def("death_rate", &RateModel::death_rate, py::arg("i"), py::arg("t"))
        .def("upper_bounds", [](const RateModel& m, State i) {
            const auto b = m.upper_bounds(i);
            return py::make_tuple(b.birth, b.death);
        })
        .def("to_json", [](const RateModel& m) { return model_to_json(m).dump(); });

    mod.def("load_model", &resolve_model, py::arg("name_or_path"),
            "Built-in model (\"ex1\", \"ex2\") or a model config file.");
    mod.def("parse_model", py::overload_cast<const std::string&>(&parse_model), py::arg("text"));
    mod.def("constant_model", &constant_model, py::arg("birth"), py::arg("death"));

    py::class_<WeightSequence>(mod, "WeightSequence")
        .def("__call__", &WeightSequence::operator(), py::arg("k"))
        .def_property_readonly("pos_ratio", &WeightSequence::pos_ratio)
        .def_property_readonly("neg_ratio", &WeightSequence::neg_ratio)
        .def("positive_sum", &WeightSequence::positive_sum)
        .def("negative_sum", &WeightSequence::negative_sum);
    mod.def("load_weights", &resolve_weights, py::arg("name_or_path"));
    mod.def("mirror_geometric", &WeightSequence::mirror_geometric, py::arg("ratio"));
    mod.def("two_sided", &WeightSequence::two_sided, py::arg("c"), py::arg("ratio"));

    py::class_<EnvelopeConstants>(mod, "EnvelopeConstants")
        .def(py::init<>())
        .def_readwrite("M", &EnvelopeConstants::M)
        .def_readwrite("beta", &EnvelopeConstants::beta)
        .def("__repr__", [](const EnvelopeConstants& e) {
            return "EnvelopeConstants(M=" + format_number(e.M) + ", beta=" + format_number(e.beta) + ")";
        });

    mod.def("beta_inf", &beta_inf, py::arg("model"), py::arg("weights"), py::arg("t"));
    mod.def("fit_envelope",
            [](const RateModel& m, const WeightSequence& w, const std::string& strategy, double period) {
                return fit_envelope(m, w, strategy_of(strategy), period);
            },
            py::arg("model"), py::arg("weights"), py::arg("strategy") = "pointwise", py::arg("period") = 1.0);

    mod.def("theorem1_bound",
            [](const WeightSequence& w, const EnvelopeConstants& env, State x0, State y0, double t) {
                const State r = std::max({State{1}, std::abs(x0), std::abs(y0)});
                const Window win{-r, r};
                return report_dict(theorem1_bound(w, env, ProbabilitySnapshot::delta(win, x0),
                                                  ProbabilitySnapshot::delta(win, y0), t));
            },
            py::arg("weights"), py::arg("env"), py::arg("x0"), py::arg("y0"), py::arg("t"));
    mod.def("tail_bound",
            [](const RateModel& m, const WeightSequence& w, const EnvelopeConstants& env, State n, double t,
               const std::string& side, State x0) {
                const State r = std::max<State>(1, std::abs(x0));
                return report_dict(tail_bound(m, w, env, ProbabilitySnapshot::delta({-r, r}, x0), n, t,
                                              side_of(side)));
            },
            py::arg("model"), py::arg("weights"), py::arg("env"), py::arg("n"), py::arg("t"),
            py::arg("side") = "both", py::arg("x0") = 0);
    mod.def("theorem2_bound",
            [](const RateModel& m, const WeightSequence& d, const WeightSequence& ds, const EnvelopeConstants& e,
               const EnvelopeConstants& es, State n1, State n2) {
                return report_dict(theorem2_bound(m, d, ds, e, es, n1, n2));
            },
            py::arg("model"), py::arg("d"), py::arg("d_star"), py::arg("env"), py::arg("env_star"), py::arg("n1"),
            py::arg("n2"));
    mod.def("plan_truncation",
            [](const RateModel& m, const WeightSequence& d, const WeightSequence& ds, const EnvelopeConstants& e,
               const EnvelopeConstants& es, double eps) {
                const auto p = plan_truncation(m, d, ds, e, es, eps);
                return py::make_tuple(p.n1, p.n2, p.value);
            },
            py::arg("model"), py::arg("d"), py::arg("d_star"), py::arg("env"), py::arg("env_star"), py::arg("eps"));

    mod.def("integrate",
            [](const RateModel& m, State n1, State n2, State x0, double t_end, double dt, double output_every) {
                const Window w{n1, n2};
                const double step = dt > 0.0 ? dt : std::min(default_step(m), max_stable_step(m, w));
                Trajectory traj;
                {
                    py::gil_scoped_release release;
                    traj = integrate(m, w, ProbabilitySnapshot::delta(w, x0), t_end, step, output_every);
                }
                const auto rows = static_cast<py::ssize_t>(traj.snapshots.size());
                const auto cols = static_cast<py::ssize_t>(w.size());
                py::array_t<double> probs({rows, cols});
                std::vector<double> times, means, variances;
                auto view = probs.mutable_unchecked<2>();
                for (py::ssize_t r = 0; r < rows; ++r) {
                    const auto& s = traj.snapshots[static_cast<std::size_t>(r)];
                    for (py::ssize_t c = 0; c < cols; ++c) view(r, c) = s.probs[static_cast<std::size_t>(c)];
                    times.push_back(s.time);
                    means.push_back(traj.moments[static_cast<std::size_t>(r)].mean);
                    variances.push_back(traj.moments[static_cast<std::size_t>(r)].variance);
                }
                py::dict d;
                d["t"] = to_array(times);
                d["p"] = probs;
                d["mean"] = to_array(means);
                d["variance"] = to_array(variances);
                d["states_lo"] = n1;
                return d;
            },
            py::arg("model"), py::arg("n1"), py::arg("n2"), py::arg("x0") = 0, py::arg("t_end") = 1.0,
            py::arg("dt") = 0.0, py::arg("output_every") = 0.1);

    mod.def("empirical_distribution",
            [](const RateModel& m, State x0, double t, std::uint64_t n_paths, std::uint64_t seed,
               unsigned threads) {
                EmpiricalDistribution h;
                {
                    py::gil_scoped_release release;
                    h = empirical_distribution(m, x0, t, n_paths, seed, threads);
                }
                py::dict d;
                d["lo"] = h.snapshot.window.lo;
                d["p_hat"] = to_array(h.snapshot.probs);
                d["stderr"] = to_array(h.std_errors);
                d["n_paths"] = h.n_paths;
                d["seed"] = h.seed;
                return d;
            },
            py::arg("model"), py::arg("x0"), py::arg("t"), py::arg("n_paths"), py::arg("seed"),
            py::arg("threads") = 0);

    mod.def("l1_distance",
            [](State lo_p, const std::vector<double>& p, State lo_q, const std::vector<double>& q) {
                return l1_distance(snapshot_from(lo_p, p, 0.0), snapshot_from(lo_q, q, 0.0));
            });
}
