#include "bdpz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bdpz/errors.hpp"

namespace bdpz {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kNegTol = -1e-12;

// Tridiagonal forward operator of the window-restricted process. Band
// expressions are evaluated once per stage time and scaled by cached
// per-state factors.
class ForwardSystem {
public:
    ForwardSystem(const RateModel& m, Window w) : model_(m), n_(w.size()) {
        birth_band_.resize(n_);
        death_band_.resize(n_);
        birth_factor_.resize(n_);
        death_factor_.resize(n_);
        lam_.resize(n_);
        mu_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const State k = w.lo + static_cast<State>(i);
            birth_band_[i] = m.birth_band_index(k);
            death_band_[i] = m.death_band_index(k);
            birth_factor_[i] = m.birth_bands()[birth_band_[i]].factor(k);
            death_factor_[i] = m.death_bands()[death_band_[i]].factor(k);
        }
        // Reflecting truncation: nothing leaves the window.
        birth_factor_[n_ - 1] = 0.0;
        death_factor_[0] = 0.0;
        birth_vals_.resize(m.birth_bands().size());
        death_vals_.resize(m.death_bands().size());
    }

    void set_time(double t) {
        for (std::size_t b = 0; b < birth_vals_.size(); ++b)
            birth_vals_[b] = model_.birth_bands()[b].expr(t);
        for (std::size_t b = 0; b < death_vals_.size(); ++b)
            death_vals_[b] = model_.death_bands()[b].expr(t);
        for (std::size_t i = 0; i < n_; ++i) {
            lam_[i] = birth_factor_[i] * birth_vals_[birth_band_[i]];
            mu_[i] = death_factor_[i] * death_vals_[death_band_[i]];
        }
    }

    // out = A(t) p for the time last passed to set_time.
    void apply(const std::vector<double>& p, std::vector<double>& out) const {
        for (std::size_t i = 0; i < n_; ++i) {
            double v = -(lam_[i] + mu_[i]) * p[i];
            if (i > 0) v += lam_[i - 1] * p[i - 1];
            if (i + 1 < n_) v += mu_[i + 1] * p[i + 1];
            out[i] = v;
        }
    }

private:
    const RateModel& model_;
    std::size_t n_;
    std::vector<std::size_t> birth_band_, death_band_;
    std::vector<double> birth_factor_, death_factor_;
    std::vector<double> birth_vals_, death_vals_;
    std::vector<double> lam_, mu_;
};

class Rk4 {
public:
    explicit Rk4(std::size_t n) : tmp_(n), k1_(n), k2_(n), k3_(n), k4_(n) {}

    void step(ForwardSystem& sys, std::vector<double>& p, double t, double h) {
        const std::size_t n = p.size();
        sys.set_time(t);
        sys.apply(p, k1_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = p[i] + 0.5 * h * k1_[i];
        sys.set_time(t + 0.5 * h);
        sys.apply(tmp_, k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = p[i] + 0.5 * h * k2_[i];
        sys.apply(tmp_, k3_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = p[i] + h * k3_[i];
        sys.set_time(t + h);
        sys.apply(tmp_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            p[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }

private:
    std::vector<double> tmp_, k1_, k2_, k3_, k4_;
};

ProbabilitySnapshot finish_snapshot(Window w, const std::vector<double>& p, double t) {
    ProbabilitySnapshot s{w, p, t};
    for (std::size_t i = 0; i < s.probs.size(); ++i) {
        if (s.probs[i] < kNegTol)
            throw NegativeProbability("probability " + std::to_string(s.probs[i]) + " at state " +
                                      std::to_string(w.lo + static_cast<State>(i)) + ", t = " +
                                      std::to_string(t));
        if (s.probs[i] < 0.0) s.probs[i] = 0.0;
    }
    return s;
}

}  // namespace

double max_stable_step(const RateModel& m, Window window) {
    double widest = 0.0;
    for (State k = window.lo; k <= window.hi; ++k) {
        const auto ub = m.upper_bounds(k);
        widest = std::max(widest, ub.birth + ub.death);
    }
    if (widest == 0.0) return std::numeric_limits<double>::infinity();
    return 0.1 / (2.0 * widest);
}

double default_step(const RateModel& m) {
    const double delta = m.global_bound();
    return delta > 0.0 ? std::min(1e-3, 0.05 / delta) : 1e-3;
}

Trajectory integrate(const RateModel& m, Window window, const ProbabilitySnapshot& p0,
                     double t_end, double dt, double output_every) {
    if (window.lo > window.hi) throw SchemaError("integrate: empty window");
    if (!(dt > 0.0)) throw SchemaError("integrate: dt must be positive");
    if (!(output_every > 0.0)) throw SchemaError("integrate: output_every must be positive");
    const double t0 = p0.time;
    if (!(t_end > t0)) throw SchemaError("integrate: t_end must exceed the start time");
    const double limit = max_stable_step(m, window);
    if (dt > limit)
        throw StepTooLarge("integrate: dt = " + std::to_string(dt) + " exceeds 0.1/‖A‖ = " +
                           std::to_string(limit));
    const auto start = p0.embedded(window);
    if (std::abs(start.mass() - 1.0) > kMassTol)
        throw MassDrift("integrate: initial mass " + std::to_string(start.mass()) + " is not 1");

    ForwardSystem sys(m, window);
    Rk4 rk(window.size());
    std::vector<double> p = start.probs;

    Trajectory traj;
    auto emit = [&](double t) {
        traj.snapshots.push_back(finish_snapshot(window, p, t));
        traj.moments.push_back(moments(traj.snapshots.back()));
    };
    emit(t0);

    const double tiny = 1e-12 * std::max(1.0, std::abs(t_end));
    double seg_start = t0;
    for (long j = 1; seg_start < t_end; ++j) {
        double seg_end = t0 + static_cast<double>(j) * output_every;
        if (seg_end > t_end - tiny) seg_end = t_end;
        const double len = seg_end - seg_start;
        const auto steps = std::max<long>(1, static_cast<long>(std::ceil(len / dt - 1e-9)));
        const double h = len / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            rk.step(sys, p, seg_start + static_cast<double>(s) * h, h);
            double mass = 0.0;
            for (double v : p) mass += v;
            if (std::abs(mass - 1.0) > kMassTol)
                throw MassDrift("integrate: mass " + std::to_string(mass) + " at t = " +
                                std::to_string(seg_start + static_cast<double>(s + 1) * h));
        }
        emit(seg_end);
        seg_start = seg_end;
    }
    return traj;
}

LimitingCycle limiting_cycle(const RateModel& m, Window window, const ProbabilitySnapshot& p0,
                             double period, double tol, const CycleOptions& opts) {
    if (!(period > 0.0) || !(tol > 0.0))
        throw SchemaError("limiting_cycle: period and tol must be positive");
    if (opts.outputs_per_period < 1 || opts.max_periods < 1)
        throw SchemaError("limiting_cycle: outputs_per_period and max_periods must be >= 1");
    const double dt = opts.dt > 0.0 ? opts.dt : std::min(default_step(m), max_stable_step(m, window));

    ProbabilitySnapshot current = p0.embedded(window);
    if (opts.t_hint > current.time) {
        const double span = opts.t_hint - current.time;
        current = integrate(m, window, current, opts.t_hint, dt, span).back();
    }
    const double every = period / opts.outputs_per_period;
    for (int n = 1; n <= opts.max_periods; ++n) {
        auto traj = integrate(m, window, current, current.time + period, dt, every);
        const double dist = l1_distance(traj.back(), current);
        if (dist < tol) return {std::move(traj), dist, n};
        current = traj.back();
    }
    throw NoConvergence("limiting_cycle: period-to-period distance still >= " +
                        std::to_string(tol) + " after " + std::to_string(opts.max_periods) +
                        " periods");
}

}  // namespace bdpz
