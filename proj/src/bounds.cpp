#include "bdpz/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdpz/errors.hpp"

namespace bdpz {

namespace {

// d_to / d_from for neighbouring indices (|to - from| = 1 or the ±1 pair),
// computed without going through exp/log so that tail values are
// bit-identical across k.
double weight_ratio(const WeightSequence& w, State from, State to) {
    const State k0 = w.head_extent();
    const State af = from < 0 ? -from : from;
    const State at = to < 0 ? -to : to;
    if (af <= k0 && at <= k0) return w.head().at(to) / w.head().at(from);
    const double r = from < 0 ? w.neg_ratio() : w.pos_ratio();
    return at > af ? r : 1.0 / r;
}

void require_positive_env(const EnvelopeConstants& env, const char* what) {
    if (!(env.beta > 0.0) || !(env.M > 0.0))
        throw SchemaError(std::string(what) + ": envelope needs M > 0 and beta > 0");
}

double golden_min(const RateModel& m, const WeightSequence& w, double a, double b, double period,
                  double& arg) {
    auto f = [&](double t) {
        // β** is periodic; fold negative probes back into [0, period).
        if (t < 0.0) t += period;
        return beta_inf(m, w, t);
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > 1e-12) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    arg = f1 <= f2 ? x1 : x2;
    return std::min(f1, f2);
}

}  // namespace

std::string to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::theorem1: return "theorem1";
        case BoundKind::tail_left: return "tail_left";
        case BoundKind::tail_right: return "tail_right";
        case BoundKind::tail_two_sided: return "tail_two_sided";
        case BoundKind::theorem2: return "theorem2";
        case BoundKind::mean_error: return "mean_error";
    }
    return "unknown";
}

double beta_kk(const RateModel& m, const WeightSequence& w, State k, double t) {
    if (k == 0) throw SchemaError("beta_kk: k must be non-zero");
    auto lam = [&](State i) { return m.birth_rate(i, t); };
    auto mu = [&](State i) { return m.death_rate(i, t); };
    if (k < -1)
        return lam(k) + mu(k + 1) - weight_ratio(w, k, k + 1) * lam(k + 1) -
               weight_ratio(w, k, k - 1) * mu(k);
    if (k == -1)
        return lam(-1) + mu(0) - weight_ratio(w, -1, 1) * lam(0) -
               weight_ratio(w, -1, -2) * mu(-1);
    if (k == 1)
        return lam(0) + mu(1) - weight_ratio(w, 1, 2) * lam(1) - weight_ratio(w, 1, -1) * mu(0);
    return lam(k - 1) + mu(k) - weight_ratio(w, k, k + 1) * lam(k) -
           weight_ratio(w, k, k - 1) * mu(k - 1);
}

State beta_tail_index(const RateModel& m, const WeightSequence& w) {
    return std::max(m.horizon(), w.head_extent());
}

double beta_inf(const RateModel& m, const WeightSequence& w, double t) {
    const State last = beta_tail_index(m, w) + 1;
    double best = std::numeric_limits<double>::infinity();
    for (State a = 1; a <= last; ++a) {
        best = std::min(best, beta_kk(m, w, a, t));
        best = std::min(best, beta_kk(m, w, -a, t));
    }
    return best;
}

double integrate_beta(const RateModel& m, const WeightSequence& w, double s, double t,
                      double period, int panels_per_period) {
    if (t <= s) return 0.0;
    const double span = t - s;
    auto panels = static_cast<long>(std::ceil(span / period * panels_per_period));
    panels = std::max<long>(2, panels + (panels % 2));
    const double h = span / static_cast<double>(panels);
    double acc = beta_inf(m, w, s) + beta_inf(m, w, t);
    for (long i = 1; i < panels; ++i)
        acc += (i % 2 ? 4.0 : 2.0) * beta_inf(m, w, s + h * static_cast<double>(i));
    return acc * h / 3.0;
}

EnvelopeConstants fit_envelope(const RateModel& m, const WeightSequence& w,
                               EnvelopeStrategy strategy, double period) {
    if (!(period > 0.0)) throw SchemaError("fit_envelope: period must be positive");
    constexpr int grid = 10000;
    std::vector<double> values(grid + 1);
    for (int i = 0; i <= grid; ++i) values[i] = beta_inf(m, w, period * i / grid);

    EnvelopeConstants env;
    if (strategy == EnvelopeStrategy::pointwise) {
        const auto it = std::min_element(values.begin(), values.end());
        const auto idx = static_cast<int>(it - values.begin());
        const double h = period / grid;
        double arg = 0.0;
        const double refined =
            golden_min(m, w, period * idx / grid - h, period * idx / grid + h, period, arg);
        env.M = 1.0;
        env.beta = std::min(*it, refined);
    } else {
        // Composite Simpson over pairs of grid cells; G is tracked at even nodes.
        const double h = period / grid;
        std::vector<double> cumulative(grid / 2 + 1, 0.0);
        for (int j = 1; j <= grid / 2; ++j) {
            const int i = 2 * j;
            cumulative[j] = cumulative[j - 1] +
                            h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
        }
        env.beta = cumulative.back() / period;
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        double slope = 0.0;
        for (int j = 0; j <= grid / 2; ++j) {
            const double g = env.beta * (2.0 * h * j) - cumulative[j];
            g_max = std::max(g_max, g);
            g_min = std::min(g_min, g);
        }
        for (double v : values) slope = std::max(slope, std::abs(env.beta - v));
        // G moves at most slope·2h between tracked nodes.
        env.M = std::exp(g_max - g_min + 2.0 * h * slope);
    }
    if (!(env.beta > 0.0))
        throw NotErgodicWithTheseWeights("envelope rate beta = " + std::to_string(env.beta) +
                                         " <= 0; choose different weights");
    return env;
}

double weighted_initial_norm(const WeightSequence& w, const ProbabilitySnapshot& p,
                             const ProbabilitySnapshot& q) {
    const State lo = std::min(p.window.lo, q.window.lo);
    const State hi = std::max(p.window.hi, q.window.hi);
    double acc = 0.0;
    for (State k = lo; k <= hi; ++k) {
        if (k == 0) continue;
        const double diff = std::abs(p.at(k) - q.at(k));
        if (diff != 0.0) acc += diff * w.span_sum(k);
    }
    return acc;
}

BoundReport theorem1_bound(const WeightSequence& w, const EnvelopeConstants& env,
                           const ProbabilitySnapshot& p0, const ProbabilitySnapshot& q0,
                           double t) {
    if (t < 0.0) throw SchemaError("theorem1_bound: t must be >= 0");
    const double norm0 = weighted_initial_norm(w, p0, q0);
    const double value = norm0 == 0.0 ? 0.0 : env.M * std::exp(-env.beta * t) * norm0;
    return {BoundKind::theorem1, value, {{"M", env.M}, {"beta", env.beta}, {"t", t}, {"norm0", norm0}}};
}

BoundReport theorem1_bound_integrated(const RateModel& m, const WeightSequence& w,
                                      const ProbabilitySnapshot& p0,
                                      const ProbabilitySnapshot& q0, double t, double period) {
    if (t < 0.0) throw SchemaError("theorem1_bound: t must be >= 0");
    const double norm0 = weighted_initial_norm(w, p0, q0);
    const double exponent = integrate_beta(m, w, 0.0, t, period);
    const double value = norm0 == 0.0 ? 0.0 : std::exp(-exponent) * norm0;
    return {BoundKind::theorem1, value, {{"integral", exponent}, {"t", t}, {"norm0", norm0}}};
}

BoundReport tail_bound(const RateModel& m, const WeightSequence& w, const EnvelopeConstants& env,
                       const ProbabilitySnapshot& p0, State n, double t, TailSide side) {
    if (n < 1) throw SchemaError("tail_bound: N must be >= 1");
    if (t < 0.0) throw SchemaError("tail_bound: t must be >= 0");
    require_positive_env(env, "tail_bound");
    double norm0 = 0.0;
    for (std::size_t i = 0; i < p0.probs.size(); ++i) {
        const State k = p0.window.lo + static_cast<State>(i);
        if (k != 0 && p0.probs[i] != 0.0) norm0 += p0.probs[i] * w.span_sum(k);
    }
    const auto ub0 = m.upper_bounds(0);
    const double source = w(-1) * ub0.death + w(1) * ub0.birth;
    const double transient = norm0 == 0.0 ? 0.0 : std::exp(-env.beta * t) * norm0;
    const double level = env.M * (transient + source / env.beta);
    const double left = level / w.negative_sum(n);
    const double right = level / w.positive_sum(n);

    BoundReport r;
    r.inputs = {{"M", env.M}, {"beta", env.beta}, {"N", static_cast<double>(n)},
                {"t", t},     {"norm0", norm0},   {"source", source}};
    switch (side) {
        case TailSide::left: r.kind = BoundKind::tail_left; r.value = left; break;
        case TailSide::right: r.kind = BoundKind::tail_right; r.value = right; break;
        case TailSide::both: r.kind = BoundKind::tail_two_sided; r.value = left + right; break;
    }
    return r;
}

BoundReport theorem2_weighted(const RateModel& m, const WeightSequence& d,
                              const WeightSequence& d_star, const EnvelopeConstants& env,
                              const EnvelopeConstants& env_star, State n1, State n2) {
    if (!(n1 < 0 && n2 > 0)) throw SchemaError("theorem2: need N1 < 0 < N2");
    require_positive_env(env, "theorem2");
    require_positive_env(env_star, "theorem2");
    const double ninf = -std::numeric_limits<double>::infinity();
    const auto ub0 = m.upper_bounds(0);
    const double source = ub0.death * d_star(-1) + ub0.birth * d_star(1);
    const double mu_edge = m.upper_bounds(n1).death;
    const double lam_edge = m.upper_bounds(n2).birth;

    BoundReport r{BoundKind::theorem2, 0.0,
                  {{"M", env.M}, {"beta", env.beta}, {"M_star", env_star.M},
                   {"beta_star", env_star.beta}, {"N1", static_cast<double>(n1)},
                   {"N2", static_cast<double>(n2)}}};
    if (source == 0.0) return r;
    const double log_pref = std::log(2.0 * env.M * env_star.M * source) -
                            std::log(env.beta) - std::log(env_star.beta);
    const double left = mu_edge == 0.0 ? ninf
                                       : d.log_negative_sum(-n1 + 1) + std::log(mu_edge) -
                                             d_star.log_negative_sum(-n1);
    const double right = lam_edge == 0.0 ? ninf
                                         : d.log_positive_sum(n2 + 1) + std::log(lam_edge) -
                                               d_star.log_positive_sum(n2);
    const double terms = log_add(left, right);
    if (terms == ninf) return r;
    r.value = std::exp(log_pref + terms);
    return r;
}

BoundReport theorem2_bound(const RateModel& m, const WeightSequence& d,
                           const WeightSequence& d_star, const EnvelopeConstants& env,
                           const EnvelopeConstants& env_star, State n1, State n2) {
    auto r = theorem2_weighted(m, d, d_star, env, env_star, n1, n2);
    const double dmin = std::min(d(-1), d(1));
    r.value *= 2.0 / dmin;
    r.inputs.emplace_back("d_min", dmin);
    return r;
}

double w_constant(const WeightSequence& w, State k_probe) {
    if (k_probe < std::max<State>(1, w.head_extent()))
        throw DecreasingQuotient("w_constant: probe " + std::to_string(k_probe) +
                                 " does not cover the head of the weight sequence");
    double best = std::numeric_limits<double>::infinity();
    double neg = 0.0;
    double pos = 0.0;
    for (State k = 1; k <= k_probe; ++k) {
        neg += w(-k);
        pos += w(k);
        const double kd = static_cast<double>(k);
        best = std::min({best, neg / kd, pos / kd});
    }
    const double kd = static_cast<double>(k_probe);
    const double next = kd + 1.0;
    const double slack = 1.0 - 1e-12;
    if ((neg + w(-(k_probe + 1))) / next < neg / kd * slack ||
        (pos + w(k_probe + 1)) / next < pos / kd * slack)
        throw DecreasingQuotient("w_constant: quotients still decreasing at k = " +
                                 std::to_string(k_probe) + "; increase the probe");
    return best;
}

BoundReport mean_error_bound(double theorem2_weighted_value, double w_const) {
    if (!(w_const > 0.0)) throw SchemaError("mean_error_bound: W must be positive");
    if (theorem2_weighted_value < 0.0)
        throw SchemaError("mean_error_bound: weighted bound must be >= 0");
    return {BoundKind::mean_error, theorem2_weighted_value / w_const,
            {{"weighted", theorem2_weighted_value}, {"W", w_const}}};
}

TruncationPlan plan_truncation(const RateModel& m, const WeightSequence& d,
                               const WeightSequence& d_star, const EnvelopeConstants& env,
                               const EnvelopeConstants& env_star, double eps) {
    if (!(eps > 0.0)) throw SchemaError("plan_truncation: eps must be positive");
    if (!(d_star.pos_ratio() > d.pos_ratio() && d_star.neg_ratio() > d.neg_ratio()))
        throw NotAchievable(
            "plan_truncation: the d* tail ratios must exceed the d tail ratios on both sides");
    auto value = [&](State n) { return theorem2_bound(m, d, d_star, env, env_star, -n, n).value; };
    if (value(1) <= eps) return {-1, 1, value(1)};
    State lo = 1;
    State hi = 2;
    constexpr State limit = State{1} << 40;
    while (value(hi) > eps) {
        lo = hi;
        hi *= 2;
        if (hi > limit)
            throw NotAchievable("plan_truncation: no window up to 2^40 reaches eps");
    }
    while (hi - lo > 1) {
        const State mid = lo + (hi - lo) / 2;
        (value(mid) <= eps ? hi : lo) = mid;
    }
    return {-hi, hi, value(hi)};
}

double convergence_time(const EnvelopeConstants& env, double norm0, double eps) {
    if (!(norm0 >= 0.0) || !(eps > 0.0))
        throw SchemaError("convergence_time: need norm0 >= 0 and eps > 0");
    require_positive_env(env, "convergence_time");
    if (env.M * norm0 <= eps) return 0.0;
    return std::max(0.0, std::log(env.M * norm0 / eps) / env.beta);
}

}  // namespace bdpz
