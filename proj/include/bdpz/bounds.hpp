#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bdpz/model.hpp"
#include "bdpz/snapshot.hpp"
#include "bdpz/weights.hpp"

namespace bdpz {

/// Constants certifying exp(-∫_s^t β**(u) du) <= M·exp(-beta·(t-s)), 0 <= s <= t.
struct EnvelopeConstants {
    double M = 1.0;
    double beta = 0.0;
};

enum class EnvelopeStrategy { pointwise, period_average };

enum class BoundKind { theorem1, tail_left, tail_right, tail_two_sided, theorem2, mean_error };

std::string to_string(BoundKind kind);

/// An evaluated right-hand side. Values are not clamped and may exceed 1.
struct BoundReport {
    BoundKind kind = BoundKind::theorem1;
    double value = 0.0;
    std::vector<std::pair<std::string, double>> inputs;
};

enum class TailSide { left, right, both };

/// Column-sum rate of state k != 0 of the weighted reduced system. May be
/// negative.
double beta_kk(const RateModel& m, const WeightSequence& w, State k, double t);

/// Last index whose β**_k still differs from its neighbours; for |k| beyond
/// this β**_k equals the value at ±(index + 1).
State beta_tail_index(const RateModel& m, const WeightSequence& w);

/// β**(t) = inf over k != 0 of β**_k(t), evaluated exactly as a finite
/// minimum over |k| <= beta_tail_index + 1.
double beta_inf(const RateModel& m, const WeightSequence& w, double t);

/// ∫_s^t β**(u) du by composite Simpson with `panels_per_period` panels per
/// unit of `period`.
double integrate_beta(const RateModel& m, const WeightSequence& w, double s, double t,
                      double period = 1.0, int panels_per_period = 10000);

/// Fits (M, beta) over one period.
///
/// pointwise: beta = min_t β**(t) (10^4-point grid refined by golden section
/// to 1e-12), M = 1.
/// period_average: beta = period mean of β**, M = exp(max G - min G) where
/// G(t) = beta·t - ∫_0^t β**.
///
/// Throws NotErgodicWithTheseWeights when beta <= 0.
EnvelopeConstants fit_envelope(const RateModel& m, const WeightSequence& w,
                               EnvelopeStrategy strategy, double period);

/// ‖D(z_p - z_q)‖ upper estimate: Σ_{k≠0} |p_k - q_k| · span_sum(k).
double weighted_initial_norm(const WeightSequence& w, const ProbabilitySnapshot& p,
                             const ProbabilitySnapshot& q);

/// M·e^{-beta·t}·weighted_initial_norm(p0, q0).
BoundReport theorem1_bound(const WeightSequence& w, const EnvelopeConstants& env,
                           const ProbabilitySnapshot& p0, const ProbabilitySnapshot& q0, double t);

/// Same bound with the exact exponent e^{-∫_0^t β**}.
BoundReport theorem1_bound_integrated(const RateModel& m, const WeightSequence& w,
                                      const ProbabilitySnapshot& p0,
                                      const ProbabilitySnapshot& q0, double t,
                                      double period = 1.0);

/// Concentration bound on P{X(t) <= -N}, P{X(t) >= N} or their sum.
/// `t` may be +infinity for the limiting regime.
BoundReport tail_bound(const RateModel& m, const WeightSequence& w, const EnvelopeConstants& env,
                       const ProbabilitySnapshot& p0, State n, double t, TailSide side);

/// Truncation error between the process and its restriction to {n1..n2},
/// both started at 0. `theorem2_weighted` is the bound on ‖D(z - z*)‖
/// (before the final 1/min(d_{-1}, d_1) conversion); `theorem2_bound`
/// bounds ‖p - p*‖ and equals 2/min(d_{-1}, d_1) times the weighted value.
/// Evaluated in the log domain.
BoundReport theorem2_weighted(const RateModel& m, const WeightSequence& d,
                              const WeightSequence& d_star, const EnvelopeConstants& env,
                              const EnvelopeConstants& env_star, State n1, State n2);
BoundReport theorem2_bound(const RateModel& m, const WeightSequence& d,
                           const WeightSequence& d_star, const EnvelopeConstants& env,
                           const EnvelopeConstants& env_star, State n1, State n2);

/// W = min over k = 1..k_probe of Σ_{j=-k}^{-1} d_j / k and Σ_{j=1}^{k} d_j / k.
/// Throws DecreasingQuotient unless both quotients are already
/// non-decreasing at k_probe (which makes the probe exhaustive).
double w_constant(const WeightSequence& w, State k_probe);

BoundReport mean_error_bound(double theorem2_weighted_value, double w_const);

struct TruncationPlan {
    State n1 = -1;
    State n2 = 1;
    double value = 0.0;
};

/// Smallest symmetric window {-N..N} whose theorem2_bound is <= eps.
/// Throws NotAchievable unless d_star grows strictly faster than d on both sides.
TruncationPlan plan_truncation(const RateModel& m, const WeightSequence& d,
                               const WeightSequence& d_star, const EnvelopeConstants& env,
                               const EnvelopeConstants& env_star, double eps);

/// max(0, ln(M·norm0/eps) / beta).
double convergence_time(const EnvelopeConstants& env, double norm0, double eps);

}  // namespace bdpz
