#pragma once

#include <cstdint>
#include <vector>

#include "bdpz/model.hpp"
#include "bdpz/snapshot.hpp"

namespace bdpz {

/// One exact trajectory on [0, t_end]: states[0] at time 0, states[i+1]
/// entered at jump_times[i].
struct PathSample {
    std::uint64_t seed = 0;
    std::vector<double> jump_times;
    std::vector<State> states;
    double t_end = 0.0;

    State state_at(double t) const;
};

/// Seed of path `index` in a batch started from `master`. Depends only on
/// (master, index), never on execution order.
std::uint64_t path_seed(std::uint64_t master, std::uint64_t index);

/// Samples a path by thinning: from state i, propose events at the
/// dominating rate λ̄_i + μ̄_i and accept them with the true total rate
/// ratio at the proposal time. States with zero dominating rate absorb.
PathSample sample_path(const RateModel& m, State x0, double t_end, std::uint64_t seed);

struct EmpiricalDistribution {
    ProbabilitySnapshot snapshot;   // window = observed support
    std::vector<double> std_errors;    // √(p̂(1-p̂)/n), parallel to snapshot.probs
    std::vector<std::uint64_t> counts;
    std::uint64_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Histogram of X(t) over n_paths independent paths. Path i uses
/// path_seed(seed, i). `threads` = 0 picks the hardware concurrency; the
/// result is identical for every thread count.
EmpiricalDistribution empirical_distribution(const RateModel& m, State x0, double t,
                                             std::uint64_t n_paths, std::uint64_t seed,
                                             unsigned threads = 0);

}  // namespace bdpz
