#include "bdpz/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "bdpz/errors.hpp"

namespace bdpz {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Walks one path and reports each accepted jump to `on_jump`.
template <class OnJump>
State walk(const RateModel& m, State x0, double t_end, std::uint64_t seed, OnJump on_jump) {
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    State x = x0;
    double t = 0.0;
    // Dominating rates are per state; cache the current one.
    double bound = 0.0;
    State bound_state = x + 1;
    for (;;) {
        if (bound_state != x) {
            const auto ub = m.upper_bounds(x);
            bound = ub.birth + ub.death;
            bound_state = x;
        }
        if (bound <= 0.0) return x;
        std::exponential_distribution<double> wait(bound);
        t += wait(rng);
        if (t > t_end) return x;
        const double u = unit(rng) * bound;
        const double up = m.birth_rate(x, t);
        if (u < up) {
            ++x;
            on_jump(t, x);
        } else if (u < up + m.death_rate(x, t)) {
            --x;
            on_jump(t, x);
        }
    }
}

}  // namespace

std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

State PathSample::state_at(double t) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return states[static_cast<std::size_t>(it - jump_times.begin())];
}

PathSample sample_path(const RateModel& m, State x0, double t_end, std::uint64_t seed) {
    if (!(t_end > 0.0)) throw SchemaError("sample_path: t_end must be positive");
    PathSample path{seed, {}, {x0}, t_end};
    walk(m, x0, t_end, seed, [&](double t, State x) {
        path.jump_times.push_back(t);
        path.states.push_back(x);
    });
    return path;
}

EmpiricalDistribution empirical_distribution(const RateModel& m, State x0, double t,
                                             std::uint64_t n_paths, std::uint64_t seed,
                                             unsigned threads) {
    if (n_paths < 1) throw SchemaError("empirical_distribution: n_paths must be >= 1");
    if (!(t > 0.0)) throw SchemaError("empirical_distribution: t must be positive");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_paths));

    // Integer counts merge order-insensitively, so any split gives the same result.
    std::vector<std::map<State, std::uint64_t>> partial(threads);
    auto work = [&](unsigned w) {
        for (std::uint64_t i = w; i < n_paths; i += threads)
            ++partial[w][walk(m, x0, t, path_seed(seed, i), [](double, State) {})];
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
    work(0);
    pool.clear();

    std::map<State, std::uint64_t> counts;
    for (const auto& part : partial)
        for (const auto& [k, c] : part) counts[k] += c;

    const Window window{counts.begin()->first, counts.rbegin()->first};
    EmpiricalDistribution out;
    out.snapshot = {window, std::vector<double>(window.size(), 0.0), t};
    out.std_errors.assign(window.size(), 0.0);
    out.counts.assign(window.size(), 0);
    out.n_paths = n_paths;
    out.seed = seed;
    const double n = static_cast<double>(n_paths);
    for (const auto& [k, c] : counts) {
        const auto i = static_cast<std::size_t>(k - window.lo);
        const double p = static_cast<double>(c) / n;
        out.counts[i] = c;
        out.snapshot.probs[i] = p;
        out.std_errors[i] = std::sqrt(p * (1.0 - p) / n);
    }
    return out;
}

}  // namespace bdpz
