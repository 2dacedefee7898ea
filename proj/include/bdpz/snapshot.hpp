#pragma once

#include <cstddef>
#include <vector>

#include "bdpz/model.hpp"

namespace bdpz {

/// Closed state range {lo, ..., hi}.
struct Window {
    State lo = 0;
    State hi = 0;

    std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
    bool contains(State k) const { return lo <= k && k <= hi; }

    friend bool operator==(const Window&, const Window&) = default;
};

/// Distribution over a finite window at a given time; probs[i] is P{X = lo + i}.
struct ProbabilitySnapshot {
    Window window;
    std::vector<double> probs;
    double time = 0.0;

    static ProbabilitySnapshot delta(Window w, State k, double time = 0.0);

    /// P{X = k}; zero outside the window.
    double at(State k) const {
        return window.contains(k) ? probs[static_cast<std::size_t>(k - window.lo)] : 0.0;
    }
    double mass() const;
    /// Copy of this snapshot on another window. Throws SchemaError when
    /// probability mass would be dropped.
    ProbabilitySnapshot embedded(Window w) const;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

Moments moments(const ProbabilitySnapshot& s);

/// Σ_k |p_k - q_k| over the union of both windows.
double l1_distance(const ProbabilitySnapshot& p, const ProbabilitySnapshot& q);

/// P{X <= -n} and P{X >= n}.
double left_tail(const ProbabilitySnapshot& s, State n);
double right_tail(const ProbabilitySnapshot& s, State n);

}  // namespace bdpz
