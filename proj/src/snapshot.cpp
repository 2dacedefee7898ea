#include "bdpz/snapshot.hpp"

#include <algorithm>
#include <cmath>

#include "bdpz/errors.hpp"

namespace bdpz {

ProbabilitySnapshot ProbabilitySnapshot::delta(Window w, State k, double time) {
    if (!w.contains(k)) throw SchemaError("delta: state outside window");
    ProbabilitySnapshot s{w, std::vector<double>(w.size(), 0.0), time};
    s.probs[static_cast<std::size_t>(k - w.lo)] = 1.0;
    return s;
}

double ProbabilitySnapshot::mass() const {
    double m = 0.0;
    for (double p : probs) m += p;
    return m;
}

ProbabilitySnapshot ProbabilitySnapshot::embedded(Window w) const {
    ProbabilitySnapshot out{w, std::vector<double>(w.size(), 0.0), time};
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const State k = window.lo + static_cast<State>(i);
        if (w.contains(k))
            out.probs[static_cast<std::size_t>(k - w.lo)] = probs[i];
        else if (probs[i] != 0.0)
            throw SchemaError("snapshot has mass at state " + std::to_string(k) +
                              " outside the target window");
    }
    return out;
}

Moments moments(const ProbabilitySnapshot& s) {
    double m1 = 0.0;
    for (std::size_t i = 0; i < s.probs.size(); ++i)
        m1 += static_cast<double>(s.window.lo + static_cast<State>(i)) * s.probs[i];
    // Central second moment avoids cancellation in Σk²p - mean².
    double m2 = 0.0;
    for (std::size_t i = 0; i < s.probs.size(); ++i) {
        const double d = static_cast<double>(s.window.lo + static_cast<State>(i)) - m1;
        m2 += d * d * s.probs[i];
    }
    return {m1, std::max(0.0, m2)};
}

double l1_distance(const ProbabilitySnapshot& p, const ProbabilitySnapshot& q) {
    const State lo = std::min(p.window.lo, q.window.lo);
    const State hi = std::max(p.window.hi, q.window.hi);
    double acc = 0.0;
    for (State k = lo; k <= hi; ++k) acc += std::abs(p.at(k) - q.at(k));
    return acc;
}

double left_tail(const ProbabilitySnapshot& s, State n) {
    double acc = 0.0;
    for (State k = s.window.lo; k <= std::min(-n, s.window.hi); ++k) acc += s.at(k);
    return acc;
}

double right_tail(const ProbabilitySnapshot& s, State n) {
    double acc = 0.0;
    for (State k = std::max(n, s.window.lo); k <= s.window.hi; ++k) acc += s.at(k);
    return acc;
}

}  // namespace bdpz
