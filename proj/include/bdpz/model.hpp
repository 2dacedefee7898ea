#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bdpz {

using State = std::int64_t;

inline constexpr State kNegInf = std::numeric_limits<State>::min();
inline constexpr State kPosInf = std::numeric_limits<State>::max();

/// Time profile of an intensity: base + a·sin(2πft) + b·cos(2πft).
struct RateExpr {
    double base = 0.0;
    double sin_amp = 0.0;
    double cos_amp = 0.0;
    double freq = 1.0;

    double operator()(double t) const;
    double amplitude() const;
    /// Tight upper bound over t (base + amplitude).
    double upper() const { return base + amplitude(); }
    bool is_constant() const { return sin_amp == 0.0 && cos_amp == 0.0; }

    friend bool operator==(const RateExpr&, const RateExpr&) = default;
};

/// State-dependent multiplier applied to a RateExpr.
struct StateFactor {
    enum class Kind { one, min_linear, table };

    Kind kind = Kind::one;
    State cap = 1;                       // min_linear: min(|i|, cap)
    std::map<State, double> entries;     // table
    double fallback = 1.0;               // table value outside `entries`

    static StateFactor one() { return {}; }
    static StateFactor min_linear(State cap);
    static StateFactor table(std::map<State, double> entries, double fallback);

    double operator()(State i) const;

    friend bool operator==(const StateFactor&, const StateFactor&) = default;
};

/// Rate expression valid on the closed state range [lo, hi].
/// kNegInf / kPosInf stand for the unbounded ends.
struct RateBand {
    State lo = kNegInf;
    State hi = kPosInf;
    RateExpr expr;
    StateFactor factor;

    bool contains(State i) const { return lo <= i && i <= hi; }

    friend bool operator==(const RateBand&, const RateBand&) = default;
};

struct RateBounds {
    double birth = 0.0;
    double death = 0.0;
};

/// Bilateral birth-death intensities λ_i(t) (i -> i+1) and μ_i(t) (i -> i-1)
/// on the integers. Immutable after construction; every query is pure.
class RateModel {
public:
    /// Validates non-negativity, band coverage/disjointness and the horizon.
    /// Throws SchemaError on violation.
    RateModel(std::string name, std::vector<RateBand> birth, std::vector<RateBand> death,
              State horizon);

    double birth_rate(State i, double t) const;
    double death_rate(State i, double t) const;

    RateBounds upper_bounds(State i) const;

    /// Δ: supremum of all per-state upper bounds.
    double global_bound() const { return global_bound_; }

    State horizon() const { return horizon_; }
    const std::string& name() const { return name_; }
    const std::vector<RateBand>& birth_bands() const { return birth_; }
    const std::vector<RateBand>& death_bands() const { return death_; }

    std::size_t birth_band_index(State i) const;
    std::size_t death_band_index(State i) const;

    /// Common period of the time-varying bands; nullopt when every band is
    /// constant in time. Throws SchemaError if frequencies differ.
    std::optional<double> period() const;

private:
    std::string name_;
    std::vector<RateBand> birth_;
    std::vector<RateBand> death_;
    State horizon_;
    double global_bound_ = 0.0;
};

/// Randomized random walk: λ(t)=1+sin(2πt), μ_i=3·min(i,2), mirrored onto
/// the negative axis, with both exits from 0 at rate λ(t).
RateModel example1();

/// Double-ended taxi/passenger queue: λ(t)=2+sin(2πt)/4 everywhere,
/// μ_1(t)=1+sin(2πt)/8 for i<=0, μ_2(t)=4+cos(2πt)/4 for i>=1.
RateModel example2();

/// State- and time-independent rates (λ, μ) on all of Z.
RateModel constant_model(double lambda, double mu);

/// Returns example1()/example2() for "ex1"/"ex2", nullopt otherwise.
std::optional<RateModel> builtin_model(const std::string& name);

}  // namespace bdpz
