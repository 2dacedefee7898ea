#include "bdpz/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdpz/errors.hpp"

namespace bdpz {

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

namespace {

// log Σ_{i=1}^{m} r^i for r >= 1, m >= 1.
double log_geometric(double r, State m) {
    const double md = static_cast<double>(m);
    if (r == 1.0) return std::log(md);
    const double lr = std::log(r);
    const double x = md * lr;
    // r (r^m - 1) / (r - 1) with r^m - 1 = e^x (1 - e^{-x}).
    return lr + x + std::log(-std::expm1(-x)) - std::log(r - 1.0);
}

}  // namespace

WeightSequence::WeightSequence(std::map<State, double> head, double pos_ratio, double neg_ratio)
    : head_(std::move(head)), pos_ratio_(pos_ratio), neg_ratio_(neg_ratio) {
    if (head_.empty()) throw SchemaError("weights: head must not be empty");
    for (const auto& [k, v] : head_) {
        if (k == 0) throw SchemaError("weights: d_0 is not defined");
        if (!(v > 0.0) || !std::isfinite(v))
            throw SchemaError("weights: d_" + std::to_string(k) + " must be positive and finite");
        k0_ = std::max(k0_, k < 0 ? -k : k);
    }
    for (State k = 1; k <= k0_; ++k)
        if (!head_.contains(k) || !head_.contains(-k))
            throw SchemaError("weights: head must list every 0 < |k| <= " + std::to_string(k0_) +
                              " (missing " + std::to_string(head_.contains(k) ? -k : k) + ")");
    if (!std::isfinite(pos_ratio_) || !std::isfinite(neg_ratio_) || pos_ratio_ <= 0.0 ||
        neg_ratio_ <= 0.0)
        throw SchemaError("weights: ratios must be positive and finite");
    // A ratio below 1 drives the tail to 0 and the infimum cannot be 1.
    if (pos_ratio_ < 1.0 || neg_ratio_ < 1.0)
        throw SchemaError("weights: tail ratios must be >= 1 (otherwise inf d_k = 0)");
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& [k, v] : head_) lo = std::min(lo, v);
    if (std::abs(lo - 1.0) > 1e-12)
        throw SchemaError("weights: inf d_k must equal 1 (got " + std::to_string(lo) + ")");
}

WeightSequence WeightSequence::mirror_geometric(double ratio) {
    return WeightSequence({{-1, 1.0}, {1, 1.0}}, ratio, ratio);
}

WeightSequence WeightSequence::two_sided(double c, double ratio) {
    return WeightSequence({{-1, c}, {1, 1.0}}, ratio, ratio);
}

double WeightSequence::log_weight(State k) const {
    if (k == 0) throw SchemaError("weights: d_0 is not defined");
    const State a = k < 0 ? -k : k;
    if (a <= k0_) return std::log(head_.at(k));
    const double r = k < 0 ? neg_ratio_ : pos_ratio_;
    const State edge = k < 0 ? -k0_ : k0_;
    return std::log(head_.at(edge)) + static_cast<double>(a - k0_) * std::log(r);
}

double WeightSequence::operator()(State k) const {
    const State a = k < 0 ? -k : k;
    if (a != 0 && a <= k0_) return head_.at(k);
    return std::exp(log_weight(k));
}

double WeightSequence::log_side_sum(State n, int sign) const {
    if (n <= 0) return -std::numeric_limits<double>::infinity();
    const State inner = std::min(n, k0_);
    double head_sum = 0.0;
    for (State j = 1; j <= inner; ++j) head_sum += head_.at(sign * j);
    double acc = std::log(head_sum);
    if (n > k0_) {
        const double r = sign > 0 ? pos_ratio_ : neg_ratio_;
        const double edge = std::log(head_.at(sign * k0_));
        acc = log_add(acc, edge + log_geometric(r, n - k0_));
    }
    return acc;
}

double WeightSequence::log_positive_sum(State n) const { return log_side_sum(n, +1); }
double WeightSequence::log_negative_sum(State n) const { return log_side_sum(n, -1); }

double WeightSequence::positive_sum(State n) const {
    if (n <= 0) return 0.0;
    return std::exp(log_positive_sum(n));
}

double WeightSequence::negative_sum(State n) const {
    if (n <= 0) return 0.0;
    return std::exp(log_negative_sum(n));
}

double WeightSequence::span_sum(State k) const {
    if (k == 0) return 0.0;
    if (k > 0) {
        if (k <= k0_) {
            double s = 0.0;
            for (State j = 1; j <= k; ++j) s += head_.at(j);
            return s;
        }
        return positive_sum(k);
    }
    if (-k <= k0_) {
        double s = 0.0;
        for (State j = k; j <= -1; ++j) s += head_.at(j);
        return s;
    }
    return negative_sum(-k);
}

}  // namespace bdpz
