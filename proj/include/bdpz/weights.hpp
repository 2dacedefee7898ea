#pragma once

#include <map>

#include "bdpz/model.hpp"

namespace bdpz {

/// Doubly infinite positive weights {d_k, k != 0}: an explicit head for
/// 0 < |k| <= K0 continued by geometric tails,
///   d_{k+1} = pos_ratio * d_k   and   d_{-k-1} = neg_ratio * d_{-k}   for k >= K0.
/// Both ratios must be >= 1 and the smallest weight must equal 1, so that
/// inf_k d_k = 1.
class WeightSequence {
public:
    WeightSequence(std::map<State, double> head, double pos_ratio, double neg_ratio);

    /// d_1 = d_{-1} = 1 and ratio r on both sides: d_k = r^{|k|-1}.
    static WeightSequence mirror_geometric(double ratio);
    /// d_1 = 1, d_{-1} = c, ratio r on both sides: d_k = r^{k-1}, d_{-k} = c·r^{k-1}.
    static WeightSequence two_sided(double c, double ratio);

    /// d_k for k != 0.
    double operator()(State k) const;
    double log_weight(State k) const;

    /// Σ_{j=1}^{n} d_j (n >= 0; empty sum is 0).
    double positive_sum(State n) const;
    /// Σ_{j=-n}^{-1} d_j.
    double negative_sum(State n) const;
    /// Logarithms of the two partial sums; accurate where the sums overflow.
    double log_positive_sum(State n) const;
    double log_negative_sum(State n) const;

    /// Σ_{j=min(1,k)}^{max(-1,k)} d_j, the weight carried by state k != 0
    /// in the D-norm.
    double span_sum(State k) const;

    State head_extent() const { return k0_; }
    double pos_ratio() const { return pos_ratio_; }
    double neg_ratio() const { return neg_ratio_; }
    const std::map<State, double>& head() const { return head_; }

private:
    double log_side_sum(State n, int sign) const;

    std::map<State, double> head_;
    double pos_ratio_;
    double neg_ratio_;
    State k0_ = 0;
};

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

}  // namespace bdpz
