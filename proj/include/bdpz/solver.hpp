#pragma once

#include <optional>
#include <vector>

#include "bdpz/model.hpp"
#include "bdpz/snapshot.hpp"

namespace bdpz {

struct Trajectory {
    std::vector<ProbabilitySnapshot> snapshots;
    std::vector<Moments> moments;  // parallel to snapshots

    const ProbabilitySnapshot& back() const { return snapshots.back(); }
};

/// Default step min(1e-3, 0.05/Δ).
double default_step(const RateModel& m);

/// Largest step accepted by integrate() on the given window:
/// 0.1 / (2·max_i(λ̄_i + μ̄_i)).
double max_stable_step(const RateModel& m, Window window);

/// Integrates the forward equations of the process restricted to `window`
/// (λ at the upper edge and μ at the lower edge forced to zero) from
/// p0.time to t_end with classical fixed-step RK4.
///
/// Snapshots are emitted at p0.time, p0.time + output_every, ... and at
/// t_end. Each output interval is split into ceil(len/dt) equal steps.
/// Throws StepTooLarge, MassDrift or NegativeProbability.
Trajectory integrate(const RateModel& m, Window window, const ProbabilitySnapshot& p0,
                     double t_end, double dt, double output_every);

struct LimitingCycle {
    Trajectory period;        // one period, start and end snapshots included
    double distance = 0.0;    // ‖p(t + T) - p(t)‖₁ at acceptance
    int periods_integrated = 0;
};

struct CycleOptions {
    double t_hint = 0.0;
    double dt = 0.0;                  // 0 -> default_step
    int outputs_per_period = 100;
    int max_periods = 1000;
};

/// Integrates to t_hint, then period by period until ‖p(t+T) - p(t)‖₁ < tol.
/// Throws NoConvergence when max_periods is exhausted.
LimitingCycle limiting_cycle(const RateModel& m, Window window, const ProbabilitySnapshot& p0,
                             double period, double tol, const CycleOptions& opts = {});

}  // namespace bdpz
