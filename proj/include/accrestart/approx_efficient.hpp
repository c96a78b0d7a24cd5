#pragma once

#include "accrestart/problems.hpp"
#include "accrestart/sampling.hpp"
#include "accrestart/state.hpp"
#include "accrestart/types.hpp"

namespace accrestart {

/// Fresh state at x0 with theta_0 = tau / n and w = g = h = 0.
EfficientState make_efficient_state(const CompositeProblem& problem, const Vector& x0, Index tau);

/// One sparse-update iteration. Only the sampled coordinates of z, w, g, h
/// change; the A z and A w caches are patched column by column.
void efficient_step(const CompositeProblem& problem, EfficientState& state, Sampling& sampling);

/// z + theta_last^2 w.
Vector materialize_x(const EfficientState& state);

/// sum_j alpha_j x_j over the current period, from the aggregates: a z + b w - g - h.
Vector weighted_history_sum(const EfficientState& state);

/// sigma x + (1 - sigma) x_ring evaluated in closed form from the aggregates.
Vector efficient_restart_point(const EfficientState& state, double sigma);

/// F(x) using the cached predictors; O(m + n).
double efficient_objective(const CompositeProblem& problem, const EfficientState& state);

} // namespace accrestart
