#pragma once

#include <cstdint>

#include "accrestart/types.hpp"

namespace accrestart {

/// (x, z, theta) of the full-vector iterations: ISTA, FISTA, APG and the
/// literal APPROX reference.
struct IterateState {
    Vector x;
    Vector z;
    double theta = 1.0;  // theta_k used by the next step
    double theta0 = 1.0;
    std::int64_t k = 0;              // iterations since start
    std::int64_t period_counter = 0; // iterations since the last restart
};

IterateState make_iterate_state(const Vector& x0, double theta0);

/// Sparse-update APPROX state. x is never stored: x = z + theta_last^2 w.
/// g, h, a, b, r are the cumulative sums that give the history-weighted
/// restart center in closed form.
struct EfficientState {
    Vector z;
    Vector w;
    Vector g;
    Vector h;
    Vector az; // A z
    Vector aw; // A w
    double a = 0.0;
    double b = 0.0;
    double r = 0.0;
    double theta = 1.0;      // theta_k used by the next step
    double theta_last = 1.0; // theta used by the previous step
    double theta0 = 1.0;
    double ratio = 1.0;      // n / tau
    std::int64_t k = 0;
    std::int64_t period_counter = 0;
};

} // namespace accrestart
