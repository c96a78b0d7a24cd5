#pragma once

// Slow reference implementations. They allocate freely and follow the
// defining formulas literally; the test suite checks the fast paths against them.

#include <span>
#include <vector>

#include "accrestart/problems.hpp"
#include "accrestart/types.hpp"

namespace accrestart::oracle {

/// Triangular table of the convex weights expressing x_k as sum_i gamma_k^i z_i.
struct GammaTable {
    std::vector<std::vector<double>> rows; // rows[k] = (gamma_k^0, ..., gamma_k^k)
    std::vector<double> theta_path;        // theta_0 .. theta_{k_max}
    double ratio = 1.0;                    // n / tau

    double gamma(Index k, Index i) const { return rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]; }
    Index k_max() const { return static_cast<Index>(rows.size()) - 1; }
    /// 1/theta_{i-1}^2 with 1/theta_{-1}^2 = (1 - theta_0)/theta_0^2.
    double inv_sq_prev(Index i) const;
};

constexpr Index kMaxGammaRows = 5000;

GammaTable gamma_table(double theta0, double ratio, Index k_max);

/// Normalized weights of x_0..x_k in the history-weighted restart center.
std::vector<double> center_weights(const GammaTable& table, Index k);

/// The literal normalized sum over history[0..k], k = history.size() - 1.
Vector naive_center(std::span<const Vector> history, const GammaTable& table);

/// Central differences of the smooth part f (psi is ignored).
Vector fd_gradient(const CompositeProblem& problem, const Vector& x, double step);

} // namespace accrestart::oracle
