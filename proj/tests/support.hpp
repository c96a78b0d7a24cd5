#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>

#include "accrestart/data_io.hpp"
#include "accrestart/problems.hpp"

namespace accrestart::testing {

inline double rel_diff(double a, double b)
{
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double rel_diff(const Vector& a, const Vector& b)
{
    const double scale = std::max({1.0, a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()});
    return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

/// Seeded Lasso instance with the default weight ||A^T b||_inf / 10.
inline CompositeProblem random_lasso(Index n, Index m, std::uint64_t seed, double l2 = 0.0, double density = 1.0,
                                     double cond_hint = 1.0)
{
    auto inst = synth_lasso(n, m, density, cond_hint, seed);
    const double lambda = default_lasso_weight(inst.design);
    return lasso_problem(std::move(inst.design), lambda, l2);
}

} // namespace accrestart::testing
