#pragma once

// Scalar recursions shared by the accelerated methods and the closed-form
// parameter / rate formulas used to configure restarts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "accrestart/types.hpp"

namespace accrestart {

namespace detail {

inline void require(bool ok, const char* what)
{
    if (!ok) throw ConfigError(what);
}

} // namespace detail

/// Next momentum coefficient: the positive root of X^2 + theta^2 X - theta^2.
/// Evaluated as 2 theta^2 / (sqrt(theta^4 + 4 theta^2) + theta^2), which has
/// no cancellation when theta is small.
template <class Scalar>
Scalar theta_next(Scalar theta)
{
    detail::require(theta > Scalar(0) && theta <= Scalar(1),
                    "theta_next: theta must lie in (0, 1]");
    const Scalar t2 = theta * theta;
    using std::sqrt;
    return Scalar(2) * t2 / (sqrt(t2 * t2 + Scalar(4) * t2) + t2);
}

/// Append-only momentum sequence theta_0, theta_1, ...
template <class Scalar = double>
class ThetaSequence {
public:
    explicit ThetaSequence(Scalar theta0)
    {
        detail::require(theta0 > Scalar(0) && theta0 <= Scalar(1),
                        "ThetaSequence: theta0 must lie in (0, 1]");
        values_.push_back(theta0);
    }

    Scalar theta0() const { return values_.front(); }

    /// theta_k, extending the stored prefix as needed.
    Scalar operator()(std::int64_t k)
    {
        extend_to(k);
        return values_[static_cast<std::size_t>(k)];
    }

    void extend_to(std::int64_t k)
    {
        while (static_cast<std::int64_t>(values_.size()) <= k)
            values_.push_back(theta_next(values_.back()));
    }

    /// 1 / theta_{k-1}^2 with the convention 1/theta_{-1}^2 = (1-theta_0)/theta_0^2.
    Scalar inv_sq_prev(std::int64_t k)
    {
        if (k == 0) {
            const Scalar t0 = theta0();
            return (Scalar(1) - t0) / (t0 * t0);
        }
        const Scalar t = (*this)(k - 1);
        return Scalar(1) / (t * t);
    }

    const std::vector<Scalar>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<Scalar> values_;
};

/// xi_{k+1} = (1 - theta_k) xi_k + (1 + (ratio - 1) theta_k) / theta_k.
template <class Scalar>
Scalar xi_next(Scalar xi, Scalar theta_k, Scalar ratio)
{
    detail::require(theta_k > Scalar(0) && theta_k <= Scalar(1),
                    "xi_next: theta_k must lie in (0, 1]");
    detail::require(xi >= Scalar(0), "xi_next: xi must be nonnegative");
    detail::require(ratio >= Scalar(1), "xi_next: ratio n/tau must be >= 1");
    return (Scalar(1) - theta_k) * xi + (Scalar(1) + (ratio - Scalar(1)) * theta_k) / theta_k;
}

/// Running value of xi_k = sum_i gamma_k^i / theta_{i-1}^2, without the
/// gamma table. Starts at k = 1 with xi_1 = 1 / theta_0^2.
template <class Scalar = double>
class XiAggregate {
public:
    XiAggregate(Scalar theta0, Scalar ratio)
        : ratio_(ratio), theta_(theta_next(theta0)), xi_(Scalar(1) / (theta0 * theta0))
    {
        detail::require(ratio >= Scalar(1), "XiAggregate: ratio n/tau must be >= 1");
    }

    std::int64_t k() const { return k_; }
    Scalar xi() const { return xi_; }
    Scalar ratio() const { return ratio_; }
    /// theta_k for the current k.
    Scalar theta() const { return theta_; }

    void advance()
    {
        xi_ = xi_next(xi_, theta_, ratio_);
        theta_ = theta_next(theta_);
        ++k_;
    }

    void advance_to(std::int64_t k)
    {
        while (k_ < k) advance();
    }

private:
    Scalar ratio_;
    Scalar theta_;
    Scalar xi_;
    std::int64_t k_ = 1;
};

template <class Scalar>
Scalar xi_at(std::int64_t k, Scalar theta0, Scalar ratio)
{
    detail::require(k >= 1, "xi_at: k must be >= 1");
    XiAggregate<Scalar> agg(theta0, ratio);
    agg.advance_to(k);
    return agg.xi();
}

/// m_k(mu) = mu theta_0^2 / (1 + mu (1 - theta_0)) * (xi_k - (1 - theta_0) / theta_0^2).
template <class Scalar>
Scalar m_k(Scalar mu, Scalar xi_k, Scalar theta0)
{
    detail::require(mu > Scalar(0), "m_k: mu must be positive");
    const Scalar floor = (Scalar(1) - theta0) / (theta0 * theta0);
    detail::require(xi_k >= floor * (Scalar(1) - Scalar(1e-12)),
                    "m_k: xi_k below (1 - theta0) / theta0^2");
    return mu * theta0 * theta0 / (Scalar(1) + mu * (Scalar(1) - theta0)) * std::max(Scalar(0), xi_k - floor);
}

/// Two published forms of the restart period. The main-text form carries an
/// extra "+1" inside the ceiling; the appendix form with general lambda omits it.
enum class PeriodRule { main_text, appendix };

template <class Scalar>
Scalar default_tradeoff_lambda(Scalar mu)
{
    return Scalar(1) + mu;
}

template <class Scalar>
std::int64_t choose_restart_period(Scalar mu, Scalar theta0, Scalar tradeoff_lambda,
                                   PeriodRule rule = PeriodRule::main_text)
{
    detail::require(mu > Scalar(0) && mu <= Scalar(1), "choose_restart_period: mu must lie in (0, 1]");
    detail::require(theta0 > Scalar(0) && theta0 <= Scalar(1),
                    "choose_restart_period: theta0 must lie in (0, 1]");
    detail::require(tradeoff_lambda >= mu, "choose_restart_period: lambda must be >= mu");
    using std::ceil;
    using std::sqrt;
    Scalar raw = Scalar(2) * sqrt(Scalar(3)) / theta0 * sqrt(tradeoff_lambda / mu) - Scalar(2) / theta0;
    if (rule == PeriodRule::main_text) raw += Scalar(1);
    const Scalar k = ceil(raw);
    if (!(k < Scalar(std::numeric_limits<std::int64_t>::max() / 2)))
        throw NumericError("choose_restart_period: period overflows");
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(k));
}

template <class Scalar>
std::int64_t choose_restart_period(Scalar mu, Scalar theta0)
{
    return choose_restart_period(mu, theta0, default_tradeoff_lambda(mu), PeriodRule::main_text);
}

/// sigma = 1 / (1 + m_K(mu)), with xi_K obtained from the scalar recursion.
template <class Scalar>
Scalar choose_sigma(Scalar mu, std::int64_t K, Scalar theta0, Scalar ratio)
{
    detail::require(K >= 1, "choose_sigma: K must be >= 1");
    return Scalar(1) / (Scalar(1) + m_k(mu, xi_at(K, theta0, ratio), theta0));
}

/// Balancing sigma for the two-point restart of the full-gradient methods:
/// equalises both branches of max(sigma, 1 - sigma mu / theta_{K-1}^2).
template <class Scalar>
Scalar choose_sigma_full_gradient(Scalar mu, std::int64_t K)
{
    detail::require(mu > Scalar(0), "choose_sigma_full_gradient: mu must be positive");
    detail::require(K >= 1, "choose_sigma_full_gradient: K must be >= 1");
    ThetaSequence<Scalar> thetas(Scalar(1));
    const Scalar t = thetas(K - 1);
    return Scalar(1) / (Scalar(1) + mu / (t * t));
}

template <class Scalar>
Scalar contraction_factor(Scalar sigma, Scalar m_K_at_muF)
{
    detail::require(sigma > Scalar(0) && sigma <= Scalar(1), "contraction_factor: sigma must lie in (0, 1]");
    detail::require(m_K_at_muF >= Scalar(0), "contraction_factor: m_K must be nonnegative");
    return std::max(sigma, Scalar(1) - sigma * m_K_at_muF);
}

template <class Scalar = double>
struct RestartParameterChoice {
    Scalar mu;
    Scalar tradeoff_lambda;
    std::int64_t K;
    Scalar sigma;
    Scalar m_K;
    Scalar xi_K;
};

template <class Scalar>
RestartParameterChoice<Scalar> choose_restart_parameters(Scalar mu, Scalar theta0, Scalar ratio,
                                                         Scalar tradeoff_lambda,
                                                         PeriodRule rule = PeriodRule::main_text)
{
    RestartParameterChoice<Scalar> c{};
    c.mu = mu;
    c.tradeoff_lambda = tradeoff_lambda;
    c.K = choose_restart_period(mu, theta0, tradeoff_lambda, rule);
    c.xi_K = xi_at(c.K, theta0, ratio);
    c.m_K = m_k(mu, c.xi_K, theta0);
    c.sigma = Scalar(1) / (Scalar(1) + c.m_K);
    return c;
}

template <class Scalar>
RestartParameterChoice<Scalar> choose_restart_parameters(Scalar mu, Scalar theta0, Scalar ratio)
{
    return choose_restart_parameters(mu, theta0, ratio, default_tradeoff_lambda(mu), PeriodRule::main_text);
}

/// Exact per-iteration factor max(sigma, 1 - sigma m_K(mu_F))^(1/K) for a
/// given (K, sigma).
template <class Scalar>
Scalar restarted_rate(std::int64_t K, Scalar sigma, Scalar mu_F, Scalar theta0, Scalar ratio)
{
    const Scalar mK = mu_F > Scalar(0) ? m_k(mu_F, xi_at(K, theta0, ratio), theta0) : Scalar(0);
    using std::pow;
    return pow(contraction_factor(sigma, mK), Scalar(1) / Scalar(K));
}

/// Simplified per-iteration bound
/// (1 - min(mu_F/mu, 1) (lambda - mu(1-theta_0)) / (lambda + 1))^(theta_0 sqrt(mu) / (2 sqrt(3) sqrt(lambda))).
template <class Scalar>
Scalar rate_bound(Scalar mu, Scalar mu_F, Scalar theta0, Scalar tradeoff_lambda)
{
    detail::require(mu > Scalar(0) && mu <= Scalar(1), "rate_bound: mu must lie in (0, 1]");
    detail::require(mu_F > Scalar(0), "rate_bound: mu_F must be positive");
    detail::require(tradeoff_lambda >= mu, "rate_bound: lambda must be >= mu");
    using std::pow;
    using std::sqrt;
    const Scalar base = Scalar(1) - std::min(mu_F / mu, Scalar(1)) * (tradeoff_lambda - mu * (Scalar(1) - theta0)) /
                                        (tradeoff_lambda + Scalar(1));
    const Scalar expo = theta0 * sqrt(mu) / (Scalar(2) * sqrt(Scalar(3)) * sqrt(tradeoff_lambda));
    return pow(base, expo);
}

template <class Scalar>
Scalar rate_bound(Scalar mu, Scalar mu_F, Scalar theta0)
{
    return rate_bound(mu, mu_F, theta0, default_tradeoff_lambda(mu));
}

/// Per-iteration factor of plain (serial or tau-nice) coordinate descent, 1 - theta_0 mu_F.
template <class Scalar>
Scalar coordinate_descent_rate(Scalar mu_F, Scalar theta0)
{
    return Scalar(1) - theta0 * mu_F;
}

/// Iteration count after which (1-theta_0)(F-F*) + 0.5||x-x*||_v^2 <= eps is
/// guaranteed for the (K, sigma) choice of choose_restart_parameters.
template <class Scalar>
Scalar iteration_complexity(Scalar mu, Scalar mu_F, Scalar theta0, Scalar eps, Scalar D0)
{
    detail::require(eps > Scalar(0), "iteration_complexity: eps must be positive");
    detail::require(D0 > Scalar(0), "iteration_complexity: D0 must be positive");
    detail::require(mu > Scalar(0) && mu <= Scalar(1), "iteration_complexity: mu must lie in (0, 1]");
    detail::require(mu_F > Scalar(0), "iteration_complexity: mu_F must be positive");
    using std::log;
    using std::sqrt;
    const Scalar worst = std::max(Scalar(1) / sqrt(mu), sqrt(mu) / mu_F);
    return (Scalar(1) / theta0) *
           (Scalar(6) * sqrt(Scalar(6)) * worst * log(D0 / eps) + Scalar(2) * sqrt(Scalar(3)) * sqrt(Scalar(1) + Scalar(1) / mu));
}

/// Smallest k at which restart-at-x is guaranteed to shrink the gap by alpha:
/// (2/theta_0)(sqrt((1+mu)/(alpha mu)) - 1) + 1.
template <class Scalar>
Scalar conditional_restart_threshold(Scalar mu, Scalar alpha, Scalar theta0)
{
    detail::require(mu > Scalar(0), "conditional_restart_threshold: mu must be positive");
    detail::require(alpha > Scalar(0) && alpha <= Scalar(1),
                    "conditional_restart_threshold: alpha must lie in (0, 1]");
    using std::sqrt;
    return (Scalar(2) / theta0) * (sqrt((Scalar(1) + mu) / (alpha * mu)) - Scalar(1)) + Scalar(1);
}

/// Iterations after which a periodic restart with per-period factor rho is
/// guaranteed to bring a Lyapunov value delta0 below eps: K (ceil(log(delta0/eps)/log(1/rho)) + 1).
template <class Scalar>
std::int64_t restarted_iteration_bound(Scalar rho_per_period, std::int64_t K, Scalar delta0, Scalar eps)
{
    detail::require(rho_per_period > Scalar(0) && rho_per_period < Scalar(1),
                    "restarted_iteration_bound: factor must lie in (0, 1)");
    using std::ceil;
    using std::log;
    const Scalar periods = delta0 <= eps ? Scalar(0) : ceil(log(delta0 / eps) / -log(rho_per_period));
    return K * (static_cast<std::int64_t>(periods) + 1);
}

} // namespace accrestart
