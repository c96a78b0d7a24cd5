#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "accrestart/oracle.hpp"
#include "accrestart/problems.hpp"
#include "accrestart/state.hpp"
#include "accrestart/types.hpp"

namespace accrestart {

struct NoRestart {};

/// Restart at x once the iteration count guarantees gap contraction by alpha
/// under the growth estimate mu.
struct ConditionalAtX {
    double mu = 0.0;
    double alpha = std::exp(-2.0);
};

/// Restart at z when F(z_k) <= F(x_k).
struct ConditionalAtZ {};

/// Every K iterations restart at (1 - sigma) x + sigma z. Full-gradient methods only.
struct FixedCombination {
    double sigma = 0.5;
    std::int64_t K = 1;
};

/// Every K iterations restart at sigma x + (1 - sigma) x_ring, x_ring the
/// history-weighted center of the period.
struct ApproxCombination {
    double sigma = 0.5;
    std::int64_t K = 1;
};

/// Restart at the current point whenever F(x_{k+1}) > F(x_k).
struct FunctionValueAdaptive {};

enum class AdaptiveTrigger { function_value, z_comparison };

/// Adaptive trigger honoured only for counters in [K_low, K_high); the restart
/// is forced at K_high. The restart point is the combination point of the
/// solver (two-point for FISTA/APG, history-weighted for APPROX).
struct IntervalAdaptive {
    std::int64_t K_low = 1;
    std::int64_t K_high = 1;
    AdaptiveTrigger inner = AdaptiveTrigger::function_value;
    double sigma = 0.5;
};

using RestartPolicy = std::variant<NoRestart, ConditionalAtX, ConditionalAtZ, FixedCombination, ApproxCombination,
                                   FunctionValueAdaptive, IntervalAdaptive>;

/// Throws ConfigError on out-of-range parameters or a policy the solver does not support.
void validate(const RestartPolicy& policy, SolverKind solver);
std::string describe(const RestartPolicy& policy);

/// Policy defaults derived from a growth estimate mu.
FixedCombination fixed_combination_from_mu(double mu);
ApproxCombination approx_combination_from_mu(double mu, double theta0, double ratio);

bool needs_objective(const RestartPolicy& policy);
bool needs_z_objective(const RestartPolicy& policy);
bool needs_history_center(const RestartPolicy& policy, SolverKind solver);

/// Quantities available to the trigger after step k produced x_{k+1}.
struct RestartContext {
    std::int64_t period_counter = 0; // iterations since the last restart, >= 1
    double theta0 = 1.0;
    std::optional<double> F_x;       // F(x_{k+1})
    std::optional<double> F_x_prev;  // F(x_k)
    std::optional<double> F_z;       // F(z_{k+1})
};

bool should_restart(const RestartPolicy& policy, SolverKind solver, const RestartContext& ctx);

enum class RestartPointKind { current_x, current_z, two_point, history_weighted };
RestartPointKind restart_point_kind(const RestartPolicy& policy, SolverKind solver);
/// sigma of the combination policies, 1 otherwise.
double restart_sigma(const RestartPolicy& policy);
/// Period of the periodic policies (K or K_high), nullopt otherwise.
std::optional<std::int64_t> restart_period(const RestartPolicy& policy);

/// (1 - sigma) x + sigma z.
template <class DerivedX, class DerivedZ>
Vector restart_point_full(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedZ>& z, double sigma)
{
    if (x.size() != z.size()) throw ConfigError("restart_point_full: length mismatch");
    if (!(sigma >= 0.0 && sigma <= 1.0)) throw ConfigError("restart_point_full: sigma must lie in [0, 1]");
    return (1.0 - sigma) * x + sigma * z;
}

/// sigma x_k + (1 - sigma) x_ring_k from the explicit iterate history and gamma table.
Vector restart_point_approx_naive(std::span<const Vector> history, const oracle::GammaTable& table, double sigma);

/// Running form of the history-weighted center for full-vector iterations:
/// keeps sum_i alpha_i x_i and a = sum_i alpha_i instead of the history.
class RestartCenter {
public:
    RestartCenter(double theta0, double ratio);

    void reset();
    /// Record x_k right before the step that uses theta_k.
    void observe(const Vector& x_k, double theta_k);
    /// x_ring_{k+1} given the iterate produced by that step.
    Vector center(const Vector& x_next) const;
    Vector point(const Vector& x_next, double sigma) const;

    double a() const { return a_; }

private:
    double theta0_;
    double ratio_;
    double r_ = 0.0;
    double a_ = 0.0;
    double last_theta_ = 0.0;
    Vector weighted_sum_;
};

/// x = z = point, theta = theta_0, period counter zeroed.
void apply_restart(IterateState& state, const Vector& point);
/// z = point, w = g = h = 0, a = b = r = 0, theta = theta_0; refreshes the A z cache.
void apply_restart(EfficientState& state, const Vector& point, const CompositeProblem& problem);

} // namespace accrestart
