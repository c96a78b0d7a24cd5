#include "accrestart/restart.hpp"

#include <sstream>

#include "accrestart/schedule.hpp"

namespace accrestart {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_sigma(double sigma)
{
    if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("restart policy: sigma must lie in (0, 1)");
}

void check_period(std::int64_t K)
{
    if (K < 1) throw ConfigError("restart policy: K must be >= 1");
}

bool full_gradient(SolverKind solver)
{
    return solver == SolverKind::fista || solver == SolverKind::apg;
}

} // namespace

IterateState make_iterate_state(const Vector& x0, double theta0)
{
    if (!(theta0 > 0.0 && theta0 <= 1.0)) throw ConfigError("theta0 must lie in (0, 1]");
    if (!x0.allFinite()) throw ConfigError("initial point has non-finite entries");
    IterateState s;
    s.x = x0;
    s.z = x0;
    s.theta = theta0;
    s.theta0 = theta0;
    return s;
}

void validate(const RestartPolicy& policy, SolverKind solver)
{
    if (solver == SolverKind::ista && !std::holds_alternative<NoRestart>(policy)) {
        if (std::holds_alternative<ConditionalAtZ>(policy))
            throw ConfigError("restart at z requires a z iterate; ista has none");
        throw ConfigError("ista has no momentum to restart; use --restart none");
    }
    std::visit(overloaded{
                   [](const NoRestart&) {},
                   [](const ConditionalAtX& p) {
                       if (!(p.mu > 0.0)) throw ConfigError("restart at x: mu must be positive");
                       if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw ConfigError("restart at x: alpha must lie in (0, 1]");
                   },
                   [&](const ConditionalAtZ&) {
                       if (!full_gradient(solver))
                           throw ConfigError("restart at z is only certified for fista and apg");
                   },
                   [&](const FixedCombination& p) {
                       check_sigma(p.sigma);
                       check_period(p.K);
                       if (!full_gradient(solver))
                           throw ConfigError("two-point combination restart is only certified for fista and apg; "
                                             "use the history-weighted combination for approx");
                   },
                   [](const ApproxCombination& p) {
                       check_sigma(p.sigma);
                       check_period(p.K);
                   },
                   [](const FunctionValueAdaptive&) {},
                   [&](const IntervalAdaptive& p) {
                       check_sigma(p.sigma);
                       check_period(p.K_low);
                       if (p.K_low > p.K_high) throw ConfigError("interval restart: K_low must not exceed K_high");
                       if (p.inner == AdaptiveTrigger::z_comparison && !full_gradient(solver))
                           throw ConfigError("interval restart: the z comparison trigger needs fista or apg");
                   },
               },
               policy);
}

std::string describe(const RestartPolicy& policy)
{
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const NoRestart&) { os << "none"; },
                   [&](const ConditionalAtX& p) { os << "at-x(mu=" << p.mu << ",alpha=" << p.alpha << ")"; },
                   [&](const ConditionalAtZ&) { os << "at-z"; },
                   [&](const FixedCombination& p) { os << "combo(sigma=" << p.sigma << ",K=" << p.K << ")"; },
                   [&](const ApproxCombination& p) { os << "approx-combo(sigma=" << p.sigma << ",K=" << p.K << ")"; },
                   [&](const FunctionValueAdaptive&) { os << "adaptive"; },
                   [&](const IntervalAdaptive& p) {
                       os << "interval(K_low=" << p.K_low << ",K_high=" << p.K_high << ",inner="
                          << (p.inner == AdaptiveTrigger::function_value ? "adaptive" : "at-z") << ",sigma=" << p.sigma
                          << ")";
                   },
               },
               policy);
    return os.str();
}

FixedCombination fixed_combination_from_mu(double mu)
{
    FixedCombination p;
    p.K = choose_restart_period(mu, 1.0);
    p.sigma = choose_sigma_full_gradient(mu, p.K);
    return p;
}

ApproxCombination approx_combination_from_mu(double mu, double theta0, double ratio)
{
    const auto choice = choose_restart_parameters(mu, theta0, ratio);
    return ApproxCombination{choice.sigma, choice.K};
}

bool needs_objective(const RestartPolicy& policy)
{
    return std::holds_alternative<FunctionValueAdaptive>(policy) || std::holds_alternative<ConditionalAtZ>(policy) ||
           std::holds_alternative<IntervalAdaptive>(policy);
}

bool needs_z_objective(const RestartPolicy& policy)
{
    if (std::holds_alternative<ConditionalAtZ>(policy)) return true;
    if (const auto* p = std::get_if<IntervalAdaptive>(&policy)) return p->inner == AdaptiveTrigger::z_comparison;
    return false;
}

bool needs_history_center(const RestartPolicy& policy, SolverKind solver)
{
    return restart_point_kind(policy, solver) == RestartPointKind::history_weighted;
}

bool should_restart(const RestartPolicy& policy, SolverKind solver, const RestartContext& ctx)
{
    const auto value = [](const std::optional<double>& v, const char* what) {
        if (!v) throw ConfigError(std::string("should_restart: missing ") + what);
        return *v;
    };
    const auto z_trigger = [&] {
        // z_1 coincides with x_1 after a restart, so the comparison is vacuous at counter 1.
        return ctx.period_counter >= 2 && value(ctx.F_z, "F(z)") <= value(ctx.F_x, "F(x)");
    };
    const auto f_trigger = [&] { return value(ctx.F_x, "F(x)") > value(ctx.F_x_prev, "previous F(x)"); };

    return std::visit(
        overloaded{
            [](const NoRestart&) { return false; },
            [&](const ConditionalAtX& p) {
                return static_cast<double>(ctx.period_counter) >= conditional_restart_threshold(p.mu, p.alpha, ctx.theta0);
            },
            [&](const ConditionalAtZ&) {
                if (solver == SolverKind::ista) throw ConfigError("restart at z requires a z iterate");
                return z_trigger();
            },
            [&](const FixedCombination& p) { return ctx.period_counter > 0 && ctx.period_counter % p.K == 0; },
            [&](const ApproxCombination& p) { return ctx.period_counter > 0 && ctx.period_counter % p.K == 0; },
            [&](const FunctionValueAdaptive&) { return f_trigger(); },
            [&](const IntervalAdaptive& p) {
                if (ctx.period_counter >= p.K_high) return true;
                if (ctx.period_counter < p.K_low) return false;
                return p.inner == AdaptiveTrigger::function_value ? f_trigger() : z_trigger();
            },
        },
        policy);
}

RestartPointKind restart_point_kind(const RestartPolicy& policy, SolverKind solver)
{
    return std::visit(overloaded{
                          [](const NoRestart&) { return RestartPointKind::current_x; },
                          [](const ConditionalAtX&) { return RestartPointKind::current_x; },
                          [](const ConditionalAtZ&) { return RestartPointKind::current_z; },
                          [](const FixedCombination&) { return RestartPointKind::two_point; },
                          [](const ApproxCombination&) { return RestartPointKind::history_weighted; },
                          [](const FunctionValueAdaptive&) { return RestartPointKind::current_x; },
                          [&](const IntervalAdaptive&) {
                              return solver == SolverKind::approx ? RestartPointKind::history_weighted
                                                                  : RestartPointKind::two_point;
                          },
                      },
                      policy);
}

double restart_sigma(const RestartPolicy& policy)
{
    if (const auto* p = std::get_if<FixedCombination>(&policy)) return p->sigma;
    if (const auto* p = std::get_if<ApproxCombination>(&policy)) return p->sigma;
    if (const auto* p = std::get_if<IntervalAdaptive>(&policy)) return p->sigma;
    return 1.0;
}

std::optional<std::int64_t> restart_period(const RestartPolicy& policy)
{
    if (const auto* p = std::get_if<FixedCombination>(&policy)) return p->K;
    if (const auto* p = std::get_if<ApproxCombination>(&policy)) return p->K;
    if (const auto* p = std::get_if<IntervalAdaptive>(&policy)) return p->K_high;
    return std::nullopt;
}

Vector restart_point_approx_naive(std::span<const Vector> history, const oracle::GammaTable& table, double sigma)
{
    if (history.size() < 2) throw ConfigError("restart_point_approx_naive: needs at least one completed iteration");
    if (!(sigma >= 0.0 && sigma <= 1.0)) throw ConfigError("restart_point_approx_naive: sigma must lie in [0, 1]");
    const Vector center = oracle::naive_center(history, table);
    return sigma * history.back() + (1.0 - sigma) * center;
}

RestartCenter::RestartCenter(double theta0, double ratio) : theta0_(theta0), ratio_(ratio) {}

void RestartCenter::reset()
{
    r_ = 0.0;
    a_ = 0.0;
    last_theta_ = 0.0;
    weighted_sum_.resize(0);
}

void RestartCenter::observe(const Vector& x_k, double theta_k)
{
    if (weighted_sum_.size() == 0) weighted_sum_ = Vector::Zero(x_k.size());
    const double t2 = theta_k * theta_k;
    const double alpha = r_ * (1.0 - theta_k) / (t2 * t2);
    if (alpha != 0.0) weighted_sum_ += alpha * x_k;
    a_ += alpha;
    const double next = theta_next(theta_k);
    r_ = next * (1.0 - ratio_ * theta_k) + ratio_ * (theta_k - next);
    last_theta_ = theta_k;
}

Vector RestartCenter::center(const Vector& x_next) const
{
    if (last_theta_ == 0.0) throw ConfigError("RestartCenter: no iteration observed since the last reset");
    const double t2 = last_theta_ * last_theta_;
    const double tail = 1.0 / (theta0_ * last_theta_) - (1.0 - theta0_) / (theta0_ * theta0_);
    return (t2 * weighted_sum_ + tail * x_next) / (t2 * a_ + tail);
}

Vector RestartCenter::point(const Vector& x_next, double sigma) const
{
    return sigma * x_next + (1.0 - sigma) * center(x_next);
}

void apply_restart(IterateState& state, const Vector& point)
{
    if (!point.allFinite()) throw NumericError("apply_restart: non-finite restart point");
    state.x = point;
    state.z = point;
    state.theta = state.theta0;
    state.period_counter = 0;
}

void apply_restart(EfficientState& state, const Vector& point, const CompositeProblem& problem)
{
    if (!point.allFinite()) throw NumericError("apply_restart: non-finite restart point");
    state.z = point;
    state.w.setZero();
    state.g.setZero();
    state.h.setZero();
    state.az = problem.predictor(point);
    state.aw.setZero();
    state.a = 0.0;
    state.b = 0.0;
    state.r = 0.0;
    state.theta = state.theta0;
    state.theta_last = state.theta0;
    state.period_counter = 0;
}

} // namespace accrestart
