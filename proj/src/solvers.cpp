#include "accrestart/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "accrestart/approx_efficient.hpp"
#include "accrestart/oracle.hpp"
#include "accrestart/schedule.hpp"

namespace accrestart {

void prox_grad_step(const CompositeProblem& problem, IterateState& s)
{
    s.x = prox_full(problem.regularizer(), problem.gradient(s.x), s.x, problem.v());
    s.z = s.x;
    ++s.k;
    ++s.period_counter;
}

void fista_step(const CompositeProblem& problem, IterateState& s)
{
    const double th = s.theta;
    const Vector y = (1.0 - th) * s.x + th * s.z;
    Vector x_next = prox_full(problem.regularizer(), problem.gradient(y), y, problem.v());
    s.z += (x_next - y) / th;
    s.x = std::move(x_next);
    s.theta = theta_next(th);
    ++s.k;
    ++s.period_counter;
}

void apg_step(const CompositeProblem& problem, IterateState& s)
{
    const double th = s.theta;
    const Vector y = (1.0 - th) * s.x + th * s.z;
    Vector z_next = prox_full(problem.regularizer(), problem.gradient(y), s.z, th * problem.v());
    s.x = y + th * (z_next - s.z);
    s.z = std::move(z_next);
    s.theta = theta_next(th);
    ++s.k;
    ++s.period_counter;
}

void approx_step(const CompositeProblem& problem, IterateState& s, Sampling& sampling)
{
    const double ratio = static_cast<double>(sampling.n()) / static_cast<double>(sampling.tau());
    if (sampling.n() != problem.dimension()) throw ConfigError("approx_step: sampling dimension mismatch");
    if (std::abs(s.theta0 * ratio - 1.0) > 1e-12) throw ConfigError("approx_step: theta0 must equal tau / n");
    const double th = s.theta;
    const Vector y = (1.0 - th) * s.x + th * s.z;
    const Vector ay = problem.predictor(y);
    const auto coords = sampling.draw();
    std::vector<double> partial(coords.size());
    for (std::size_t c = 0; c < coords.size(); ++c) partial[c] = problem.partial_at_predictor(ay, coords[c]);

    Vector z_next = s.z;
    for (std::size_t c = 0; c < coords.size(); ++c) {
        const Index i = coords[c];
        z_next[i] = prox_coordinate(problem.regularizer(), i, partial[c], s.z[i], th * ratio * problem.v()[i]);
    }
    s.x = y + (ratio * th) * (z_next - s.z);
    s.z = std::move(z_next);
    s.theta = theta_next(th);
    ++s.k;
    ++s.period_counter;
}

double initial_theta(SolverKind solver, Index n, Index tau)
{
    if (solver != SolverKind::approx) return 1.0;
    if (tau < 1 || tau > n) throw ConfigError("tau must lie in [1, n]");
    return static_cast<double>(tau) / static_cast<double>(n);
}

CompositeProblem prepare_problem(const CompositeProblem& problem, SolverKind solver, Index tau)
{
    if (solver != SolverKind::approx) return problem.with_weights(full_gradient_weights(problem));
    if (tau < 1 || tau > problem.dimension()) throw ConfigError("tau must lie in [1, n]");
    if (tau == 1) return problem.with_weights(coordinate_weights(problem));
    return problem.with_weights(tau_nice_weights(problem, tau));
}

std::string to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::iteration_cap: return "iteration_cap";
    case StopReason::epoch_cap: return "epoch_cap";
    case StopReason::tolerance: return "tolerance";
    }
    return "unknown";
}

std::string to_string(SolverKind solver)
{
    switch (solver) {
    case SolverKind::ista: return "ista";
    case SolverKind::fista: return "fista";
    case SolverKind::apg: return "apg";
    case SolverKind::approx: return "approx";
    }
    return "unknown";
}

std::string to_string(Engine engine)
{
    return engine == Engine::efficient ? "efficient" : "naive";
}

namespace {

constexpr double kEfficientPeriodCap = 1e6;

// Full-vector iterations. History-weighted restart points come from the
// literal iterate history (naive engine) or the running accumulator.
class FullEngine {
public:
    FullEngine(const CompositeProblem& problem, SolverKind solver, const Vector& x0, double theta0, Index tau,
               std::uint64_t seed, bool history_weighted, bool literal_history, std::int64_t period)
        : problem_(problem), solver_(solver), state_(make_iterate_state(x0, theta0)), center_(theta0, 1.0 / theta0)
    {
        if (solver == SolverKind::approx) sampling_.emplace(problem.dimension(), tau, seed);
        if (history_weighted && literal_history) {
            table_ = oracle::gamma_table(theta0, 1.0 / theta0, period);
            history_.push_back(state_.x);
        }
        use_center_ = history_weighted && !literal_history;
    }

    void step()
    {
        if (use_center_) center_.observe(state_.x, state_.theta);
        switch (solver_) {
        case SolverKind::ista: prox_grad_step(problem_, state_); break;
        case SolverKind::fista: fista_step(problem_, state_); break;
        case SolverKind::apg: apg_step(problem_, state_); break;
        case SolverKind::approx: approx_step(problem_, state_, *sampling_); break;
        }
        if (table_) history_.push_back(state_.x);
    }

    Vector x() const { return state_.x; }
    Vector z() const { return state_.z; }
    double F() const { return problem_.objective(state_.x); }
    double F_z() const { return problem_.objective(state_.z); }
    std::int64_t counter() const { return state_.period_counter; }

    Vector history_point(double sigma) const
    {
        if (table_) return restart_point_approx_naive(history_, *table_, sigma);
        return center_.point(state_.x, sigma);
    }

    void restart(const Vector& point)
    {
        apply_restart(state_, point);
        center_.reset();
        if (table_) {
            history_.clear();
            history_.push_back(point);
        }
    }

private:
    const CompositeProblem& problem_;
    SolverKind solver_;
    IterateState state_;
    std::optional<Sampling> sampling_;
    RestartCenter center_;
    bool use_center_ = false;
    std::optional<oracle::GammaTable> table_;
    std::vector<Vector> history_;
};

class EfficientEngine {
public:
    EfficientEngine(const CompositeProblem& problem, const Vector& x0, Index tau, std::uint64_t seed)
        : problem_(problem), state_(make_efficient_state(problem, x0, tau)), sampling_(problem.dimension(), tau, seed)
    {
    }

    void step() { efficient_step(problem_, state_, sampling_); }
    Vector x() const { return materialize_x(state_); }
    Vector z() const { return state_.z; }
    double F() const { return efficient_objective(problem_, state_); }
    double F_z() const { return problem_.objective(state_.z); }
    std::int64_t counter() const { return state_.period_counter; }
    Vector history_point(double sigma) const { return efficient_restart_point(state_, sigma); }
    void restart(const Vector& point) { apply_restart(state_, point, problem_); }

private:
    const CompositeProblem& problem_;
    EfficientState state_;
    Sampling sampling_;
};

RestartPolicy cap_period(RestartPolicy policy, double theta0, std::vector<std::string>& diagnostics)
{
    const auto cap = static_cast<std::int64_t>(kEfficientPeriodCap / theta0);
    const auto note = [&](std::int64_t K) {
        diagnostics.push_back("restart period " + std::to_string(K) + " capped at " + std::to_string(cap) +
                              " to keep the aggregate coefficients well scaled");
    };
    if (auto* p = std::get_if<ApproxCombination>(&policy); p && p->K > cap) {
        note(p->K);
        p->K = cap;
    }
    if (auto* p = std::get_if<IntervalAdaptive>(&policy); p && p->K_high > cap) {
        note(p->K_high);
        p->K_high = cap;
        p->K_low = std::min(p->K_low, cap);
    }
    return policy;
}

struct Budget {
    std::int64_t iterations = 0;
    StopReason reason = StopReason::iteration_cap;
};

template <class EngineT>
void drive(EngineT& engine, const CompositeProblem& problem, const RunOptions& opt, const RestartPolicy& policy,
           double theta0, const Budget& budget, std::int64_t record_every, double epoch_per_iter, RunTrace& trace)
{
    const auto& ref = problem.reference();
    const bool any_restart = !std::holds_alternative<NoRestart>(policy);
    const bool need_F = needs_objective(policy);
    const bool need_Fz = needs_z_objective(policy);
    const RestartPointKind kind = restart_point_kind(policy, opt.solver);
    const double sigma = restart_sigma(policy);

    const auto checked = [](double F, std::int64_t it) {
        if (!std::isfinite(F))
            throw NumericError("objective became non-finite at iteration " + std::to_string(it));
        return F;
    };
    const auto record = [&](std::int64_t it, double F, bool restarted) {
        TraceRecord r;
        r.iter = it;
        r.epoch = static_cast<double>(it) * epoch_per_iter;
        r.F = F;
        r.restart = restarted;
        if (ref) {
            r.gap = F - ref->F;
            r.dist_v = std::sqrt(weighted_norm_sq(engine.x() - ref->x, problem.v()));
        }
        trace.records.push_back(r);
        return r;
    };
    const auto reached = [&](const TraceRecord& r) { return opt.gap_tolerance && r.gap && *r.gap <= *opt.gap_tolerance; };

    double F_cur = checked(engine.F(), 0);
    if (reached(record(0, F_cur, false))) {
        trace.iterations_to_tolerance = 0;
        trace.stop = StopReason::tolerance;
        return;
    }

    for (std::int64_t it = 1; it <= budget.iterations; ++it) {
        engine.step();
        trace.iterations = it;
        const bool due = it % record_every == 0 || it == budget.iterations;
        std::optional<double> F_new;
        if (need_F || due) F_new = checked(engine.F(), it);

        bool restarted = false;
        if (any_restart) {
            RestartContext ctx;
            ctx.period_counter = engine.counter();
            ctx.theta0 = theta0;
            if (need_F) {
                ctx.F_x = F_new;
                ctx.F_x_prev = F_cur;
            }
            if (need_Fz) ctx.F_z = checked(engine.F_z(), it);
            if (should_restart(policy, opt.solver, ctx)) {
                Vector point;
                switch (kind) {
                case RestartPointKind::current_x: point = engine.x(); break;
                case RestartPointKind::current_z: point = engine.z(); break;
                case RestartPointKind::two_point: point = restart_point_full(engine.x(), engine.z(), sigma); break;
                case RestartPointKind::history_weighted: point = engine.history_point(sigma); break;
                }
                engine.restart(point);
                if (opt.keep_restart_points) trace.restart_points.push_back(point);
                ++trace.restarts;
                restarted = true;
                if (F_new) F_new = checked(engine.F(), it);
            }
        }
        if (F_new) F_cur = *F_new;

        if (due || restarted) {
            if (!F_new) F_cur = checked(engine.F(), it);
            if (reached(record(it, F_cur, restarted))) {
                trace.iterations_to_tolerance = it;
                trace.stop = StopReason::tolerance;
                return;
            }
        }
    }
    trace.stop = budget.reason;
}

} // namespace

RunTrace run(const CompositeProblem& problem, const RunOptions& opt)
{
    const Index n = problem.dimension();
    validate(opt.policy, opt.solver);
    if (opt.max_iterations < 0) throw ConfigError("max_iterations must be nonnegative");
    if (opt.max_epochs && !(*opt.max_epochs >= 0.0)) throw ConfigError("max_epochs must be nonnegative");
    if (opt.record_every < 0) throw ConfigError("record_every must be nonnegative");
    if (opt.gap_tolerance && !problem.reference())
        throw ConfigError("a gap-based stop needs a reference solution");
    const Index tau = opt.solver == SolverKind::approx ? opt.tau : n;
    const double theta0 = initial_theta(opt.solver, n, tau);
    const Vector x0 = opt.x0 ? *opt.x0 : Vector::Zero(n);
    if (x0.size() != n) throw ConfigError("x0 has the wrong length");

    RunTrace trace;
    trace.solver = opt.solver;
    trace.seed = opt.seed;

    const bool efficient = opt.solver == SolverKind::approx && opt.engine == Engine::efficient;
    const RestartPolicy policy = efficient ? cap_period(opt.policy, theta0, trace.diagnostics) : opt.policy;
    trace.policy = describe(policy);

    const double epoch_per_iter = static_cast<double>(tau) / static_cast<double>(n);
    Budget budget{opt.max_iterations, StopReason::iteration_cap};
    if (opt.max_epochs) {
        const double cap = std::ceil(*opt.max_epochs / epoch_per_iter - 1e-9);
        if (cap < static_cast<double>(budget.iterations)) budget = {static_cast<std::int64_t>(cap), StopReason::epoch_cap};
    }
    std::int64_t record_every = opt.record_every;
    if (record_every == 0) record_every = opt.solver == SolverKind::approx ? (n + tau - 1) / tau : 1;

    if (efficient) {
        EfficientEngine engine(problem, x0, tau, opt.seed);
        drive(engine, problem, opt, policy, theta0, budget, record_every, epoch_per_iter, trace);
        trace.final_x = engine.x();
    } else {
        const bool history_weighted = needs_history_center(policy, opt.solver);
        const std::int64_t period = restart_period(policy).value_or(0);
        bool literal = opt.engine == Engine::naive && history_weighted;
        if (literal && period > oracle::kMaxGammaRows) {
            trace.diagnostics.push_back("restart period exceeds the literal history limit; using the running center");
            literal = false;
        }
        FullEngine engine(problem, opt.solver, x0, theta0, tau, opt.seed, history_weighted, literal, period);
        drive(engine, problem, opt, policy, theta0, budget, record_every, epoch_per_iter, trace);
        trace.final_x = engine.x();
    }
    return trace;
}

ReferenceSolution compute_reference(const CompositeProblem& problem, const ReferenceOptions& options)
{
    const CompositeProblem P = prepare_problem(problem, SolverKind::fista, 1);
    const Index n = P.dimension();
    IterateState s = make_iterate_state(Vector::Zero(n), 1.0);
    double F_prev = P.objective(s.x);

    const auto residual = [&](const Vector& x) {
        const Vector T = prox_full(P.regularizer(), P.gradient(x), x, P.v());
        return (x - T).lpNorm<Eigen::Infinity>() / std::max(1.0, x.lpNorm<Eigen::Infinity>());
    };

    // F stalls at rounding level long before x does, so progress is judged
    // on the fixed-point residual of the prox-gradient map.
    Vector best = s.x;
    double best_res = residual(s.x);
    std::int64_t since_best = 0;
    for (std::int64_t it = 0; it < options.max_iterations && best_res > 1e-16; ++it) {
        fista_step(P, s);
        const double F = P.objective(s.x);
        if (!std::isfinite(F)) throw NumericError("compute_reference: objective became non-finite");
        if (F > F_prev) apply_restart(s, s.x);
        F_prev = F;
        const double res = residual(s.x);
        if (res < best_res) {
            best_res = res;
            best = s.x;
            since_best = 0;
        } else if (++since_best > 500) {
            break;
        }
    }

    IterateState polish = make_iterate_state(best, 1.0);
    for (std::int64_t it = 0; it < options.polish_iterations; ++it) {
        prox_grad_step(P, polish);
        const double res = residual(polish.x);
        if (!(res < best_res)) {
            if (++since_best > 50) break;
            continue;
        }
        since_best = 0;
        best_res = res;
        best = polish.x;
    }
    const double best_F = P.objective(best);
    return ReferenceSolution{best, best_F};
}

} // namespace accrestart
