#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "accrestart/problems.hpp"
#include "accrestart/restart.hpp"
#include "accrestart/sampling.hpp"
#include "accrestart/state.hpp"
#include "accrestart/types.hpp"

namespace accrestart {

// Single iterations on the full-vector state. Each advances theta, k and the
// period counter. ISTA keeps z equal to x.
void prox_grad_step(const CompositeProblem& problem, IterateState& state);
void fista_step(const CompositeProblem& problem, IterateState& state);
void apg_step(const CompositeProblem& problem, IterateState& state);
/// Literal coordinate iteration with a full-length y; theta_0 must equal tau / n.
void approx_step(const CompositeProblem& problem, IterateState& state, Sampling& sampling);

/// theta_0 of a solver: 1 for the full-gradient methods, tau / n for approx.
double initial_theta(SolverKind solver, Index n, Index tau);

/// Problem with the step weights each solver expects: L (1, ..., 1) for the
/// full-gradient methods, serial or tau-nice coordinate weights for approx.
CompositeProblem prepare_problem(const CompositeProblem& problem, SolverKind solver, Index tau);

struct RunOptions {
    SolverKind solver = SolverKind::fista;
    Engine engine = Engine::efficient;
    RestartPolicy policy = NoRestart{};
    Index tau = 1;
    std::uint64_t seed = 0;
    std::int64_t max_iterations = 1000;
    std::optional<double> max_epochs;
    std::optional<double> gap_tolerance; // needs a reference solution
    std::int64_t record_every = 0;       // 0: every iteration, every ceil(n/tau) for approx
    std::optional<Vector> x0;            // defaults to zero
    bool keep_restart_points = false;
};

struct TraceRecord {
    std::int64_t iter = 0;
    double epoch = 0.0;
    double F = 0.0;
    std::optional<double> gap;
    std::optional<double> dist_v; // ||x - x*||_v
    bool restart = false;
};

enum class StopReason { iteration_cap, epoch_cap, tolerance };
std::string to_string(StopReason reason);

struct RunTrace {
    std::vector<TraceRecord> records;
    Vector final_x;
    std::int64_t iterations = 0;
    std::int64_t restarts = 0;
    std::optional<std::int64_t> iterations_to_tolerance;
    StopReason stop = StopReason::iteration_cap;
    std::vector<std::string> diagnostics;
    std::vector<Vector> restart_points;

    // Provenance for serialization.
    SolverKind solver = SolverKind::fista;
    std::string policy;
    std::uint64_t seed = 0;
};

/// Runs until the iteration or epoch budget is spent or the gap to the
/// reference falls to the tolerance (checked on recorded iterations).
/// Throws NumericError when F becomes non-finite.
RunTrace run(const CompositeProblem& problem, const RunOptions& options);

struct ReferenceOptions {
    std::int64_t max_iterations = 1'000'000;
    std::int64_t polish_iterations = 2000;
};

/// High-accuracy minimizer: restarted FISTA until the prox-gradient residual
/// stalls at rounding level, then a monotone ISTA polish.
ReferenceSolution compute_reference(const CompositeProblem& problem, const ReferenceOptions& options = {});

std::string to_string(SolverKind solver);
std::string to_string(Engine engine);

} // namespace accrestart
