#include "doctest.h"

#include <random>

#include "accrestart/oracle.hpp"
#include "accrestart/schedule.hpp"
#include "accrestart/solvers.hpp"
#include "support.hpp"

using namespace accrestart;
using accrestart::testing::random_lasso;
using accrestart::testing::rel_diff;

namespace {

SparseDesign identity_design(Index n)
{
    SparseDesign d;
    d.A = Eigen::MatrixXd::Identity(n, n).sparseView();
    d.b = Vector::Zero(n);
    return d;
}

// f = 0.5 ||x||^2, psi = 0, v = 1.
CompositeProblem half_square()
{
    SparseDesign d = identity_design(1);
    return CompositeProblem(std::make_shared<const SparseDesign>(d), Loss::squared, 1.0, ElasticRegularizer{}, Vector::Ones(1),
                            1.0);
}

CompositeProblem full_lasso(Index n, Index m, std::uint64_t seed, double l2 = 0.0)
{
    return prepare_problem(random_lasso(n, m, seed, l2), SolverKind::fista, 1);
}

} // namespace

TEST_CASE("fista first step by hand")
{
    const auto p = half_square();
    auto s = make_iterate_state(Vector::Ones(1), 1.0);
    fista_step(p, s);
    CHECK(s.x[0] == 0.0);
    CHECK(s.z[0] == 0.0);
    CHECK(s.theta == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0));
    CHECK(s.k == 1);
    CHECK(s.period_counter == 1);
}

TEST_CASE("fixed points are preserved")
{
    const auto p = full_lasso(6, 20, 1);
    const auto ref = compute_reference(p);
    for (int solver = 0; solver < 4; ++solver) {
        auto s = make_iterate_state(ref.x, solver == 3 ? 1.0 / 6.0 : 1.0);
        Sampling sampling(6, 1, 0);
        const auto q = solver == 3 ? prepare_problem(p, SolverKind::approx, 1) : p;
        for (int it = 0; it < 20; ++it) {
            switch (solver) {
            case 0: prox_grad_step(q, s); break;
            case 1: fista_step(q, s); break;
            case 2: apg_step(q, s); break;
            default: approx_step(q, s, sampling); break;
            }
        }
        CHECK(rel_diff(s.x, ref.x) < 1e-10);
    }
}

TEST_CASE("apg and fista agree on the first step")
{
    const auto p = full_lasso(8, 20, 2);
    const Vector x0 = Vector::LinSpaced(8, -1.0, 1.0);
    auto a = make_iterate_state(x0, 1.0);
    auto f = make_iterate_state(x0, 1.0);
    apg_step(p, a);
    fista_step(p, f);
    CHECK(rel_diff(a.x, f.x) < 1e-14);
    CHECK(rel_diff(a.z, f.z) < 1e-14);
}

TEST_CASE("ista is fista with z reset and decreases F")
{
    const auto p = full_lasso(8, 20, 3);
    auto ista = make_iterate_state(Vector::Ones(8), 1.0);
    auto fista = make_iterate_state(Vector::Ones(8), 1.0);
    double F = p.objective(ista.x);
    for (int it = 0; it < 50; ++it) {
        prox_grad_step(p, ista);
        fista_step(p, fista);
        fista.z = fista.x;
        fista.theta = 1.0;
        CHECK(rel_diff(ista.x, fista.x) < 1e-12);
        const double next = p.objective(ista.x);
        CHECK(next <= F + 1e-12);
        F = next;
    }
}

TEST_CASE("gradient descent step on a quadratic")
{
    const auto p = full_lasso(5, 12, 4).with_weights(Vector::Constant(5, 1.0));
    // Drop the l1 part by giving the problem a zero weight.
    const CompositeProblem q(std::make_shared<const SparseDesign>(p.design()), Loss::squared, 1.0, ElasticRegularizer{},
                             full_gradient_weights(p), 0.0);
    auto s = make_iterate_state(Vector::Ones(5), 1.0);
    const Vector expected = s.x - q.gradient(s.x) / q.v()[0];
    prox_grad_step(q, s);
    CHECK(rel_diff(s.x, expected) < 1e-14);
}

TEST_CASE("approx with tau = n coincides with apg")
{
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto p = full_lasso(7, 15, seed);
        auto a = make_iterate_state(Vector::Ones(7), 1.0);
        auto b = make_iterate_state(Vector::Ones(7), 1.0);
        Sampling all(7, 7, seed);
        for (int it = 0; it < 100; ++it) {
            apg_step(p, a);
            approx_step(p, b, all);
            REQUIRE(rel_diff(a.x, b.x) < 1e-12);
        }
    }
}

TEST_CASE("approx leaves unsampled coordinates of z alone")
{
    const auto p = prepare_problem(random_lasso(9, 20, 5), SolverKind::approx, 2);
    auto s = make_iterate_state(Vector::Ones(9), 2.0 / 9.0);
    Sampling sampling(9, 2, 6);
    for (int it = 0; it < 30; ++it) {
        Sampling peek = sampling;
        const auto S = peek.draw();
        const Vector z = s.z;
        approx_step(p, s, sampling);
        for (Index i = 0; i < 9; ++i)
            if (std::find(S.begin(), S.end(), i) == S.end()) CHECK(s.z[i] == z[i]);
    }
    auto bad = make_iterate_state(Vector::Ones(9), 1.0);
    CHECK_THROWS_AS(approx_step(p, bad, sampling), ConfigError);
}

TEST_CASE("iterates are convex combinations of the z sequence")
{
    for (int which = 0; which < 2; ++which) {
        const Index n = 6, tau = which == 0 ? n : 2;
        const auto p = which == 0 ? full_lasso(n, 15, 7) : prepare_problem(random_lasso(n, 15, 7), SolverKind::approx, tau);
        const double theta0 = static_cast<double>(tau) / n;
        auto s = make_iterate_state(Vector::LinSpaced(n, -2.0, 2.0), theta0);
        Sampling sampling(n, tau, 8);
        const auto table = oracle::gamma_table(theta0, 1.0 / theta0, 60);
        std::vector<Vector> zs{s.z};
        for (Index k = 1; k <= 60; ++k) {
            if (which == 0) fista_step(p, s);
            else approx_step(p, s, sampling);
            zs.push_back(s.z);
            Vector combo = Vector::Zero(n);
            double total = 0.0;
            for (Index i = 0; i <= k; ++i) {
                REQUIRE(table.gamma(k, i) >= -1e-15);
                total += table.gamma(k, i);
                combo += table.gamma(k, i) * zs[static_cast<std::size_t>(i)];
            }
            REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
            REQUIRE(rel_diff(combo, s.x) < 1e-8);
        }
    }
}

TEST_CASE("fista and apg per-iteration certificate")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = full_lasso(10, 25, seed);
        const auto ref = compute_reference(p);
        const Vector x0 = Vector::Ones(10);
        const double R = 0.5 * weighted_norm_sq(x0 - ref.x, p.v());
        for (bool apg : {false, true}) {
            auto s = make_iterate_state(x0, 1.0);
            for (int k = 1; k <= 300; ++k) {
                const double theta_prev = s.theta;
                if (apg) apg_step(p, s);
                else fista_step(p, s);
                const double lhs = (p.objective(s.x) - ref.F) / (theta_prev * theta_prev) +
                                   0.5 * weighted_norm_sq(s.z - ref.x, p.v());
                REQUIRE(lhs <= R * (1.0 + 1e-8) + 1e-12);
                REQUIRE(0.5 * weighted_norm_sq(s.x - ref.x, p.v()) <= R * (1.0 + 1e-8) + 1e-12);
            }
        }
    }
}

TEST_CASE("approx certificate in expectation")
{
    const Index n = 8, tau = 2;
    const auto p = prepare_problem(random_lasso(n, 20, 9), SolverKind::approx, tau);
    const auto ref = compute_reference(p);
    const double theta0 = static_cast<double>(tau) / n;
    const Vector x0 = Vector::Ones(n);
    const double rhs = (1.0 - theta0) / (theta0 * theta0) * (p.objective(x0) - ref.F) +
                       weighted_norm_sq(x0 - ref.x, p.v()) / (2.0 * theta0 * theta0);
    const int seeds = 200;
    const int K = 40;
    std::vector<double> lhs(K + 1, 0.0);
    ThetaSequence<double> th(theta0);
    for (int seed = 0; seed < seeds; ++seed) {
        auto s = make_iterate_state(x0, theta0);
        Sampling sampling(n, tau, static_cast<std::uint64_t>(seed));
        for (int k = 1; k <= K; ++k) {
            approx_step(p, s, sampling);
            const double t = th(k - 1);
            lhs[static_cast<std::size_t>(k)] += (p.objective(s.x) - ref.F) / (t * t) +
                                               weighted_norm_sq(s.z - ref.x, p.v()) / (2.0 * theta0 * theta0);
        }
    }
    for (int k = 1; k <= K; ++k) CHECK(lhs[static_cast<std::size_t>(k)] / seeds <= rhs * (1.0 + 3.0 / std::sqrt(200.0)));
}

TEST_CASE("run contract")
{
    const auto p = full_lasso(6, 15, 10);
    RunOptions opt;
    opt.max_iterations = 0;
    auto t = run(p, opt);
    REQUIRE(t.records.size() == 1);
    CHECK(t.records[0].iter == 0);
    CHECK(!t.records[0].gap);

    opt.max_iterations = 30;
    opt.gap_tolerance = 1e-10;
    CHECK_THROWS_AS(run(p, opt), ConfigError);

    const auto q = prepare_problem(random_lasso(6, 15, 10), SolverKind::approx, 2);
    RunOptions a;
    a.solver = SolverKind::approx;
    a.tau = 2;
    a.seed = 5;
    a.max_iterations = 90;
    a.policy = FunctionValueAdaptive{};
    const auto r1 = run(q, a);
    const auto r2 = run(q, a);
    REQUIRE(r1.records.size() == r2.records.size());
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
        CHECK(r1.records[i].F == r2.records[i].F);
        CHECK(r1.records[i].restart == r2.records[i].restart);
    }
    for (std::size_t i = 1; i < r1.records.size(); ++i) CHECK(r1.records[i].iter > r1.records[i - 1].iter);
    // Default stride is one epoch for the coordinate method.
    CHECK(r1.records[1].iter <= 3);
    CHECK(r1.records.back().iter == 90);
}

TEST_CASE("run stops at the gap tolerance and on the epoch cap")
{
    const auto base = full_lasso(6, 15, 11, 0.1);
    const auto p = base.with_reference(compute_reference(base));
    RunOptions opt;
    opt.max_iterations = 100000;
    opt.gap_tolerance = 1e-10;
    const auto t = run(p, opt);
    CHECK(t.stop == StopReason::tolerance);
    REQUIRE(t.iterations_to_tolerance);
    CHECK(*t.records.back().gap <= 1e-10);
    CHECK(*t.records[t.records.size() - 2].gap > 1e-10);

    RunOptions e;
    e.solver = SolverKind::approx;
    e.tau = 2;
    e.max_epochs = 4.0;
    e.max_iterations = 1000;
    const auto q = prepare_problem(base, SolverKind::approx, 2).with_reference(*p.reference());
    const auto te = run(q, e);
    CHECK(te.stop == StopReason::epoch_cap);
    CHECK(te.iterations == 12);
    CHECK(te.records.back().epoch == doctest::Approx(4.0));
    CHECK(te.records.back().dist_v);
}

TEST_CASE("run rejects invalid policies")
{
    const auto p = full_lasso(5, 12, 12);
    RunOptions opt;
    opt.solver = SolverKind::ista;
    opt.policy = ConditionalAtZ{};
    CHECK_THROWS_AS(run(p, opt), ConfigError);
    opt.solver = SolverKind::approx;
    opt.policy = FixedCombination{0.5, 4};
    CHECK_THROWS_AS(run(p, opt), ConfigError);
    opt.solver = SolverKind::fista;
    opt.policy = FixedCombination{1.5, 4};
    CHECK_THROWS_AS(run(p, opt), ConfigError);
}

TEST_CASE("restart points and flags follow the policy")
{
    const auto p = full_lasso(6, 15, 13);
    RunOptions opt;
    opt.policy = FixedCombination{0.3, 5};
    opt.max_iterations = 23;
    opt.keep_restart_points = true;
    const auto t = run(p, opt);
    CHECK(t.restarts == 4);
    CHECK(t.restart_points.size() == 4);
    for (const auto& r : t.records) CHECK(r.restart == (r.iter > 0 && r.iter % 5 == 0));
}

TEST_CASE("history-weighted restart on fista: running center matches the literal history")
{
    const auto p = full_lasso(6, 15, 14, 0.05);
    RunOptions opt;
    opt.policy = ApproxCombination{0.4, 9};
    opt.max_iterations = 40;
    opt.keep_restart_points = true;
    opt.engine = Engine::efficient;
    const auto a = run(p, opt);
    opt.engine = Engine::naive;
    const auto b = run(p, opt);
    REQUIRE(a.restart_points.size() == b.restart_points.size());
    for (std::size_t i = 0; i < a.restart_points.size(); ++i) CHECK(rel_diff(a.restart_points[i], b.restart_points[i]) < 1e-12);
}

TEST_CASE("non-finite objective aborts the run")
{
    auto base = full_lasso(4, 10, 15);
    // Step weights far below the Lipschitz constant make the iteration diverge.
    const auto p = base.with_weights(Vector::Constant(4, 1e-3 * base.v()[0]));
    RunOptions opt;
    opt.max_iterations = 100000;
    CHECK_THROWS_AS(run(p, opt), NumericError);
}

TEST_CASE("reference solver reaches the optimum of a strongly convex instance")
{
    const auto p = full_lasso(5, 30, 16, 0.5);
    const auto ref = compute_reference(p);
    // Optimality: x* is a fixed point of the prox-gradient map.
    const Vector T = prox_full(p.regularizer(), p.gradient(ref.x), ref.x, p.v());
    CHECK(rel_diff(T, ref.x) < 1e-13);
    CHECK(ref.F == doctest::Approx(p.objective(ref.x)));
}
