#include "doctest.h"

#include <vector>

#include "accrestart/approx_efficient.hpp"
#include "accrestart/oracle.hpp"
#include "accrestart/restart.hpp"
#include "accrestart/schedule.hpp"
#include "accrestart/solvers.hpp"
#include "support.hpp"

using namespace accrestart;
using accrestart::testing::random_lasso;
using accrestart::testing::rel_diff;

namespace {

CompositeProblem coordinate_problem(Index n, Index m, std::uint64_t seed, Index tau, double l2 = 0.0)
{
    return prepare_problem(random_lasso(n, m, seed, l2, 0.6), SolverKind::approx, tau);
}

Vector random_start(Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = g(rng);
    return x;
}

} // namespace

TEST_CASE("first step leaves the aggregates at zero")
{
    const auto p = coordinate_problem(6, 15, 1, 2);
    auto s = make_efficient_state(p, random_start(6, 2), 2);
    Sampling sampling(6, 2, 3);
    efficient_step(p, s, sampling);
    CHECK(s.a == 0.0);
    CHECK(s.b == 0.0);
    CHECK(s.g.isZero(0.0));
    CHECK(s.h.isZero(0.0));
    CHECK(s.r > 0.0);
}

TEST_CASE("coordinate move is the prox step at y = z + theta^2 w")
{
    const Index n = 8, tau = 3;
    const auto p = coordinate_problem(n, 20, 4, tau);
    auto s = make_efficient_state(p, random_start(n, 5), tau);
    Sampling run_sampling(n, tau, 6);
    for (int i = 0; i < 5; ++i) efficient_step(p, s, run_sampling);

    Sampling replay = run_sampling; // same stream position
    const auto S = replay.draw();
    const std::vector<Index> chosen(S.begin(), S.end());

    const double th = s.theta;
    const Vector y = s.z + th * th * s.w;
    const Vector grad = p.gradient(y);
    const EfficientState before = s;
    efficient_step(p, s, run_sampling);
    for (Index i : chosen) {
        const double expected = prox_coordinate(p.regularizer(), i, grad[i], before.z[i], th * s.ratio * p.v()[i]);
        CHECK(s.z[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("untouched coordinates are bit-identical across a step")
{
    const Index n = 12, tau = 2;
    const auto p = coordinate_problem(n, 30, 7, tau);
    auto s = make_efficient_state(p, random_start(n, 8), tau);
    Sampling sampling(n, tau, 9);
    for (int it = 0; it < 40; ++it) {
        Sampling peek = sampling;
        const auto S = peek.draw();
        std::vector<bool> touched(static_cast<std::size_t>(n), false);
        for (Index i : S) touched[static_cast<std::size_t>(i)] = true;
        const EfficientState before = s;
        efficient_step(p, s, sampling);
        for (Index i = 0; i < n; ++i) {
            if (touched[static_cast<std::size_t>(i)]) continue;
            CHECK(s.z[i] == before.z[i]);
            CHECK(s.w[i] == before.w[i]);
            CHECK(s.g[i] == before.g[i]);
            CHECK(s.h[i] == before.h[i]);
        }
    }
}

TEST_CASE("materialized iterate tracks the literal iteration")
{
    const Index n = 10, tau = 2;
    const auto p = coordinate_problem(n, 25, 10, tau);
    const Vector x0 = random_start(n, 11);
    auto s = make_efficient_state(p, x0, tau);
    CHECK(materialize_x(s) == x0);
    IterateState naive = make_iterate_state(x0, 1.0 * tau / n);
    Sampling a(n, tau, 12), b(n, tau, 12);
    for (int it = 0; it < 200; ++it) {
        efficient_step(p, s, a);
        approx_step(p, naive, b);
        REQUIRE(rel_diff(materialize_x(s), naive.x) < 1e-10);
        REQUIRE(rel_diff(s.z, naive.z) < 1e-10);
    }
}

TEST_CASE("aggregate identity for the weighted history sum")
{
    const Index n = 6, tau = 2;
    const double ratio = 3.0;
    const auto p = coordinate_problem(n, 18, 13, tau);
    auto s = make_efficient_state(p, random_start(n, 14), tau);
    Sampling sampling(n, tau, 15);
    const auto table = oracle::gamma_table(1.0 / ratio, ratio, 201);

    std::vector<Vector> xs{materialize_x(s)};
    for (Index k = 1; k <= 200; ++k) {
        efficient_step(p, s, sampling);
        xs.push_back(materialize_x(s));
        // alpha_j = gamma_{j+1}^j / (theta_j^2 theta_{j-1}^2) for j >= 1, alpha_0 = 0.
        Vector expected = Vector::Zero(n);
        for (Index j = 1; j < k; ++j) {
            const double tj = table.theta_path[static_cast<std::size_t>(j)];
            const double alpha = table.gamma(j + 1, j) * table.inv_sq_prev(j) / (tj * tj);
            expected += alpha * xs[static_cast<std::size_t>(j)];
        }
        const Vector got = weighted_history_sum(s);
        REQUIRE((got - expected).norm() <= 1e-9 * std::max(1.0, expected.norm()));
    }
}

TEST_CASE("closed-form restart point matches the history-weighted oracle")
{
    const Index n = 5, tau = 2;
    const Index K = 7;
    const auto p = coordinate_problem(n, 12, 16, tau);
    const Vector x0 = random_start(n, 17);
    auto s = make_efficient_state(p, x0, tau);
    IterateState naive = make_iterate_state(x0, 1.0 * tau / n);
    Sampling a(n, tau, 18), b(n, tau, 18);
    const auto table = oracle::gamma_table(naive.theta0, 1.0 * n / tau, K);
    std::vector<Vector> history{x0};
    for (Index k = 1; k <= K; ++k) {
        efficient_step(p, s, a);
        approx_step(p, naive, b);
        history.push_back(naive.x);
        for (double sigma : {0.0, 0.3, 1.0}) {
            const Vector fast = efficient_restart_point(s, sigma);
            const Vector slow = restart_point_approx_naive(history, table, sigma);
            REQUIRE(rel_diff(fast, slow) < 1e-10);
        }
    }
}

TEST_CASE("restart point special cases")
{
    const Index n = 4, tau = 1;
    const auto p = coordinate_problem(n, 10, 19, tau);
    auto s = make_efficient_state(p, random_start(n, 20), tau);
    Sampling sampling(n, tau, 21);
    efficient_step(p, s, sampling);
    // One step after a restart the center collapses onto x_1.
    CHECK(rel_diff(efficient_restart_point(s, 0.25), materialize_x(s)) < 1e-14);
    for (int i = 0; i < 9; ++i) efficient_step(p, s, sampling);
    CHECK(rel_diff(efficient_restart_point(s, 1.0), materialize_x(s)) < 1e-14);

    const Vector point = efficient_restart_point(s, 0.5);
    apply_restart(s, point, p);
    CHECK(s.w.isZero(0.0));
    CHECK(s.a == 0.0);
    CHECK(s.b == 0.0);
    CHECK(s.r == 0.0);
    CHECK(s.theta == s.theta0);
    CHECK(materialize_x(s) == point);
    CHECK(rel_diff(s.az, p.predictor(point)) < 1e-14);
}

TEST_CASE("gamma tail identity")
{
    for (double ratio : {1.0, 2.0, 10.0}) {
        const auto table = oracle::gamma_table(1.0 / ratio, ratio, 500);
        for (Index k = 1; k < 500; k += 7) {
            const double tk = table.theta_path[static_cast<std::size_t>(k)];
            for (Index i = 0; i < k; ++i) {
                const double ti = table.theta_path[static_cast<std::size_t>(i)];
                const double expected = tk * tk * table.gamma(i + 1, i) / (ti * ti);
                REQUIRE(std::abs(table.gamma(k + 1, i) - expected) <= 1e-10 * std::max(1.0, expected));
            }
        }
    }
}

TEST_CASE("efficient run matches the naive run with restarts")
{
    for (Index tau : {1, 2, 5}) {
        const Index n = 10;
        const auto p = coordinate_problem(n, 30, 22 + tau, tau, 0.05);
        RunOptions opt;
        opt.solver = SolverKind::approx;
        opt.tau = tau;
        opt.seed = 99;
        opt.policy = ApproxCombination{0.4, 10};
        opt.max_iterations = 50;
        opt.record_every = 1;
        opt.keep_restart_points = true;
        opt.engine = Engine::efficient;
        const auto fast = run(p, opt);
        opt.engine = Engine::naive;
        const auto slow = run(p, opt);
        REQUIRE(fast.records.size() == slow.records.size());
        for (std::size_t i = 0; i < fast.records.size(); ++i) {
            CHECK(fast.records[i].restart == slow.records[i].restart);
            CHECK(rel_diff(fast.records[i].F, slow.records[i].F) < 1e-8);
        }
        REQUIRE(fast.restart_points.size() == 5);
        for (std::size_t i = 0; i < fast.restart_points.size(); ++i)
            CHECK(rel_diff(fast.restart_points[i], slow.restart_points[i]) < 1e-8);
    }
}

TEST_CASE("make_efficient_state rejects bad input")
{
    const auto p = coordinate_problem(4, 10, 30, 1);
    CHECK_THROWS_AS(make_efficient_state(p, Vector::Zero(3), 1), ConfigError);
    CHECK_THROWS_AS(make_efficient_state(p, Vector::Zero(4), 0), ConfigError);
    CHECK_THROWS_AS(make_efficient_state(p, Vector::Zero(4), 5), ConfigError);
}
