#include "doctest.h"

#include <algorithm>
#include <vector>

#include "accrestart/sampling.hpp"

using namespace accrestart;

TEST_CASE("draws are sorted distinct indices of size tau")
{
    Sampling s(10, 4, 1);
    for (int t = 0; t < 200; ++t) {
        const auto d = s.draw();
        REQUIRE(d.size() == 4);
        REQUIRE(std::is_sorted(d.begin(), d.end()));
        REQUIRE(std::adjacent_find(d.begin(), d.end()) == d.end());
        REQUIRE(d.front() >= 0);
        REQUIRE(d.back() < 10);
    }
}

TEST_CASE("inclusion frequencies are uniform")
{
    const Index n = 8, tau = 3;
    const int draws = 40000;
    Sampling s(n, tau, 2);
    std::vector<int> hits(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < draws; ++t)
        for (Index i : s.draw()) ++hits[static_cast<std::size_t>(i)];
    // Each coordinate has inclusion probability tau/n; allow five binomial standard deviations.
    const double p = static_cast<double>(tau) / n;
    const double sd = std::sqrt(draws * p * (1.0 - p));
    for (int h : hits) CHECK(std::abs(h - draws * p) < 5.0 * sd);
}

TEST_CASE("same seed, same stream")
{
    Sampling a(12, 5, 42), b(12, 5, 42), c(12, 5, 43);
    bool differs = false;
    for (int t = 0; t < 50; ++t) {
        const auto da = a.draw();
        const std::vector<Index> va(da.begin(), da.end());
        const auto db = b.draw();
        CHECK(std::equal(va.begin(), va.end(), db.begin(), db.end()));
        const auto dc = c.draw();
        differs = differs || !std::equal(va.begin(), va.end(), dc.begin(), dc.end());
    }
    CHECK(differs);
}

TEST_CASE("tau = n selects everything")
{
    Sampling s(5, 5, 0);
    const auto d = s.draw();
    CHECK(std::vector<Index>(d.begin(), d.end()) == std::vector<Index>{0, 1, 2, 3, 4});
}

TEST_CASE("invalid sizes")
{
    CHECK_THROWS_AS(Sampling(0, 1, 0), ConfigError);
    CHECK_THROWS_AS(Sampling(4, 0, 0), ConfigError);
    CHECK_THROWS_AS(Sampling(4, 5, 0), ConfigError);
}
