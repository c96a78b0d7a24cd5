#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "accrestart/types.hpp"

namespace accrestart {

/// tau-nice sampling: every subset of size tau is equally likely. Each draw
/// is the first tau entries of a seeded partial shuffle, returned sorted so
/// that coordinate updates run in index order.
class Sampling {
public:
    Sampling(Index n, Index tau, std::uint64_t seed);

    Index n() const { return n_; }
    Index tau() const { return tau_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const Index> draw();

private:
    Index n_;
    Index tau_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    std::vector<Index> perm_;
    std::vector<Index> chosen_;
};

} // namespace accrestart
