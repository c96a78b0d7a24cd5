#include "accrestart/sampling.hpp"

#include <algorithm>
#include <numeric>

namespace accrestart {

Sampling::Sampling(Index n, Index tau, std::uint64_t seed)
    : n_(n), tau_(tau), seed_(seed), rng_(seed), perm_(static_cast<std::size_t>(n)), chosen_(static_cast<std::size_t>(tau))
{
    if (n < 1) throw ConfigError("sampling: n must be positive");
    if (tau < 1 || tau > n) throw ConfigError("sampling: tau must lie in [1, n]");
    std::iota(perm_.begin(), perm_.end(), Index{0});
}

std::span<const Index> Sampling::draw()
{
    if (tau_ == n_) {
        std::iota(chosen_.begin(), chosen_.end(), Index{0});
        return chosen_;
    }
    for (Index j = 0; j < tau_; ++j) {
        std::uniform_int_distribution<Index> pick(j, n_ - 1);
        std::swap(perm_[static_cast<std::size_t>(j)], perm_[static_cast<std::size_t>(pick(rng_))]);
    }
    std::copy_n(perm_.begin(), tau_, chosen_.begin());
    std::sort(chosen_.begin(), chosen_.end());
    return chosen_;
}

} // namespace accrestart
