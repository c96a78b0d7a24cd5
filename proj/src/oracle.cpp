#include "accrestart/oracle.hpp"

#include <string>

#include "accrestart/schedule.hpp"

namespace accrestart::oracle {

double GammaTable::inv_sq_prev(Index i) const
{
    const double t0 = theta_path.front();
    if (i == 0) return (1.0 - t0) / (t0 * t0);
    const double t = theta_path[static_cast<std::size_t>(i - 1)];
    return 1.0 / (t * t);
}

GammaTable gamma_table(double theta0, double ratio, Index k_max)
{
    if (k_max < 0 || k_max > kMaxGammaRows)
        throw ConfigError("gamma_table: k_max must lie in [0, " + std::to_string(kMaxGammaRows) + "]");
    GammaTable table;
    table.ratio = ratio;
    ThetaSequence<double> thetas(theta0);
    thetas.extend_to(k_max);
    table.theta_path.assign(thetas.values().begin(), thetas.values().begin() + k_max + 1);

    table.rows.push_back({1.0});
    if (k_max >= 1) table.rows.push_back({0.0, 1.0});
    for (Index k = 1; k < k_max; ++k) {
        const double th = table.theta_path[static_cast<std::size_t>(k)];
        const double th_prev = table.theta_path[static_cast<std::size_t>(k - 1)];
        const auto& cur = table.rows.back();
        std::vector<double> next(static_cast<std::size_t>(k + 2));
        for (Index i = 0; i < k; ++i) next[static_cast<std::size_t>(i)] = (1.0 - th) * cur[static_cast<std::size_t>(i)];
        next[static_cast<std::size_t>(k)] = th * (1.0 - ratio * th_prev) + ratio * (th_prev - th);
        next[static_cast<std::size_t>(k + 1)] = ratio * th;
        table.rows.push_back(std::move(next));
    }
    return table;
}

std::vector<double> center_weights(const GammaTable& table, Index k)
{
    if (k < 1) throw ConfigError("center_weights: k must be >= 1");
    if (k > table.k_max()) throw ConfigError("center_weights: k beyond the table");
    const double t0 = table.theta_path.front();
    const double t_last = table.theta_path[static_cast<std::size_t>(k - 1)];
    std::vector<double> w(static_cast<std::size_t>(k + 1));
    double total = 0.0;
    for (Index i = 0; i < k; ++i) {
        w[static_cast<std::size_t>(i)] = table.gamma(k, i) * table.inv_sq_prev(i);
        total += w[static_cast<std::size_t>(i)];
    }
    w[static_cast<std::size_t>(k)] = 1.0 / (t0 * t_last) - (1.0 - t0) / (t0 * t0);
    total += w[static_cast<std::size_t>(k)];
    for (double& wi : w) wi /= total;
    return w;
}

Vector naive_center(std::span<const Vector> history, const GammaTable& table)
{
    const Index k = static_cast<Index>(history.size()) - 1;
    const std::vector<double> w = center_weights(table, k);
    Vector out = Vector::Zero(history.front().size());
    for (Index i = 0; i <= k; ++i) out += w[static_cast<std::size_t>(i)] * history[static_cast<std::size_t>(i)];
    return out;
}

Vector fd_gradient(const CompositeProblem& problem, const Vector& x, double step)
{
    if (!(step > 0.0)) throw ConfigError("fd_gradient: step must be positive");
    Vector g(x.size());
    Vector probe = x;
    for (Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double up = problem.smooth_value(probe);
        probe[i] = x[i] - step;
        const double down = problem.smooth_value(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

} // namespace accrestart::oracle
