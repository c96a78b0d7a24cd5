#include "accrestart/approx_efficient.hpp"

#include <vector>

#include "accrestart/schedule.hpp"

namespace accrestart {

EfficientState make_efficient_state(const CompositeProblem& problem, const Vector& x0, Index tau)
{
    const Index n = problem.dimension();
    if (x0.size() != n) throw ConfigError("make_efficient_state: x0 has the wrong length");
    if (!x0.allFinite()) throw ConfigError("make_efficient_state: x0 has non-finite entries");
    if (tau < 1 || tau > n) throw ConfigError("make_efficient_state: tau must lie in [1, n]");
    EfficientState s;
    s.z = x0;
    s.w = Vector::Zero(n);
    s.g = Vector::Zero(n);
    s.h = Vector::Zero(n);
    s.az = problem.predictor(x0);
    s.aw = Vector::Zero(problem.samples());
    s.ratio = static_cast<double>(n) / static_cast<double>(tau);
    s.theta0 = 1.0 / s.ratio;
    s.theta = s.theta0;
    s.theta_last = s.theta0;
    return s;
}

void efficient_step(const CompositeProblem& problem, EfficientState& s, Sampling& sampling)
{
    const SparseMatrix& A = problem.design().A;
    const double th = s.theta;
    const double t2 = th * th;
    s.a += s.r * (1.0 - th) / (t2 * t2);
    s.b += s.r / t2;

    const auto coords = sampling.draw();
    thread_local std::vector<double> partial;
    partial.resize(coords.size());
    // All partials at y_k = z_k + theta_k^2 w_k before any coordinate moves.
    for (std::size_t c = 0; c < coords.size(); ++c) {
        double acc = 0.0;
        for (SparseMatrix::InnerIterator it(A, coords[c]); it; ++it) {
            const Index j = it.row();
            const double ay = s.az[j] + t2 * s.aw[j];
            acc += it.value() * problem.row_loss_derivative(ay, j);
        }
        partial[c] = acc;
    }

    const double w_coef = (1.0 - s.ratio * th) / t2;
    const auto& v = problem.v();
    for (std::size_t c = 0; c < coords.size(); ++c) {
        const Index i = coords[c];
        const double zi = s.z[i];
        const double t = prox_coordinate(problem.regularizer(), i, partial[c], zi, th * s.ratio * v[i]) - zi;
        if (t == 0.0) continue;
        const double dw = -w_coef * t;
        s.z[i] = zi + t;
        s.w[i] += dw;
        s.g[i] += s.a * t;
        s.h[i] += s.b * dw;
        for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
            s.az[it.row()] += it.value() * t;
            s.aw[it.row()] += it.value() * dw;
        }
    }

    const double next = theta_next(th);
    s.r = next * (1.0 - s.ratio * th) + s.ratio * (th - next);
    s.theta_last = th;
    s.theta = next;
    ++s.k;
    ++s.period_counter;
}

Vector materialize_x(const EfficientState& s)
{
    return s.z + (s.theta_last * s.theta_last) * s.w;
}

Vector weighted_history_sum(const EfficientState& s)
{
    return s.a * s.z + s.b * s.w - s.g - s.h;
}

Vector efficient_restart_point(const EfficientState& s, double sigma)
{
    if (!(sigma >= 0.0 && sigma <= 1.0)) throw ConfigError("efficient_restart_point: sigma must lie in [0, 1]");
    const double tl = s.theta_last;
    const double tl2 = tl * tl;
    const double denom = tl2 * s.a + s.ratio * (1.0 / tl - s.ratio + 1.0);
    if (!(denom > 0.0)) throw NumericError("efficient_restart_point: nonpositive normalizer");
    const double c = (1.0 - sigma) * tl2 / denom;
    return s.z + tl2 * s.w + c * (-s.g - s.h) + (c * (s.b - tl2 * s.a)) * s.w;
}

double efficient_objective(const CompositeProblem& problem, const EfficientState& s)
{
    const Vector ax = s.az + (s.theta_last * s.theta_last) * s.aw;
    return problem.smooth_value_at_predictor(ax) + problem.regularizer().value(materialize_x(s));
}

} // namespace accrestart
