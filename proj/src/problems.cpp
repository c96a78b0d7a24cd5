#include "accrestart/problems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <string>

namespace accrestart {

namespace {

constexpr Index kDenseEigenLimit = 1000;

void require_finite(const Vector& x, const char* where)
{
    if (!x.allFinite()) throw NumericError(std::string(where) + ": non-finite input");
}

// log(1 + exp(t)) without overflow.
double softplus(double t)
{
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t)
{
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double soft_threshold(double u, double threshold)
{
    if (u > threshold) return u - threshold;
    if (u < -threshold) return u + threshold;
    return 0.0;
}

// Smallest eigenvalue of A^T A, used as the Euclidean strong-convexity
// modulus of the least-squares term. 0 when the dense solve is too large.
double smallest_gram_eigenvalue(const SparseMatrix& A)
{
    if (A.cols() > kDenseEigenLimit) return 0.0;
    const Eigen::MatrixXd gram = Eigen::MatrixXd(SparseMatrix(A.transpose() * A));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues().minCoeff());
}

} // namespace

void SparseDesign::validate(bool reject_empty_columns) const
{
    if (A.rows() == 0 || A.cols() == 0) throw ConfigError("design: empty matrix");
    if (b.size() != A.rows())
        throw ConfigError("design: target length " + std::to_string(b.size()) + " does not match " +
                          std::to_string(A.rows()) + " rows");
    if (!b.allFinite()) throw ConfigError("design: non-finite target");
    for (Index j = 0; j < A.outerSize(); ++j) {
        bool any = false;
        for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
            if (!std::isfinite(it.value())) throw ConfigError("design: non-finite entry in column " + std::to_string(j + 1));
            if (it.value() != 0.0) any = true;
        }
        if (reject_empty_columns && !any)
            throw ConfigError("design: column " + std::to_string(j + 1) +
                              " is identically zero (its step weight would vanish)");
    }
}

double max_abs_correlation(const SparseDesign& design)
{
    const Vector atb = design.A.transpose() * design.b;
    return atb.cwiseAbs().maxCoeff();
}

double ElasticRegularizer::value(double t) const
{
    return l1 * std::abs(t) + 0.5 * l2 * t * t;
}

double ElasticRegularizer::value(const Vector& x) const
{
    return l1 * x.lpNorm<1>() + 0.5 * l2 * x.squaredNorm();
}

double prox_coordinate(const ElasticRegularizer& reg, Index /*i*/, double g, double center, double weight)
{
    if (!(weight > 0.0)) throw ConfigError("prox_coordinate: weight must be positive");
    const double denom = weight + reg.l2;
    return soft_threshold((weight * center - g) / denom, reg.l1 / denom);
}

Vector prox_full(const ElasticRegularizer& reg, const Vector& g, const Vector& center, const Vector& weights)
{
    if (g.size() != center.size() || g.size() != weights.size()) throw ConfigError("prox_full: length mismatch");
    Vector out(g.size());
    for (Index i = 0; i < g.size(); ++i) out[i] = prox_coordinate(reg, i, g[i], center[i], weights[i]);
    return out;
}

CompositeProblem::CompositeProblem(std::shared_ptr<const SparseDesign> design, Loss loss, double loss_scale,
                                   ElasticRegularizer reg, Vector v, double strong_convexity_modulus)
    : design_(std::move(design)), loss_(loss), loss_scale_(loss_scale), reg_(reg), v_(std::move(v)),
      modulus_(strong_convexity_modulus)
{
    if (!design_) throw ConfigError("problem: missing design");
    if (v_.size() != design_->cols()) throw ConfigError("problem: step weight length does not match dimension");
    if (!v_.allFinite()) throw NumericError("problem: step weights overflowed");
    if (!(v_.array() > 0.0).all()) throw ConfigError("problem: step weights must be positive");
    if (reg_.l1 < 0.0 || reg_.l2 < 0.0) throw ConfigError("problem: regularizer weights must be nonnegative");
    if (modulus_ < 0.0) throw ConfigError("problem: strong convexity modulus must be nonnegative");
}

double CompositeProblem::mu_F() const
{
    return modulus_ / v_.maxCoeff();
}

CompositeProblem CompositeProblem::with_weights(Vector v) const
{
    CompositeProblem copy(design_, loss_, loss_scale_, reg_, std::move(v), modulus_);
    copy.reference_ = reference_;
    return copy;
}

CompositeProblem CompositeProblem::with_reference(ReferenceSolution ref) const
{
    if (ref.x.size() != dimension())
        throw ConfigError("reference dimension " + std::to_string(ref.x.size()) + " does not match problem dimension " +
                          std::to_string(dimension()));
    CompositeProblem copy = *this;
    copy.reference_ = std::move(ref);
    return copy;
}

double CompositeProblem::smooth_value_at_predictor(const Vector& ax) const
{
    const Vector& b = design_->b;
    if (loss_ == Loss::squared) return 0.5 * (ax - b).squaredNorm();
    double total = 0.0;
    for (Index j = 0; j < ax.size(); ++j) total += softplus(b[j] * ax[j]);
    return loss_scale_ * total;
}

double CompositeProblem::row_loss_derivative(double s, Index row) const
{
    const double bj = design_->b[row];
    if (loss_ == Loss::squared) return s - bj;
    return loss_scale_ * bj * sigmoid(bj * s);
}

Vector CompositeProblem::loss_derivative(const Vector& ax) const
{
    Vector d(ax.size());
    for (Index j = 0; j < ax.size(); ++j) d[j] = row_loss_derivative(ax[j], j);
    return d;
}

Vector CompositeProblem::gradient_at_predictor(const Vector& ax) const
{
    return design_->A.transpose() * loss_derivative(ax);
}

double CompositeProblem::partial_at_predictor(const Vector& ax, Index i) const
{
    double g = 0.0;
    for (SparseMatrix::InnerIterator it(design_->A, i); it; ++it) g += it.value() * row_loss_derivative(ax[it.row()], it.row());
    return g;
}

double CompositeProblem::smooth_value(const Vector& x) const
{
    require_finite(x, "smooth_value");
    return smooth_value_at_predictor(predictor(x));
}

double CompositeProblem::objective(const Vector& x) const
{
    require_finite(x, "objective");
    return smooth_value_at_predictor(predictor(x)) + reg_.value(x);
}

Vector CompositeProblem::gradient(const Vector& x) const
{
    require_finite(x, "gradient");
    return gradient_at_predictor(predictor(x));
}

double CompositeProblem::partial_derivative(const Vector& x, Index i) const
{
    require_finite(x, "partial_derivative");
    return partial_at_predictor(predictor(x), i);
}

Vector CompositeProblem::row_curvature() const
{
    const Vector& b = design_->b;
    if (loss_ == Loss::squared) return Vector::Ones(b.size());
    return (0.25 * loss_scale_) * b.array().square().matrix();
}

double default_lasso_weight(const SparseDesign& design)
{
    return max_abs_correlation(design) / 10.0;
}

CompositeProblem lasso_problem(SparseDesign design, double reg_weight, double l2)
{
    design.validate();
    if (!(reg_weight > 0.0)) throw ConfigError("lasso: regularization weight must be positive");
    if (l2 < 0.0) throw ConfigError("lasso: l2 weight must be nonnegative");
    const Vector v = design.A.cwiseAbs2().transpose() * Vector::Ones(design.rows());
    const double modulus = smallest_gram_eigenvalue(design.A) + l2;
    auto shared = std::make_shared<const SparseDesign>(std::move(design));
    return CompositeProblem(std::move(shared), Loss::squared, 1.0, ElasticRegularizer{reg_weight, l2}, v, modulus);
}

CompositeProblem logistic_problem(SparseDesign design, double lambda1, double lambda2)
{
    design.validate();
    if (!(lambda1 > 0.0)) throw ConfigError("logistic: lambda1 must be positive");
    if (lambda2 < 0.0) throw ConfigError("logistic: lambda2 must be nonnegative");
    const double corr = max_abs_correlation(design);
    if (!(corr > 0.0)) throw ConfigError("logistic: A^T b vanishes");
    const double scale = lambda1 / (2.0 * corr);
    const Vector weighted_sq = design.b.array().square().matrix();
    const Vector v = (lambda1 / (8.0 * corr)) * (design.A.cwiseAbs2().transpose() * weighted_sq);
    auto shared = std::make_shared<const SparseDesign>(std::move(design));
    return CompositeProblem(std::move(shared), Loss::logistic, scale, ElasticRegularizer{1.0, lambda2}, v, lambda2);
}

Vector coordinate_weights(const CompositeProblem& problem)
{
    return problem.design().A.cwiseAbs2().transpose() * problem.row_curvature();
}

Vector tau_nice_weights(const CompositeProblem& problem, Index tau)
{
    const Index n = problem.dimension();
    if (tau < 1 || tau > n) throw ConfigError("tau_nice_weights: tau must lie in [1, n]");
    const SparseMatrix& A = problem.design().A;
    Vector omega = Vector::Zero(A.rows());
    for (Index j = 0; j < A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            if (it.value() != 0.0) omega[it.row()] += 1.0;
    const double spread = static_cast<double>(tau - 1) / static_cast<double>(std::max<Index>(1, n - 1));
    const Vector beta = (1.0 + (omega.array() - 1.0).max(0.0) * spread).matrix();
    return A.cwiseAbs2().transpose() * problem.row_curvature().cwiseProduct(beta);
}

double largest_curvature_eigenvalue(const SparseMatrix& A, const Vector& row_curvature)
{
    const Vector root = row_curvature.cwiseSqrt();
    const SparseMatrix scaled = root.asDiagonal() * A;
    if (A.cols() <= kDenseEigenLimit) {
        const Eigen::MatrixXd gram = Eigen::MatrixXd(SparseMatrix(scaled.transpose() * scaled));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff();
    }
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Vector q(A.cols());
    for (Index i = 0; i < q.size(); ++i) q[i] = normal(rng);
    q.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vector next = scaled.transpose() * (scaled * q);
        const double estimate = q.dot(next);
        const double norm = next.norm();
        if (norm == 0.0) return 0.0;
        q = next / norm;
        const bool settled = it > 0 && std::abs(estimate - lambda) <= 1e-9 * std::abs(estimate);
        lambda = estimate;
        if (settled) break;
    }
    // Rayleigh quotients approach lambda_max from below.
    return lambda * (1.0 + 1e-3);
}

Vector full_gradient_weights(const CompositeProblem& problem)
{
    const double L = largest_curvature_eigenvalue(problem.design().A, problem.row_curvature());
    if (!(L > 0.0)) throw NumericError("full_gradient_weights: vanishing curvature");
    return Vector::Constant(problem.dimension(), L);
}

} // namespace accrestart
