#pragma once

#include <memory>
#include <optional>

#include "accrestart/types.hpp"

namespace accrestart {

/// Design matrix (m samples x n features, compressed columns) and targets.
struct SparseDesign {
    SparseMatrix A;
    Vector b;

    Index rows() const { return A.rows(); }
    Index cols() const { return A.cols(); }

    /// Throws ConfigError on zero-width dimensions, a row/target size mismatch,
    /// non-finite entries or (when requested) an all-zero column.
    void validate(bool reject_empty_columns = true) const;
};

/// ||A^T b||_inf.
double max_abs_correlation(const SparseDesign& design);

/// ||x||_v^2 = sum_i v_i x_i^2.
template <class DerivedX, class DerivedV>
double weighted_norm_sq(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedV>& v)
{
    if (x.size() != v.size()) throw ConfigError("weighted_norm_sq: length mismatch");
    return (v.array() * x.array().square()).sum();
}

/// Separable regularizer psi^i(t) = l1 |t| + (l2 / 2) t^2, identical on every coordinate.
struct ElasticRegularizer {
    double l1 = 0.0;
    double l2 = 0.0;

    double value(double t) const;
    double value(const Vector& x) const;
};

/// argmin_z  g (z - center) + (weight / 2)(z - center)^2 + psi^i(z).
double prox_coordinate(const ElasticRegularizer& reg, Index i, double g, double center, double weight);

/// Componentwise prox: argmin_z <g, z - center> + 0.5 ||z - center||_w^2 + psi(z).
Vector prox_full(const ElasticRegularizer& reg, const Vector& g, const Vector& center, const Vector& weights);

enum class Loss { squared, logistic };

struct ReferenceSolution {
    Vector x;
    double F = 0.0;
};

/// F(x) = f(x) + psi(x) with f(x) = sum_j phi_j((A x)_j):
///   squared:  phi_j(s) = 0.5 (s - b_j)^2
///   logistic: phi_j(s) = scale * log(1 + exp(b_j s))
/// Immutable; copies share the design.
class CompositeProblem {
public:
    CompositeProblem(std::shared_ptr<const SparseDesign> design, Loss loss, double loss_scale,
                     ElasticRegularizer reg, Vector v, double strong_convexity_modulus);

    Index dimension() const { return design_->cols(); }
    Index samples() const { return design_->rows(); }
    const SparseDesign& design() const { return *design_; }
    Loss loss() const { return loss_; }
    double loss_scale() const { return loss_scale_; }
    const ElasticRegularizer& regularizer() const { return reg_; }

    /// Step weights (ESO vector).
    const Vector& v() const { return v_; }
    /// Euclidean quadratic-growth modulus of F (0 when unknown).
    double strong_convexity_modulus() const { return modulus_; }
    /// Quadratic-growth constant in ||.||_v, i.e. modulus / max_i v_i.
    double mu_F() const;

    const std::optional<ReferenceSolution>& reference() const { return reference_; }

    CompositeProblem with_weights(Vector v) const;
    CompositeProblem with_reference(ReferenceSolution ref) const;

    double smooth_value(const Vector& x) const;
    double objective(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    double partial_derivative(const Vector& x, Index i) const;

    // Predictor-space oracles; coordinate methods keep A x cached.
    Vector predictor(const Vector& x) const { return design_->A * x; }
    double smooth_value_at_predictor(const Vector& ax) const;
    Vector loss_derivative(const Vector& ax) const;
    /// phi_row'(s).
    double row_loss_derivative(double s, Index row) const;
    Vector gradient_at_predictor(const Vector& ax) const;
    double partial_at_predictor(const Vector& ax, Index i) const;

    /// Upper bound on phi_j'' per sample.
    Vector row_curvature() const;

private:
    std::shared_ptr<const SparseDesign> design_;
    Loss loss_;
    double loss_scale_;
    ElasticRegularizer reg_;
    Vector v_;
    double modulus_;
    std::optional<ReferenceSolution> reference_;
};

/// lambda = ||A^T b||_inf / 10.
double default_lasso_weight(const SparseDesign& design);

/// 0.5 ||A x - b||^2 + reg_weight ||x||_1 + (l2 / 2) ||x||^2 with serial
/// coordinate weights v_i = ||A_{:,i}||^2.
CompositeProblem lasso_problem(SparseDesign design, double reg_weight, double l2 = 0.0);

/// lambda1 / (2 ||A^T b||_inf) sum_j log(1 + exp(b_j a_j^T x)) + ||x||_1 + (lambda2 / 2)||x||^2
/// with serial coordinate weights v_i = lambda1 / (8 ||A^T b||_inf) sum_j (b_j A_ji)^2.
CompositeProblem logistic_problem(SparseDesign design, double lambda1, double lambda2);

/// Serial (tau = 1) coordinate weights: v_i = sum_j c_j A_ji^2.
Vector coordinate_weights(const CompositeProblem& problem);

/// tau-nice weights v_i = sum_j c_j (1 + (omega_j - 1)(tau - 1) / max(1, n - 1)) A_ji^2,
/// omega_j the number of nonzeros in row j.
Vector tau_nice_weights(const CompositeProblem& problem, Index tau);

/// Scalar Lipschitz weights L * (1, ..., 1), L = lambda_max(A^T C A).
Vector full_gradient_weights(const CompositeProblem& problem);

/// Largest eigenvalue of A^T diag(c) A. Exact dense solve for n <= 1000,
/// power iteration (200 steps or relative change < 1e-9) above that.
double largest_curvature_eigenvalue(const SparseMatrix& A, const Vector& row_curvature);

} // namespace accrestart
