#ifndef TIKMOR_TIKHONOV_MOROZOV_HPP
#define TIKMOR_TIKHONOV_MOROZOV_HPP

#include "tikmor/linop.hpp"

#include <cmath>

namespace tikmor
{

//
// Building blocks of Newton's method on the coupled system
//
//   F1(x, a) = (A^T A + a I) x - A^T b
//   F2(x, a) = 1/2 ||Ax - b||^2 - 1/2 eps^2
//
// shared by the full-space and projected solvers.
//

struct FValue
{
    Vector f1;
    double f2 = 0.0;

    /// Euclidean norm of the stacked vector (F1; F2)
    double norm() const { return std::sqrt(f1.squaredNorm() + f2 * f2); }
};

FValue eval_F(const LinearOperator& A, const Vector& b, double eps, const Vector& x, double alpha);

enum class StepVariant
{
    /// keeps the Jacobian invertible and shrinks the search direction
    Case1,
    /// keeps the Jacobian invertible only; larger steps
    Case2
};

enum class DInvMode
{
    /// exact ||D^{-1}||
    Exact,
    /// closed-form upper bound from the Schur factorization of D
    Bound
};

struct StepRule
{
    StepVariant variant = StepVariant::Case2;
    double      omega   = 0.9;
    DInvMode    dinv    = DInvMode::Exact;
};

struct StepInterval
{
    double gamma_max = 1.0;
    /// bound on sqrt(1 + zeta^2)
    double theta     = 0.0;
    /// which branch of the interval applied: 1 (da >= 0), 2 (a + da > 0), 3 (a + da <= 0)
    int    case_id   = 1;
};

/// Largest admissible step and the matching theta for the alpha update da.
StepInterval step_interval(double alpha_prev, double delta_alpha, double omega);

///
/// Safeguarded step size gamma in (0, gamma_max].
///
/// Case1: 1 / ((sqrt(da^2 + ||A^T A dx||^2 / 4) + |da| + theta ||dx||) dinv)
/// Case2: 1 / ((|da| + theta ||dx||) dinv)
///
/// `gram_dx_norm` is ||A^T A dx||; only Case1 reads it.
///
double step_size(StepVariant variant, const Vector& dx, double delta_alpha,
                 const StepInterval& interval, double dinv, double gram_dx_norm);

double step_size(StepVariant variant, const Vector& dx, double delta_alpha,
                 const StepInterval& interval, double dinv, const LinearOperator& A);

//
// D(x, a) = [A^T A + a I, x; -x^T, 0], the rescaled Jacobian on the
// discrepancy curve.
//

Matrix d_matrix(const Matrix& gram, const Vector& x, double alpha);

/// D^{-1} through the Schur complement s = x^T (A^T A + a I)^{-1} x.
Matrix d_inverse_schur(const Matrix& gram, const Vector& x, double alpha);

/// 1 / sigma_min(D) from a dense SVD.
double dinv_norm_svd(const Matrix& gram, const Vector& x, double alpha);

/// (1 + ||x||/a)^2 max{1/a, (a + lambda_max) / ||x||^2}
double dinv_norm_bound(double x_norm, double alpha, double lambda_max);

/// Power-iteration estimate of the largest eigenvalue of A^T A, nudged up by
/// the final eigen-residual. At least 50 steps are taken.
double estimate_lambda_max(const LinearOperator& A, int steps = 100);

///
/// ||D(x, a)^{-1}|| for an operator. Exact mode uses a dense SVD; the bound
/// mode estimates lambda_max by power iteration and falls back to the exact
/// value when x = 0.
///
double dinv_norm(const LinearOperator& A, const Vector& x, double alpha, DInvMode mode);

///
/// Eigendecomposition A^T A = Q diag(lambda) Q^T, computed once and reused for
/// every shift a.
///
/// In the eigenbasis D is an arrowhead matrix and D^{-1} is a diagonal plus a
/// rank-one term, so ||D^{-1}|| follows from an O(n) inertia count per
/// bisection step instead of an O(n^3) SVD.
///
class GramSpectrum
{
public:
    explicit GramSpectrum(const Matrix& gram);

    Index         dim() const noexcept { return lambda_.size(); }
    const Vector& eigenvalues() const noexcept { return lambda_; }
    const Matrix& eigenvectors() const noexcept { return Q_; }
    double        lambda_max() const noexcept;

    /// (A^T A + a I)^{-1} rhs
    Vector solve_shifted(const Vector& rhs, double alpha) const;

    /// exact ||D(x, a)^{-1}||; +inf when x = 0
    double dinv_norm(const Vector& x, double alpha) const;

private:
    Vector lambda_;
    Matrix Q_;
};

struct NewtonDirection
{
    Vector dx;
    double dalpha = 0.0;
    /// ||J d + rhs|| / ||rhs|| of the rescaled system
    double solve_residual = 0.0;
};

///
/// Dense route: assembles the rescaled Jacobian
///
///   [A^T A + a I, x; (Ax - b)^T A / a, 0] (dx; da) = -(F1; F2 / a)
///
/// and solves it by full-pivot LU. Throws SingularJacobian on rank loss.
///
NewtonDirection solve_newton_system(const LinearOperator& A, const Vector& b, double eps,
                                    const Vector& x, double alpha);

///
/// The coupled system for one (A, b, eps), with A^T A and its spectrum cached.
/// Used directly by the full-space solver and, on (B, c), by the projected one.
///
class TikhonovMorozovSystem
{
public:
    TikhonovMorozovSystem(LinearOperator A, Vector b, double eps);

    const LinearOperator& op() const noexcept { return A_; }
    const Vector&         rhs() const noexcept { return b_; }
    double                eps() const noexcept { return eps_; }
    const Matrix&         gram() const noexcept { return gram_; }
    const GramSpectrum&   spectrum() const noexcept { return spectrum_; }

    /// F at (x, a); writes ||Ax - b|| to *residual_norm when given.
    FValue evaluate(const Vector& x, double alpha, double* residual_norm = nullptr) const;

    /// Newton direction from the rescaled Jacobian, solved in the eigenbasis.
    NewtonDirection direction(const Vector& x, double alpha, const FValue& F) const;

    double dinv_norm(const Vector& x, double alpha, DInvMode mode) const;

    /// Tikhonov solution x_a
    Vector tikhonov_solution(double alpha) const;

private:
    LinearOperator A_;
    Vector         b_;
    Vector         atb_;
    double         eps_;
    Matrix         gram_;
    GramSpectrum   spectrum_;
};

} // namespace tikmor

#endif // TIKMOR_TIKHONOV_MOROZOV_HPP
