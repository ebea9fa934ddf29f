#ifndef TIKMOR_REFERENCE_HPP
#define TIKMOR_REFERENCE_HPP

#include "tikmor/bidiag.hpp"
#include "tikmor/problems.hpp"
#include "tikmor/trace.hpp"

#include <vector>

namespace tikmor
{

//
// Comparison solvers: the bidiagonal-Tikhonov secant method, SIRT and
// (priorconditioned) CGLS with discrepancy stopping.
//

struct GbitConfig
{
    double alpha0   = 1.0;
    double tol      = 1e-3;
    Index  max_iter = 100;
};

struct GbitResult
{
    Vector      x;
    double      alpha      = 0.0;
    SolveStatus status     = SolveStatus::MaxIterations;
    Index       iterations = 0;
    bool        breakdown  = false;
    /// iterations where the secant was degenerate and alpha was held
    Index       held       = 0;
    /// Extended schema: res_norm = r(y_k), proj_res = r(z_k)
    SolveTrace  trace;

    bool converged() const noexcept { return status == SolveStatus::Converged; }
};

///
/// Per Krylov iteration: z_k = argmin ||B z - c||, y_k the projected Tikhonov
/// solution at alpha_{k-1}, then the secant update
///
///   alpha_k = |(eps - r(z_k)) / (r(y_k) - r(z_k))| alpha_{k-1}.
///
GbitResult gbit_solve(const InverseProblem& problem, const GbitConfig& config = {});

/// The secant update above; returns alpha_prev when it is undefined or not positive.
double gbit_alpha_update(double eps, double r_z, double r_y, double alpha_prev);

struct SirtWeights
{
    Vector row; // R = diag(row), inverse row sums
    Vector col; // C = diag(col), inverse column sums
    /// sums were taken over |a_ij| because A has negative entries
    bool   absolute_sums = false;
};

/// Throws DimensionError naming the first zero row or column.
SirtWeights sirt_weights(const LinearOperator& A);

struct IterativeResult
{
    Vector      x;
    SolveStatus status     = SolveStatus::MaxIterations;
    Index       iterations = 0;
    /// Newton schema with iter, res_norm filled; row 0 is the start
    SolveTrace  trace;

    bool converged() const noexcept { return status == SolveStatus::Converged; }
};

///
/// x_{k+1} = x_k + C A^T R (b - A x_k) from x_0 = 0. With `stop_at_discrepancy`
/// the iteration stops at the first ||A x_k - b|| <= eta eps; otherwise it runs
/// max_iter steps and reports Completed.
///
IterativeResult sirt_solve(const InverseProblem& problem, Index max_iter,
                           bool stop_at_discrepancy = true);

/// CGLS on op z = rhs from z = 0, stopping at the first ||op z - rhs|| <= eps.
IterativeResult cgls(const LinearOperator& op, const Vector& rhs, double eps, Index max_iter);

///
/// CGLS on A L^{-1} z = b - A x0 with discrepancy stopping; returns
/// x = x0 + L^{-1} z.
///
IterativeResult cgls_priorconditioned(const InverseProblem& problem, const RegularizationMatrix& L,
                                      const Vector& x0, Index max_iter);

} // namespace tikmor

#endif // TIKMOR_REFERENCE_HPP
