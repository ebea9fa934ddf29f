#ifndef TIKMOR_PNTM_HPP
#define TIKMOR_PNTM_HPP

#include "tikmor/bidiag.hpp"
#include "tikmor/ntm.hpp"

#include <vector>

namespace tikmor
{

struct PntmConfig
{
    double   alpha0          = 1.0;
    /// bound on ||F~|| inside a subspace and on the relative change of alpha
    double   tol             = 1e-3;
    Index    outer_iter_max  = 100;
    /// inner cap is min(k, inner_cap_small) while the warm start misses eps
    Index    inner_cap_small = 10;
    Index    inner_cap_large = 10000;
    /// skip inner steps while the subspace least-squares residual exceeds eps
    bool     hold_unattainable = true;
    StepRule step_rule;
};

struct PntmResult
{
    Vector      x;
    double      alpha            = 0.0;
    SolveStatus status           = SolveStatus::MaxIterations;
    Index       outer_iterations = 0;
    Index       inner_iterations = 0; // summed over all outer iterations
    Index       subspace_dim     = 0;
    /// outer iterations in which alpha was held because eps was out of reach
    Index       held             = 0;
    /// the bidiagonalization broke down before the solver stopped
    bool        breakdown        = false;
    /// one row per warm start (inner_iter 0) and per inner Newton step
    SolveTrace          trace;
    /// projected solution, x = V y
    Vector              y;
    /// alpha at the end of each outer iteration
    std::vector<double> alpha_history;

    bool converged() const noexcept { return status == SolveStatus::Converged; }
};

///
/// Newton's method on the projection of the Tikhonov-Morozov system onto a
/// growing Golub-Kahan subspace. Each outer iteration adds one column to the
/// factorization, warm-starts from the previous alpha and runs a capped number
/// of safeguarded Newton steps on (B, c). Stops once the inner solve converged
/// and alpha has stagnated.
///
PntmResult pntm_solve(const InverseProblem& problem, const PntmConfig& config = {});

/// Rescaled Newton direction for F~ at (y, alpha) on the current subspace.
NewtonDirection projected_newton_system(const BidiagFactorization& f, const Vector& y,
                                        double alpha, double eps);

} // namespace tikmor

#endif // TIKMOR_PNTM_HPP
