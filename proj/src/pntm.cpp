#include "tikmor/pntm.hpp"

#include <algorithm>
#include <cmath>

namespace tikmor
{

namespace
{

// min_y ||B y - beta e_1|| for lower bidiagonal B via the Givens recurrence
double bidiagonal_ls_residual(const Matrix& B, double beta)
{
    double rho_bar = B(0, 0);
    double phi_bar = beta;
    for (Index i = 0; i < B.cols(); ++i)
    {
        const double nu  = B(i + 1, i);
        const double rho = std::hypot(rho_bar, nu);
        if (rho == 0.0)
            return phi_bar;
        phi_bar *= nu / rho;
        if (i + 1 < B.cols())
            rho_bar = -(rho_bar / rho) * B(i + 1, i + 1);
    }
    return std::abs(phi_bar);
}

} // namespace

NewtonDirection projected_newton_system(const BidiagFactorization& f, const Vector& y,
                                        double alpha, double eps)
{
    if (f.k() < 1)
        throw DimensionError("projected system needs at least one basis vector");
    if (y.size() != f.k())
        throw DimensionError("projected iterate length does not match the subspace");
    return solve_newton_system(LinearOperator(f.B()), f.c(), eps, y, alpha);
}

PntmResult pntm_solve(const InverseProblem& problem, const PntmConfig& config)
{
    const double eps = problem.discrepancy();
    if (!(eps > 0.0))
        throw Error("PNTM requires a positive noise level");
    if (eps >= problem.rhs.norm())
        throw InfeasibleDiscrepancy("noise level is not below ||b||");
    if (!(config.alpha0 > 0.0) || !(config.tol > 0.0) || config.outer_iter_max < 1 ||
        config.inner_cap_small < 1 || config.inner_cap_small > config.inner_cap_large)
        throw Error("invalid PNTM configuration");

    const LinearOperator& A = problem.op;
    BidiagFactorization   fact(A, problem.rhs);

    PntmResult result;
    double     alpha = config.alpha0;
    Vector     y;
    Index      row_id = 0;

    for (Index k = 1; k <= config.outer_iter_max; ++k)
    {
        fact.expand(A);
        if (fact.k() == 0)
            throw Error("bidiagonalization produced no basis vector");
        result.breakdown = fact.final() && fact.k() < A.cols();
        result.outer_iterations = k;

        const Matrix          B = fact.B();
        TikhonovMorozovSystem sub(LinearOperator(B), fact.c(), eps);

        const double alpha_prev = alpha;
        y                       = sub.tikhonov_solution(alpha);

        double proj_res = 0.0;
        FValue F0       = sub.evaluate(y, alpha, &proj_res);

        TraceRow warm;
        warm.iter         = row_id++;
        warm.alpha        = alpha;
        warm.f_norm       = F0.norm();
        warm.outer_iter   = k;
        warm.inner_iter   = 0;
        warm.subspace_dim = fact.k();
        warm.proj_res     = proj_res;
        result.trace.push_back(warm);

        // No alpha > 0 reaches eps in this subspace: Newton would only shrink
        // alpha towards zero, so keep it and expand.
        const bool unattainable = config.hold_unattainable && proj_res > eps &&
                                  bidiagonal_ls_residual(B, fact.rhs_norm()) > eps;

        const Index cap = proj_res > eps ? std::min(k, config.inner_cap_small)
                                         : config.inner_cap_large;

        bool inner_converged = F0.norm() < config.tol;
        if (unattainable)
            ++result.held;
        else if (!inner_converged)
        {
            Index     inner = 0;
            NewtonRun run   = newton_iterations(
                sub, y, alpha, config.step_rule, config.tol, cap, [&](const TraceRow& step) {
                    TraceRow row     = step;
                    row.iter         = row_id++;
                    row.res_norm     = TraceRow::nan;
                    row.outer_iter   = k;
                    row.inner_iter   = ++inner;
                    row.subspace_dim = fact.k();
                    row.proj_res     = step.res_norm;
                    result.trace.push_back(row);
                });
            result.inner_iterations += run.steps;
            y               = std::move(run.x);
            alpha           = run.alpha;
            inner_converged = run.converged;
            if (run.singular)
            {
                result.status = SolveStatus::SingularJacobian;
                break;
            }
        }

        // Full-space residual of the lifted iterate closes each outer iteration.
        result.trace.back().res_norm = (A.apply(fact.lift(y)) - problem.rhs).norm();
        result.alpha_history.push_back(alpha);

        const double change = std::abs(alpha - alpha_prev) / std::max(alpha_prev, 1e-300);
        if (inner_converged && change < config.tol)
        {
            result.status = SolveStatus::Converged;
            break;
        }
    }

    result.subspace_dim = fact.k();
    result.alpha        = alpha;
    result.y            = y;
    result.x            = fact.lift(y);
    return result;
}

} // namespace tikmor
