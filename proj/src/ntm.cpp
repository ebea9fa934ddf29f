#include "tikmor/ntm.hpp"

#include <cmath>

namespace tikmor
{

NewtonRun newton_iterations(const TikhonovMorozovSystem& system, Vector x, double alpha,
                            const StepRule& rule, double tol, Index max_steps,
                            const std::function<void(const TraceRow&)>& on_step)
{
    NewtonRun run;
    FValue    F = system.evaluate(x, alpha);
    run.f_norm  = F.norm();

    for (Index step = 1; step <= max_steps; ++step)
    {
        NewtonDirection dir;
        try
        {
            dir = system.direction(x, alpha, F);
        }
        catch (const SingularJacobian&)
        {
            run.singular = true;
            break;
        }

        const double dir_norm = std::sqrt(dir.dx.squaredNorm() + dir.dalpha * dir.dalpha);
        if (dir_norm == 0.0)
        {
            // Exact root; nothing left to do.
            run.converged = true;
            break;
        }

        // ||D^{-1}|| at the current iterate (x_{k-1}, a_{k-1})
        const double       dinv     = system.dinv_norm(x, alpha, rule.dinv);
        const StepInterval interval = step_interval(alpha, dir.dalpha, rule.omega);
        double             gram_dx  = 0.0;
        if (rule.variant == StepVariant::Case1)
            gram_dx = (system.gram() * dir.dx).norm();
        const double gamma = step_size(rule.variant, dir.dx, dir.dalpha, interval, dinv, gram_dx);

        x += gamma * dir.dx;
        alpha += gamma * dir.dalpha;

        double res_norm = 0.0;
        F               = system.evaluate(x, alpha, &res_norm);
        run.f_norm      = F.norm();
        run.steps       = step;

        if (on_step)
        {
            TraceRow row;
            row.iter           = step;
            row.alpha          = alpha;
            row.gamma          = gamma;
            row.res_norm       = res_norm;
            row.f_norm         = run.f_norm;
            row.dinv           = dinv;
            row.theta          = interval.theta;
            row.case_id        = interval.case_id;
            row.dir_norm       = dir_norm;
            row.solve_residual = dir.solve_residual;
            on_step(row);
        }

        if (run.f_norm < tol)
        {
            run.converged = true;
            break;
        }
    }
    run.x     = std::move(x);
    run.alpha = alpha;
    return run;
}

NtmResult ntm_solve(const InverseProblem& problem, const NtmConfig& config)
{
    const double eps = problem.discrepancy();
    if (!(eps > 0.0))
        throw Error("NTM requires a positive noise level");
    if (eps >= problem.rhs.norm())
        throw InfeasibleDiscrepancy("noise level is not below ||b||; no alpha > 0 satisfies the "
                                    "discrepancy principle");
    if (!(config.alpha0 > 0.0) || !(config.tol > 0.0) || config.max_iter < 1)
        throw Error("NTM configuration requires alpha0 > 0, tol > 0 and max_iter >= 1");

    TikhonovMorozovSystem system(problem.op, problem.rhs, eps);

    NtmResult result;
    Vector    x0 = normal_equation_solve(problem.op, problem.rhs, config.alpha0);

    double res0 = 0.0;
    FValue F0   = system.evaluate(x0, config.alpha0, &res0);
    TraceRow start;
    start.iter     = 0;
    start.alpha    = config.alpha0;
    start.res_norm = res0;
    start.f_norm   = F0.norm();
    result.trace.push_back(start);

    NewtonRun run = newton_iterations(system, std::move(x0), config.alpha0, config.step_rule,
                                      config.tol, config.max_iter,
                                      [&](const TraceRow& row) { result.trace.push_back(row); });

    result.x          = std::move(run.x);
    result.alpha      = run.alpha;
    result.iterations = run.steps;
    if (run.singular)
        result.status = SolveStatus::SingularJacobian;
    else if (run.converged)
        result.status = SolveStatus::Converged;
    else
        result.status = SolveStatus::MaxIterations;
    return result;
}

} // namespace tikmor
