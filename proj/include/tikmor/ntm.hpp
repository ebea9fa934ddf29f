#ifndef TIKMOR_NTM_HPP
#define TIKMOR_NTM_HPP

#include "tikmor/problems.hpp"
#include "tikmor/tikhonov_morozov.hpp"
#include "tikmor/trace.hpp"

#include <functional>

namespace tikmor
{

struct NtmConfig
{
    double   alpha0   = 1.0;
    /// stop once ||F(x_k, a_k)|| < tol
    double   tol      = 1e-3;
    Index    max_iter = 1000;
    StepRule step_rule;
};

struct NtmResult
{
    Vector      x;
    double      alpha      = 0.0;
    SolveStatus status     = SolveStatus::MaxIterations;
    Index       iterations = 0;
    /// row 0 is the starting point on the discrepancy curve
    SolveTrace  trace;

    bool converged() const noexcept { return status == SolveStatus::Converged; }
};

///
/// Newton's method on the Tikhonov-Morozov system from the Tikhonov solution
/// at alpha0, with step sizes safeguarded so that alpha stays positive and
/// the Jacobian stays invertible.
///
/// Throws InfeasibleDiscrepancy when eta * eps >= ||b|| and Error when eps <= 0.
///
NtmResult ntm_solve(const InverseProblem& problem, const NtmConfig& config = {});

/// Outcome of a run of safeguarded Newton steps on one system.
struct NewtonRun
{
    Vector x;
    double alpha     = 0.0;
    Index  steps     = 0;
    bool   converged = false;
    bool   singular  = false;
    double f_norm    = 0.0;
};

///
/// Up to `max_steps` safeguarded Newton steps from (x, alpha), stopping after
/// the first step with ||F|| < tol. `on_step` receives one row per step.
///
NewtonRun newton_iterations(const TikhonovMorozovSystem& system, Vector x, double alpha,
                            const StepRule& rule, double tol, Index max_steps,
                            const std::function<void(const TraceRow&)>& on_step = {});

} // namespace tikmor

#endif // TIKMOR_NTM_HPP
