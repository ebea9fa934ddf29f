#ifndef TIKMOR_TRACE_HPP
#define TIKMOR_TRACE_HPP

#include "tikmor/core.hpp"

#include <iosfwd>
#include <limits>
#include <string_view>
#include <vector>

namespace tikmor
{

enum class SolveStatus
{
    Converged,
    /// ran a fixed number of iterations by request (no stopping rule)
    Completed,
    MaxIterations,
    SingularJacobian
};

std::string_view to_string(SolveStatus status) noexcept;

/// One iteration of any solver. Fields a solver does not produce stay NaN / 0.
struct TraceRow
{
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    Index  iter     = 0;
    double alpha    = nan;
    double gamma    = nan;
    double res_norm = nan;
    double f_norm   = nan;
    double dinv     = nan;
    double theta    = nan;
    /// branch of the step interval (1..3), 0 when not applicable
    int    case_id  = 0;

    Index  outer_iter   = 0;
    Index  inner_iter   = 0;
    Index  subspace_dim = 0;
    double proj_res     = nan;

    // In-memory only.
    double dir_norm       = nan; // ||(dx, da)||
    double solve_residual = nan; // relative residual of the Newton solve
};

using SolveTrace = std::vector<TraceRow>;

enum class TraceSchema
{
    /// iter, alpha, gamma, res_norm, F_norm, dinv, theta, case_id
    Newton,
    /// Newton columns followed by outer_iter, inner_iter, subspace_dim, proj_res
    Extended
};

/// CSV with a header line; NaN fields are written as empty cells.
void write_trace_csv(std::ostream& out, const SolveTrace& trace, TraceSchema schema);

} // namespace tikmor

#endif // TIKMOR_TRACE_HPP
