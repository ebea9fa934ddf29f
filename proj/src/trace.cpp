#include "tikmor/trace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace tikmor
{

std::string_view to_string(SolveStatus status) noexcept
{
    switch (status)
    {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::Completed: return "completed";
        case SolveStatus::MaxIterations: return "max_iterations";
        case SolveStatus::SingularJacobian: return "singular_jacobian";
    }
    return "unknown";
}

namespace
{

void put(std::ostream& out, double v)
{
    if (std::isnan(v))
        return;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out << buf;
}

} // namespace

void write_trace_csv(std::ostream& out, const SolveTrace& trace, TraceSchema schema)
{
    out << "iter,alpha,gamma,res_norm,F_norm,dinv,theta,case_id";
    if (schema == TraceSchema::Extended)
        out << ",outer_iter,inner_iter,subspace_dim,proj_res";
    out << '\n';
    for (const auto& row : trace)
    {
        out << row.iter << ',';
        put(out, row.alpha);
        out << ',';
        put(out, row.gamma);
        out << ',';
        put(out, row.res_norm);
        out << ',';
        put(out, row.f_norm);
        out << ',';
        put(out, row.dinv);
        out << ',';
        put(out, row.theta);
        out << ',' << row.case_id;
        if (schema == TraceSchema::Extended)
        {
            out << ',' << row.outer_iter << ',' << row.inner_iter << ',' << row.subspace_dim << ',';
            put(out, row.proj_res);
        }
        out << '\n';
    }
}

} // namespace tikmor
