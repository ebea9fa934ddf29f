#include "tikmor/reference.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

namespace tikmor
{

double gbit_alpha_update(double eps, double r_z, double r_y, double alpha_prev)
{
    double denom = r_y - r_z;
    if (!(std::abs(denom) > 1e-14 * std::max({r_y, r_z, eps})))
        return alpha_prev;
    double next = std::abs((eps - r_z) / denom) * alpha_prev;
    if (!(next > 0.0) || !std::isfinite(next))
        return alpha_prev;
    return next;
}

GbitResult gbit_solve(const InverseProblem& problem, const GbitConfig& config)
{
    const double eps = problem.discrepancy();
    if (!(eps > 0.0))
        throw Error("GBiT requires a positive noise level");
    if (eps >= problem.rhs.norm())
        throw InfeasibleDiscrepancy("noise level is not below ||b||");
    if (!(config.alpha0 > 0.0) || !(config.tol > 0.0) || config.max_iter < 1)
        throw Error("invalid GBiT configuration");

    const LinearOperator& A = problem.op;
    BidiagFactorization   fact(A, problem.rhs);

    GbitResult result;
    double     alpha = config.alpha0;
    Vector     y;

    for (Index k = 1; k <= config.max_iter; ++k)
    {
        fact.expand(A);
        const Index kk = fact.k();
        if (kk == 0)
            throw Error("bidiagonalization produced no basis vector");
        result.breakdown  = fact.final() && kk < A.cols();
        result.iterations = k;

        const Matrix B = fact.B();
        const Vector c = fact.c();

        // Unregularized projected least squares (the LSQR iterate).
        Vector z   = B.completeOrthogonalDecomposition().solve(c);
        double r_z = (B * z - c).norm();

        // Projected Tikhonov at alpha_{k-1}: min ||[B; sqrt(a) I] y - [c; 0]||.
        Matrix S(kk + 1 + kk, kk);
        S.topRows(kk + 1)  = B;
        S.bottomRows(kk)   = std::sqrt(alpha) * Matrix::Identity(kk, kk);
        Vector rhs         = Vector::Zero(2 * kk + 1);
        rhs.head(kk + 1)   = c;
        y                  = S.householderQr().solve(rhs);
        double r_y         = (B * y - c).norm();

        const double alpha_prev = alpha;
        alpha                   = gbit_alpha_update(eps, r_z, r_y, alpha_prev);
        if (alpha == alpha_prev)
            ++result.held;

        // F~ at (y_k, alpha_k): F~1 reduces to (alpha_k - alpha_{k-1}) y_k.
        Vector f1     = B.transpose() * (B * y - c) + alpha * y;
        double f2     = 0.5 * r_y * r_y - 0.5 * eps * eps;
        double f_norm = std::sqrt(f1.squaredNorm() + f2 * f2);

        TraceRow row;
        row.iter         = k;
        row.alpha        = alpha;
        row.res_norm     = r_y;
        row.f_norm       = f_norm;
        row.outer_iter   = k;
        row.subspace_dim = kk;
        row.proj_res     = r_z;
        result.trace.push_back(row);

        const double change = std::abs(alpha - alpha_prev) / std::max(alpha_prev, 1e-300);
        if (f_norm < config.tol && change < config.tol)
        {
            result.status = SolveStatus::Converged;
            break;
        }
    }

    result.alpha = alpha;
    result.x     = fact.lift(y);
    return result;
}

SirtWeights sirt_weights(const LinearOperator& A)
{
    SirtWeights w;
    Vector      rows = Vector::Zero(A.rows());
    Vector      cols = Vector::Zero(A.cols());

    if (auto s = A.sparse())
    {
        for (Index j = 0; j < s->outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(*s, j); it; ++it)
                w.absolute_sums = w.absolute_sums || it.value() < 0.0;
        for (Index j = 0; j < s->outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(*s, j); it; ++it)
            {
                double v = w.absolute_sums ? std::abs(it.value()) : it.value();
                rows[it.row()] += v;
                cols[j] += v;
            }
    }
    else if (auto d = A.dense())
    {
        w.absolute_sums = (d->array() < 0.0).any();
        if (w.absolute_sums)
        {
            rows = d->cwiseAbs().rowwise().sum();
            cols = d->cwiseAbs().colwise().sum().transpose();
        }
        else
        {
            rows = d->rowwise().sum();
            cols = d->colwise().sum().transpose();
        }
    }
    else
        throw Error("SIRT needs explicit matrix entries");

    for (Index i = 0; i < rows.size(); ++i)
        if (!(rows[i] > 0.0))
            throw DimensionError("SIRT: row " + std::to_string(i) + " of A sums to zero");
    for (Index j = 0; j < cols.size(); ++j)
        if (!(cols[j] > 0.0))
            throw DimensionError("SIRT: column " + std::to_string(j) + " of A sums to zero");

    w.row = rows.cwiseInverse();
    w.col = cols.cwiseInverse();
    return w;
}

IterativeResult sirt_solve(const InverseProblem& problem, Index max_iter, bool stop_at_discrepancy)
{
    if (max_iter < 0)
        throw Error("SIRT: max_iter must be nonnegative");
    const LinearOperator& A   = problem.op;
    const SirtWeights     w   = sirt_weights(A);
    const double          eps = problem.discrepancy();

    IterativeResult result;
    result.x = Vector::Zero(A.cols());
    Vector r = problem.rhs;

    auto record = [&](Index k, double res) {
        TraceRow row;
        row.iter     = k;
        row.res_norm = res;
        result.trace.push_back(row);
    };

    double res = r.norm();
    record(0, res);
    if (stop_at_discrepancy && res <= eps)
    {
        result.status = SolveStatus::Converged;
        return result;
    }
    for (Index k = 1; k <= max_iter; ++k)
    {
        result.x += w.col.cwiseProduct(A.apply_transpose(w.row.cwiseProduct(r)));
        r                 = problem.rhs - A.apply(result.x);
        res               = r.norm();
        result.iterations = k;
        record(k, res);
        if (stop_at_discrepancy && res <= eps)
        {
            result.status = SolveStatus::Converged;
            return result;
        }
    }
    result.status = stop_at_discrepancy ? SolveStatus::MaxIterations : SolveStatus::Completed;
    return result;
}

IterativeResult cgls(const LinearOperator& op, const Vector& rhs, double eps, Index max_iter)
{
    if (rhs.size() != op.rows())
        throw DimensionError("CGLS: right-hand side length does not match operator rows");
    if (max_iter < 0)
        throw Error("CGLS: max_iter must be nonnegative");

    IterativeResult result;
    result.x = Vector::Zero(op.cols());
    Vector r = rhs;
    Vector s = op.apply_transpose(r);
    Vector p = s;
    double gamma = s.squaredNorm();

    auto record = [&](Index k, double res) {
        TraceRow row;
        row.iter     = k;
        row.res_norm = res;
        result.trace.push_back(row);
    };

    double res = r.norm();
    record(0, res);
    if (res <= eps)
    {
        result.status = SolveStatus::Converged;
        return result;
    }
    for (Index k = 1; k <= max_iter; ++k)
    {
        if (gamma == 0.0)
            break; // least-squares solution reached above eps
        Vector q    = op.apply(p);
        double qq   = q.squaredNorm();
        if (qq == 0.0)
            break;
        double step = gamma / qq;
        result.x += step * p;
        r -= step * q;
        s                = op.apply_transpose(r);
        double gamma_new = s.squaredNorm();
        p                = s + (gamma_new / gamma) * p;
        gamma            = gamma_new;

        res               = r.norm();
        result.iterations = k;
        record(k, res);
        if (res <= eps)
        {
            result.status = SolveStatus::Converged;
            return result;
        }
    }
    result.status = SolveStatus::MaxIterations;
    return result;
}

IterativeResult cgls_priorconditioned(const InverseProblem& problem, const RegularizationMatrix& L,
                                      const Vector& x0, Index max_iter)
{
    const double eps = problem.discrepancy();
    if (!(eps > 0.0))
        throw Error("CGLS requires a positive noise level");
    LinearOperator Abar = make_priorconditioned(problem.op, L, x0);
    const auto*    pc   = Abar.priorconditioned();

    IterativeResult result = cgls(Abar, pc->effective_rhs(problem.rhs), eps, max_iter);
    result.x               = pc->recover(result.x);
    return result;
}

} // namespace tikmor
