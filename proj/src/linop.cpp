#include "tikmor/linop.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <limits>
#include <variant>

namespace tikmor
{

//
// RegularizationMatrix
//

RegularizationMatrix RegularizationMatrix::first_difference(Index n)
{
    if (n < 1)
        throw DimensionError("regularization matrix needs n >= 1");
    return RegularizationMatrix(n, Kind::FirstDifference);
}

RegularizationMatrix RegularizationMatrix::identity(Index n)
{
    if (n < 1)
        throw DimensionError("regularization matrix needs n >= 1");
    return RegularizationMatrix(n, Kind::Identity);
}

namespace
{

void check_length(Index expected, Index got, const char* what)
{
    if (expected != got)
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                             ", got " + std::to_string(got));
}

} // namespace

Vector RegularizationMatrix::apply(const Vector& z) const
{
    check_length(n_, z.size(), "RegularizationMatrix::apply");
    if (kind_ == Kind::Identity)
        return z;
    Vector w(n_);
    for (Index i = 0; i + 1 < n_; ++i)
        w[i] = -z[i] + z[i + 1];
    w[n_ - 1] = -z[n_ - 1];
    return w;
}

Vector RegularizationMatrix::apply_transpose(const Vector& z) const
{
    check_length(n_, z.size(), "RegularizationMatrix::apply_transpose");
    if (kind_ == Kind::Identity)
        return z;
    Vector w(n_);
    w[0] = -z[0];
    for (Index i = 1; i < n_; ++i)
        w[i] = z[i - 1] - z[i];
    return w;
}

Vector RegularizationMatrix::solve(const Vector& w) const
{
    check_length(n_, w.size(), "RegularizationMatrix::solve");
    if (kind_ == Kind::Identity)
        return w;
    // -z_i + z_{i+1} = w_i, -z_n = w_n
    Vector z(n_);
    z[n_ - 1] = -w[n_ - 1];
    for (Index i = n_ - 2; i >= 0; --i)
        z[i] = z[i + 1] - w[i];
    return z;
}

Vector RegularizationMatrix::solve_transpose(const Vector& w) const
{
    check_length(n_, w.size(), "RegularizationMatrix::solve_transpose");
    if (kind_ == Kind::Identity)
        return w;
    // -z_1 = w_1, z_{i-1} - z_i = w_i
    Vector z(n_);
    z[0] = -w[0];
    for (Index i = 1; i < n_; ++i)
        z[i] = z[i - 1] - w[i];
    return z;
}

Matrix RegularizationMatrix::to_dense() const
{
    if (kind_ == Kind::Identity)
        return Matrix::Identity(n_, n_);
    Matrix L = -Matrix::Identity(n_, n_);
    for (Index i = 0; i + 1 < n_; ++i)
        L(i, i + 1) = 1.0;
    return L;
}

Vector apply_inverse(const RegularizationMatrix& L, const Vector& w)
{
    return L.solve(w);
}

//
// LinearOperator
//

struct LinearOperator::Rep
{
    std::variant<Matrix, SparseMatrix, std::shared_ptr<const PriorconditionedOperator>> op;
};

LinearOperator::LinearOperator(Matrix a)
    : rep_(std::make_shared<const Rep>(Rep{std::move(a)}))
{
    const auto& m = std::get<Matrix>(rep_->op);
    rows_         = m.rows();
    cols_         = m.cols();
    if (rows_ < 1 || cols_ < 1)
        throw DimensionError("operator dimensions must be positive");
}

LinearOperator::LinearOperator(SparseMatrix a)
{
    a.makeCompressed();
    rep_          = std::make_shared<const Rep>(Rep{std::move(a)});
    const auto& m = std::get<SparseMatrix>(rep_->op);
    rows_         = m.rows();
    cols_         = m.cols();
    if (rows_ < 1 || cols_ < 1)
        throw DimensionError("operator dimensions must be positive");
}

LinearOperator::LinearOperator(std::shared_ptr<const PriorconditionedOperator> op)
{
    if (!op)
        throw Error("null priorconditioned operator");
    rows_ = op->rows();
    cols_ = op->cols();
    rep_  = std::make_shared<const Rep>(Rep{std::move(op)});
}

LinearOperator::Kind LinearOperator::kind() const noexcept
{
    switch (rep_->op.index())
    {
        case 0: return Kind::Dense;
        case 1: return Kind::Sparse;
        default: return Kind::Priorconditioned;
    }
}

const Matrix* LinearOperator::dense() const noexcept
{
    return std::get_if<Matrix>(&rep_->op);
}

const SparseMatrix* LinearOperator::sparse() const noexcept
{
    return std::get_if<SparseMatrix>(&rep_->op);
}

const PriorconditionedOperator* LinearOperator::priorconditioned() const noexcept
{
    auto p = std::get_if<std::shared_ptr<const PriorconditionedOperator>>(&rep_->op);
    return p ? p->get() : nullptr;
}

Vector LinearOperator::apply(const Vector& v) const
{
    check_length(cols_, v.size(), "LinearOperator::apply");
    if (auto d = dense())
        return (*d) * v;
    if (auto s = sparse())
        return (*s) * v;
    return priorconditioned()->apply(v);
}

Vector LinearOperator::apply_transpose(const Vector& w) const
{
    check_length(rows_, w.size(), "LinearOperator::apply_transpose");
    if (auto d = dense())
        return d->transpose() * w;
    if (auto s = sparse())
        return s->transpose() * w;
    return priorconditioned()->apply_transpose(w);
}

std::optional<double> LinearOperator::frobenius_norm() const
{
    if (auto d = dense())
        return d->norm();
    if (auto s = sparse())
        return s->norm();
    return std::nullopt;
}

Matrix LinearOperator::to_dense() const
{
    if (auto d = dense())
        return *d;
    if (auto s = sparse())
        return Matrix(*s);
    Matrix out(rows_, cols_);
    Vector e = Vector::Zero(cols_);
    for (Index j = 0; j < cols_; ++j)
    {
        e[j]       = 1.0;
        out.col(j) = apply(e);
        e[j]       = 0.0;
    }
    return out;
}

Matrix LinearOperator::gram() const
{
    Matrix G = Matrix::Zero(cols_, cols_);
    if (auto s = sparse())
    {
        SparseMatrix g = s->transpose() * (*s);
        return Matrix(g);
    }
    if (auto d = dense())
        G.selfadjointView<Eigen::Lower>().rankUpdate(d->transpose());
    else
        G.selfadjointView<Eigen::Lower>().rankUpdate(to_dense().transpose());
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
    return G;
}

//
// PriorconditionedOperator
//

PriorconditionedOperator::PriorconditionedOperator(LinearOperator base, RegularizationMatrix reg,
                                                   Vector shift)
    : base_(std::move(base)), reg_(reg), shift_(std::move(shift))
{
    if (reg_.dim() != base_.cols())
        throw DimensionError("regularization matrix size does not match operator columns");
    if (shift_.size() != base_.cols())
        throw DimensionError("shift length does not match operator columns");
}

Vector PriorconditionedOperator::apply(const Vector& z) const
{
    return base_.apply(reg_.solve(z));
}

Vector PriorconditionedOperator::apply_transpose(const Vector& w) const
{
    return reg_.solve_transpose(base_.apply_transpose(w));
}

Vector PriorconditionedOperator::recover(const Vector& z) const
{
    return shift_ + reg_.solve(z);
}

Vector PriorconditionedOperator::effective_rhs(const Vector& b) const
{
    check_length(base_.rows(), b.size(), "PriorconditionedOperator::effective_rhs");
    return b - base_.apply(shift_);
}

LinearOperator make_priorconditioned(LinearOperator base, RegularizationMatrix reg, Vector shift)
{
    return LinearOperator(
        std::make_shared<const PriorconditionedOperator>(std::move(base), reg, std::move(shift)));
}

//
// Normal equations
//

double normal_equation_residual(const LinearOperator& A, const Vector& b, double alpha,
                                const Vector& x)
{
    return (A.apply_transpose(A.apply(x) - b) + alpha * x).norm();
}

namespace
{

Vector solve_dense(const LinearOperator& A, const Vector& atb, double alpha, double target)
{
    Matrix G = A.gram();
    G.diagonal().array() += alpha;
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success)
        throw Error("Cholesky factorization of the shifted normal matrix failed");
    Vector x = llt.solve(atb);
    // A couple of refinement sweeps against the explicit residual.
    for (int sweep = 0; sweep < 2; ++sweep)
    {
        Vector r = atb - G.selfadjointView<Eigen::Lower>() * x;
        if (r.norm() <= target)
            break;
        x += llt.solve(r);
    }
    return x;
}

Vector solve_cg(const LinearOperator& A, const Vector& atb, double alpha, double target,
                Index max_iter)
{
    const Index n = A.cols();
    Vector      x = Vector::Zero(n);
    Vector      r = atb;
    Vector      p = r;
    double      rr = r.squaredNorm();
    for (Index it = 0; it < max_iter; ++it)
    {
        if (std::sqrt(rr) <= target)
            return x;
        Vector q     = A.apply_transpose(A.apply(p)) + alpha * p;
        double step  = rr / p.dot(q);
        x           += step * p;
        r           -= step * q;
        double rr_new = r.squaredNorm();
        p             = r + (rr_new / rr) * p;
        rr            = rr_new;
    }
    if (std::sqrt(rr) <= target)
        return x;
    throw ConvergenceError("conjugate gradient on the normal equations did not converge",
                           std::sqrt(rr));
}

} // namespace

Vector normal_equation_solve(const LinearOperator& A, const Vector& b, double alpha,
                             const NormalEquationOptions& options)
{
    if (!(alpha > 0.0))
        throw Error("normal_equation_solve requires alpha > 0");
    check_length(A.rows(), b.size(), "normal_equation_solve");
    Vector atb = A.apply_transpose(b);
    double scale = atb.norm();
    if (scale == 0.0)
        return Vector::Zero(A.cols());
    double target = options.rtol * scale;

    if (A.cols() <= options.dense_threshold)
        return solve_dense(A, atb, alpha, target);

    Index budget = options.max_iter > 0 ? options.max_iter : 5 * A.cols();
    return solve_cg(A, atb, alpha, target, budget);
}

} // namespace tikmor
