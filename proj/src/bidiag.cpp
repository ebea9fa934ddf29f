#include "tikmor/bidiag.hpp"

#include <algorithm>
#include <cmath>

namespace tikmor
{

namespace
{

constexpr double kBreakdownFactor = 1e-14;

} // namespace

BidiagFactorization::BidiagFactorization(const LinearOperator& A, const Vector& b,
                                         int reorth_passes)
    : passes_(reorth_passes), frobenius_(A.frobenius_norm())
{
    if (b.size() != A.rows())
        throw DimensionError("bidiagonalization: rhs length does not match operator rows");
    beta_ = b.norm();
    if (!(beta_ > 0.0))
        throw DegenerateRhs("bidiagonalization needs a nonzero right-hand side");
    U_.resize(A.rows(), 1);
    V_.resize(A.cols(), 0);
    reserve(8);
    U_.col(0) = b / beta_;
}

void BidiagFactorization::reserve(Index columns)
{
    if (V_.cols() >= columns)
        return;
    U_.conservativeResize(U_.rows(), columns + 1);
    V_.conservativeResize(V_.rows(), columns);
    mu_.conservativeResize(columns);
    nu_.conservativeResize(columns);
}

double BidiagFactorization::scale() const noexcept
{
    return frobenius_ ? *frobenius_ : std::sqrt(running_sq_);
}

double BidiagFactorization::breakdown_tolerance() const noexcept
{
    return kBreakdownFactor * scale();
}

void BidiagFactorization::orthogonalize(Eigen::Ref<Vector> w,
                                        const Eigen::Ref<const Matrix>& basis) const
{
    for (int pass = 0; pass < passes_; ++pass)
        for (Index j = 0; j < basis.cols(); ++j)
            w -= basis.col(j).dot(w) * basis.col(j);
}

ExpandStatus BidiagFactorization::expand(const LinearOperator& A)
{
    if (final_ || k_ >= A.cols())
    {
        final_ = true;
        return ExpandStatus::Exhausted;
    }
    if (A.rows() != U_.rows() || A.cols() != V_.rows())
        throw DimensionError("bidiagonalization: operator changed shape between expansions");
    if (k_ + 1 > V_.cols())
        reserve(2 * V_.cols());

    const Index j = k_;

    // r = A^T u_j - nu_j v_{j-1}, then reorthogonalize against V
    Vector r = A.apply_transpose(U_.col(j));
    if (j > 0)
        r -= nu_[j - 1] * V_.col(j - 1);
    orthogonalize(r, V_.leftCols(j));
    const double mu = r.norm();
    if (!(mu > breakdown_tolerance()))
    {
        final_ = true;
        return ExpandStatus::Stalled;
    }
    mu_[j]     = mu;
    V_.col(j)  = r / mu;
    running_sq_ += mu * mu;

    // p = A v_j - mu_j u_j, then reorthogonalize against U
    Vector p = A.apply(V_.col(j)) - mu * U_.col(j);
    orthogonalize(p, U_.leftCols(j + 1));
    const double nu = p.norm();
    k_              = j + 1;

    if (nu > breakdown_tolerance())
    {
        nu_[j]        = nu;
        U_.col(j + 1) = p / nu;
        running_sq_  += nu * nu;
        final_        = k_ >= A.cols(); // V spans R^n
        return ExpandStatus::Expanded;
    }

    // Invariant subspace. Keep U orthonormal with any unit vector orthogonal
    // to the existing columns; B(k+1, k) = 0 so it does not enter A V = U B.
    nu_[j] = 0.0;
    final_ = true;
    Vector e = Vector::Zero(A.rows());
    U_.col(j + 1).setZero();
    for (Index i = 0; i < A.rows(); ++i)
    {
        e.setZero();
        e[i] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (Index c = 0; c <= j; ++c)
                e -= U_.col(c).dot(e) * U_.col(c);
        double norm = e.norm();
        if (norm > 0.5)
        {
            U_.col(j + 1) = e / norm;
            break;
        }
    }
    return ExpandStatus::InvariantSubspace;
}

Matrix BidiagFactorization::B() const
{
    Matrix B = Matrix::Zero(k_ + 1, k_);
    for (Index i = 0; i < k_; ++i)
    {
        B(i, i)     = mu_[i];
        B(i + 1, i) = nu_[i];
    }
    return B;
}

Vector BidiagFactorization::c() const
{
    Vector c = Vector::Zero(k_ + 1);
    c[0]     = beta_;
    return c;
}

double BidiagFactorization::projected_residual_norm(const Vector& y) const
{
    if (y.size() != k_)
        throw DimensionError("projected_residual_norm: y must have length k");
    double sq = 0.0;
    for (Index i = 0; i <= k_; ++i)
    {
        double ri = 0.0;
        if (i < k_)
            ri += mu_[i] * y[i];
        if (i > 0)
            ri += nu_[i - 1] * y[i - 1];
        if (i == 0)
            ri -= beta_;
        sq += ri * ri;
    }
    return std::sqrt(sq);
}

Vector BidiagFactorization::lift(const Vector& y) const
{
    if (y.size() != k_)
        throw DimensionError("lift: y must have length k");
    return V() * y;
}

} // namespace tikmor
