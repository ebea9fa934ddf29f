#ifndef TIKMOR_BIDIAG_HPP
#define TIKMOR_BIDIAG_HPP

#include "tikmor/linop.hpp"

namespace tikmor
{

enum class ExpandStatus
{
    /// k grew by one
    Expanded,
    /// k grew by one but nu_{k+1} vanished: span(V_k) is invariant and the
    /// factorization cannot grow further
    InvariantSubspace,
    /// mu_{k+1} vanished; k is unchanged and the factorization is final
    Stalled,
    /// already final (earlier breakdown, or k == n)
    Exhausted
};

///
/// Golub-Kahan lower bidiagonalization A V_k = U_{k+1} B_{k+1,k} started
/// from u_1 = b / ||b||, grown one column at a time with full modified
/// Gram-Schmidt reorthogonalization.
///
/// B has diagonal mu_1..mu_k and subdiagonal nu_2..nu_{k+1}; c = (||b||, 0, ..., 0).
///
class BidiagFactorization
{
public:
    BidiagFactorization(const LinearOperator& A, const Vector& b, int reorth_passes = 1);

    ExpandStatus expand(const LinearOperator& A);

    Index k() const noexcept { return k_; }
    bool  final() const noexcept { return final_; }
    /// ||b||
    double rhs_norm() const noexcept { return beta_; }
    double breakdown_tolerance() const noexcept;

    /// m x (k+1)
    auto U() const { return U_.leftCols(k_ + 1); }
    /// n x k
    auto V() const { return V_.leftCols(k_); }
    /// (k+1) x k
    Matrix B() const;
    /// (||b||, 0, ..., 0) of length k+1
    Vector c() const;

    const Vector& mu() const noexcept { return mu_; }
    const Vector& nu() const noexcept { return nu_; }

    /// ||B y - c||, equal to ||A V y - b||
    double projected_residual_norm(const Vector& y) const;
    /// x = V y
    Vector lift(const Vector& y) const;

private:
    void reserve(Index columns);
    void orthogonalize(Eigen::Ref<Vector> w, const Eigen::Ref<const Matrix>& basis) const;
    double scale() const noexcept;

    Matrix                U_;
    Matrix                V_;
    Vector                mu_; // mu_[i] = mu_{i+1}
    Vector                nu_; // nu_[i] = nu_{i+2}, the entry B(i+1, i)
    double                beta_  = 0.0;
    Index                 k_     = 0;
    bool                  final_ = false;
    int                   passes_;
    std::optional<double> frobenius_;
    double                running_sq_ = 0.0; // sum of squared B entries so far
};

} // namespace tikmor

#endif // TIKMOR_BIDIAG_HPP
