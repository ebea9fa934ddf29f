#ifndef TIKMOR_LINOP_HPP
#define TIKMOR_LINOP_HPP

#include "tikmor/core.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <optional>

namespace tikmor
{

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

///
/// Square regularization matrix used for priorconditioning.
///
/// The first-difference form is upper bidiagonal with -1 on the diagonal and
/// +1 on the superdiagonal. Its inverse is never formed; solves are done by
/// O(n) substitution.
///
class RegularizationMatrix
{
public:
    enum class Kind
    {
        FirstDifference,
        Identity
    };

    static RegularizationMatrix first_difference(Index n);
    static RegularizationMatrix identity(Index n);

    Index dim() const noexcept { return n_; }
    Kind  kind() const noexcept { return kind_; }

    Vector apply(const Vector& z) const;
    Vector apply_transpose(const Vector& z) const;
    /// z with L z = w (back substitution)
    Vector solve(const Vector& w) const;
    /// z with L^T z = w (forward substitution)
    Vector solve_transpose(const Vector& w) const;

    Matrix to_dense() const;

private:
    RegularizationMatrix(Index n, Kind kind) : n_(n), kind_(kind) {}

    Index n_;
    Kind  kind_;
};

/// L^{-1} w
Vector apply_inverse(const RegularizationMatrix& L, const Vector& w);

class PriorconditionedOperator;

///
/// Immutable linear operator A : R^n -> R^m.
///
/// Copies share the underlying storage, so passing operators by value is
/// cheap and concurrent read-only application is safe.
///
class LinearOperator
{
public:
    enum class Kind
    {
        Dense,
        Sparse,
        Priorconditioned
    };

    explicit LinearOperator(Matrix a);
    explicit LinearOperator(SparseMatrix a);
    explicit LinearOperator(std::shared_ptr<const PriorconditionedOperator> op);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Kind  kind() const noexcept;

    Vector apply(const Vector& v) const;
    Vector apply_transpose(const Vector& w) const;

    /// Exact Frobenius norm when it is cheap to obtain (dense and sparse).
    std::optional<double> frobenius_norm() const;

    /// Materialized m x n matrix. Composite operators are applied column by
    /// column.
    Matrix to_dense() const;

    /// A^T A as a dense n x n matrix.
    Matrix gram() const;

    const Matrix*                   dense() const noexcept;
    const SparseMatrix*             sparse() const noexcept;
    const PriorconditionedOperator* priorconditioned() const noexcept;

private:
    struct Rep;
    std::shared_ptr<const Rep> rep_;
    Index                      rows_ = 0;
    Index                      cols_ = 0;
};

///
/// The standard-form operator A L^{-1} of general-form Tikhonov, together with
/// the shift x0: z = L (x - x0), r0 = b - A x0, x = x0 + L^{-1} z.
///
class PriorconditionedOperator
{
public:
    PriorconditionedOperator(LinearOperator base, RegularizationMatrix reg, Vector shift);

    Index rows() const noexcept { return base_.rows(); }
    Index cols() const noexcept { return base_.cols(); }

    const LinearOperator&       base() const noexcept { return base_; }
    const RegularizationMatrix& reg() const noexcept { return reg_; }
    const Vector&               shift() const noexcept { return shift_; }

    Vector apply(const Vector& z) const;
    Vector apply_transpose(const Vector& w) const;

    Vector recover(const Vector& z) const;
    Vector effective_rhs(const Vector& b) const;

private:
    LinearOperator       base_;
    RegularizationMatrix reg_;
    Vector               shift_;
};

/// Wraps A L^{-1} (with shift x0) as a LinearOperator.
LinearOperator make_priorconditioned(LinearOperator base, RegularizationMatrix reg, Vector shift);

struct NormalEquationOptions
{
    /// Largest n for which the factorization path is taken.
    Index  dense_threshold = 2000;
    double rtol            = 1e-10;
    /// CG iteration budget; 0 selects 5 n.
    Index  max_iter        = 0;
};

///
/// Solves the Tikhonov normal equations (A^T A + alpha I) x = A^T b.
///
/// Throws ConvergenceError when the CG path exhausts its budget.
///
Vector normal_equation_solve(const LinearOperator& A, const Vector& b, double alpha,
                             const NormalEquationOptions& options = {});

/// ||(A^T A + alpha I) x - A^T b||, evaluated through the operator.
double normal_equation_residual(const LinearOperator& A, const Vector& b, double alpha,
                                const Vector& x);

} // namespace tikmor

#endif // TIKMOR_LINOP_HPP
