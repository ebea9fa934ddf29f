#include "tikmor/tikhonov_morozov.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tikmor
{

FValue eval_F(const LinearOperator& A, const Vector& b, double eps, const Vector& x, double alpha)
{
    Vector r = A.apply(x) - b;
    FValue F;
    F.f1 = A.apply_transpose(r) + alpha * x;
    F.f2 = 0.5 * r.squaredNorm() - 0.5 * eps * eps;
    return F;
}

StepInterval step_interval(double alpha_prev, double delta_alpha, double omega)
{
    if (!(alpha_prev > 0.0))
        throw Error("step_interval requires alpha > 0");
    if (!(omega > 0.0 && omega < 1.0))
        throw Error("step_interval requires omega in (0, 1)");

    if (delta_alpha >= 0.0)
        return {1.0, std::sqrt(2.0), 1};

    const double next = alpha_prev + delta_alpha;
    if (next > 0.0)
    {
        double ratio = alpha_prev / next;
        return {1.0, std::sqrt(1.0 + ratio * ratio), 2};
    }
    const double slack = 1.0 - omega;
    return {-omega * alpha_prev / delta_alpha, std::sqrt(1.0 + 1.0 / (slack * slack)), 3};
}

double step_size(StepVariant variant, const Vector& dx, double delta_alpha,
                 const StepInterval& interval, double dinv, double gram_dx_norm)
{
    if (!(dinv > 0.0))
        throw Error("step_size requires ||D^{-1}|| > 0");
    double denom = std::abs(delta_alpha) + interval.theta * dx.norm();
    if (variant == StepVariant::Case1)
        denom += std::sqrt(delta_alpha * delta_alpha + 0.25 * gram_dx_norm * gram_dx_norm);
    denom *= dinv;
    if (denom == 0.0)
        return interval.gamma_max;
    double gamma = std::min(interval.gamma_max, 1.0 / denom);
    return std::max(gamma, std::numeric_limits<double>::min());
}

double step_size(StepVariant variant, const Vector& dx, double delta_alpha,
                 const StepInterval& interval, double dinv, const LinearOperator& A)
{
    double gram_dx_norm = 0.0;
    if (variant == StepVariant::Case1)
        gram_dx_norm = A.apply_transpose(A.apply(dx)).norm();
    return step_size(variant, dx, delta_alpha, interval, dinv, gram_dx_norm);
}

//
// D matrix
//

Matrix d_matrix(const Matrix& gram, const Vector& x, double alpha)
{
    const Index n = gram.rows();
    if (x.size() != n)
        throw DimensionError("d_matrix: x length does not match the Gram matrix");
    Matrix D                 = Matrix::Zero(n + 1, n + 1);
    D.topLeftCorner(n, n)    = gram;
    D.topLeftCorner(n, n).diagonal().array() += alpha;
    D.topRightCorner(n, 1)   = x;
    D.bottomLeftCorner(1, n) = -x.transpose();
    return D;
}

Matrix d_inverse_schur(const Matrix& gram, const Vector& x, double alpha)
{
    const Index n = gram.rows();
    Matrix      G = gram;
    G.diagonal().array() += alpha;
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success)
        throw Error("d_inverse_schur: A^T A + alpha I is not positive definite");
    Matrix Ginv = llt.solve(Matrix::Identity(n, n));
    Vector t    = Ginv * x;
    double s    = x.dot(t);
    if (!(s > 0.0))
        throw SingularJacobian("d_inverse_schur: zero Schur complement (x = 0)");

    Matrix inv                 = Matrix::Zero(n + 1, n + 1);
    inv.topLeftCorner(n, n)    = Ginv - t * t.transpose() / s;
    inv.topRightCorner(n, 1)   = -t / s;
    inv.bottomLeftCorner(1, n) = t.transpose() / s;
    inv(n, n)                  = 1.0 / s;
    return inv;
}

double dinv_norm_svd(const Matrix& gram, const Vector& x, double alpha)
{
    Eigen::BDCSVD<Matrix> svd(d_matrix(gram, x, alpha));
    double smin = svd.singularValues().minCoeff();
    return smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
}

double dinv_norm_bound(double x_norm, double alpha, double lambda_max)
{
    if (!(alpha > 0.0) || !(x_norm > 0.0))
        throw Error("dinv_norm_bound requires alpha > 0 and x != 0");
    double lead = 1.0 + x_norm / alpha;
    return lead * lead * std::max(1.0 / alpha, (alpha + lambda_max) / (x_norm * x_norm));
}

double estimate_lambda_max(const LinearOperator& A, int steps)
{
    steps = std::max(steps, 50);
    std::mt19937_64 engine(0x9e3779b97f4a7c15ULL);
    Vector          v(A.cols());
    for (Index i = 0; i < v.size(); ++i)
        v[i] = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
    v.normalize();

    double theta = 0.0;
    Vector w;
    for (int it = 0; it < steps; ++it)
    {
        w        = A.apply_transpose(A.apply(v));
        theta    = v.dot(w);
        double n = w.norm();
        if (n == 0.0)
            return 0.0;
        v = w / n;
    }
    w = A.apply_transpose(A.apply(v));
    theta = v.dot(w);
    return theta + (w - theta * v).norm();
}

double dinv_norm(const LinearOperator& A, const Vector& x, double alpha, DInvMode mode)
{
    if (!(alpha > 0.0))
        throw Error("dinv_norm requires alpha > 0");
    if (mode == DInvMode::Bound && x.norm() > 0.0)
        return dinv_norm_bound(x.norm(), alpha, estimate_lambda_max(A));
    return dinv_norm_svd(A.gram(), x, alpha);
}

//
// GramSpectrum
//

GramSpectrum::GramSpectrum(const Matrix& gram)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    if (es.info() != Eigen::Success)
        throw Error("eigendecomposition of A^T A failed");
    lambda_ = es.eigenvalues().cwiseMax(0.0);
    Q_      = es.eigenvectors();
}

double GramSpectrum::lambda_max() const noexcept
{
    return lambda_.size() > 0 ? lambda_.maxCoeff() : 0.0;
}

Vector GramSpectrum::solve_shifted(const Vector& rhs, double alpha) const
{
    Vector coeff = Q_.transpose() * rhs;
    coeff.array() /= (lambda_.array() + alpha);
    return Q_ * coeff;
}

namespace
{

// Number of positive eigenvalues of the symmetric 2x2 [p q; q r].
int positive_count(double p, double q, double r)
{
    double det = p * r - q * q;
    if (det < 0.0)
        return 1;
    if (det > 0.0)
        return p > 0.0 ? 2 : 0;
    return (p + r) > 0.0 ? 1 : 0;
}

} // namespace

double GramSpectrum::dinv_norm(const Vector& x, double alpha) const
{
    //
    // In the eigenbasis, D^{-1} = P = Delta + (1/s) a b^T with
    //   Delta = diag(g, 0), g_i = 1 / (lambda_i + alpha), t = g .* x~,
    //   s = x~^T t, a = (-t; 1), b = (t; 1).
    // P^T P = Delta^2 + U C U^T with U = [Delta a, b], C = [0 1/s; 1/s ||a||^2/s^2].
    // The number of eigenvalues of P^T P above mu is
    //   #{g_i^2 > mu} + #pos(S(mu)) - 1,  S(mu) = -C^{-1} - U^T (Delta^2 - mu)^{-1} U,
    // by Sylvester's law of inertia on the bordered matrix; -C^{-1} has
    // exactly one positive eigenvalue. Bisection on mu gives ||P||^2.
    //
    const Index n = dim();
    if (x.size() != n)
        throw DimensionError("dinv_norm: x length does not match the spectrum");

    Vector xt = Q_.transpose() * x;
    Vector g  = (lambda_.array() + alpha).inverse();
    Vector t  = g.cwiseProduct(xt);
    double s  = xt.dot(t);
    if (!(s > 0.0))
        return std::numeric_limits<double>::infinity();
    double a2 = t.squaredNorm() + 1.0;

    auto count_above = [&](double mu) {
        // S = [[a2, -s], [-s, 0]] - sum_i u_i u_i^T / (d_i^2 - mu)
        double s11 = a2, s12 = -s, s22 = 0.0;
        int    above = 0;
        for (Index i = 0; i < n; ++i)
        {
            double d2 = g[i] * g[i];
            if (d2 > mu)
                ++above;
            double inv = 1.0 / (d2 - mu);
            double u1  = -g[i] * t[i];
            double u2  = t[i];
            s11       -= u1 * u1 * inv;
            s12       -= u1 * u2 * inv;
            s22       -= u2 * u2 * inv;
        }
        // trailing entry: d = 0, u = (0, 1)
        s22 += 1.0 / mu;
        return above + positive_count(s11, s12, s22) - 1;
    };

    double lo = a2 / (s * s); // squared norm of the last column of P
    double hi = g.maxCoeff() + a2 / s;
    hi        = hi * hi * (1.0 + 1e-12);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
    {
        double mid = 0.5 * (lo + hi);
        if (count_above(mid) >= 1)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(0.5 * (lo + hi));
}

//
// Newton directions
//

NewtonDirection solve_newton_system(const LinearOperator& A, const Vector& b, double eps,
                                    const Vector& x, double alpha)
{
    if (!(alpha > 0.0))
        throw Error("solve_newton_system requires alpha > 0");
    const Index n = A.cols();
    Vector      r = A.apply(x) - b;
    Vector      c = A.apply_transpose(r);

    Matrix J                 = Matrix::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n)    = A.gram();
    J.topLeftCorner(n, n).diagonal().array() += alpha;
    J.topRightCorner(n, 1)   = x;
    J.bottomLeftCorner(1, n) = c.transpose() / alpha;

    Vector rhs(n + 1);
    rhs.head(n) = -(c + alpha * x);
    rhs[n]      = -(0.5 * r.squaredNorm() - 0.5 * eps * eps) / alpha;

    Eigen::FullPivLU<Matrix> lu(J);
    if (lu.rank() < n + 1)
        throw SingularJacobian("rescaled Jacobian is numerically singular");
    Vector d = lu.solve(rhs);

    NewtonDirection out;
    out.dx             = d.head(n);
    out.dalpha         = d[n];
    double rn          = rhs.norm();
    out.solve_residual = rn > 0.0 ? (J * d - rhs).norm() / rn : 0.0;
    return out;
}

TikhonovMorozovSystem::TikhonovMorozovSystem(LinearOperator A, Vector b, double eps)
    : A_(std::move(A)), b_(std::move(b)), eps_(eps), gram_(A_.gram()), spectrum_(gram_)
{
    if (b_.size() != A_.rows())
        throw DimensionError("rhs length does not match operator rows");
    atb_ = A_.apply_transpose(b_);
}

FValue TikhonovMorozovSystem::evaluate(const Vector& x, double alpha, double* residual_norm) const
{
    Vector r = A_.apply(x) - b_;
    FValue F;
    F.f1 = A_.apply_transpose(r) + alpha * x;
    F.f2 = 0.5 * r.squaredNorm() - 0.5 * eps_ * eps_;
    if (residual_norm)
        *residual_norm = r.norm();
    return F;
}

NewtonDirection TikhonovMorozovSystem::direction(const Vector& x, double alpha,
                                                 const FValue& F) const
{
    if (!(alpha > 0.0))
        throw Error("Newton direction requires alpha > 0");
    const Matrix& Q     = spectrum_.eigenvectors();
    Vector        shift = (spectrum_.eigenvalues().array() + alpha).inverse();

    Vector c  = A_.apply_transpose(A_.apply(x) - b_) / alpha; // bottom row of J
    Vector ct = Q.transpose() * c;
    Vector wt = shift.cwiseProduct(Q.transpose() * x); // G^{-1} x in the eigenbasis
    double q  = ct.dot(wt);
    if (!std::isfinite(q) || std::abs(q) <= 1e-14 * ct.norm() * wt.norm())
        throw SingularJacobian("rescaled Jacobian is numerically singular");

    // J (dx; da) = (top; bottom) by block elimination on the bordered system
    auto solve = [&](const Vector& top, double bottom, Vector& dx, double& da) {
        Vector ut = shift.cwiseProduct(Q.transpose() * top);
        da        = (ct.dot(ut) - bottom) / q;
        dx        = Q * (ut - da * wt);
    };
    auto apply_J = [&](const Vector& dx, double da, Vector& top, double& bottom) {
        top    = gram_ * dx + alpha * dx + da * x;
        bottom = c.dot(dx);
    };

    const Vector rhs_top    = -F.f1;
    const double rhs_bottom = -F.f2 / alpha;
    const double rhs_norm   = std::sqrt(rhs_top.squaredNorm() + rhs_bottom * rhs_bottom);

    NewtonDirection out;
    solve(rhs_top, rhs_bottom, out.dx, out.dalpha);

    Vector top;
    double bottom = 0.0;
    for (int sweep = 0;; ++sweep)
    {
        apply_J(out.dx, out.dalpha, top, bottom);
        top -= rhs_top;
        bottom -= rhs_bottom;
        double res         = std::sqrt(top.squaredNorm() + bottom * bottom);
        out.solve_residual = rhs_norm > 0.0 ? res / rhs_norm : 0.0;
        if (out.solve_residual <= 1e-12 || sweep == 2)
            break;
        Vector ddx;
        double dda = 0.0;
        solve(top, bottom, ddx, dda);
        out.dx -= ddx;
        out.dalpha -= dda;
    }
    return out;
}

double TikhonovMorozovSystem::dinv_norm(const Vector& x, double alpha, DInvMode mode) const
{
    double xn = x.norm();
    if (mode == DInvMode::Bound && xn > 0.0)
        return dinv_norm_bound(xn, alpha, spectrum_.lambda_max());
    return spectrum_.dinv_norm(x, alpha);
}

Vector TikhonovMorozovSystem::tikhonov_solution(double alpha) const
{
    return spectrum_.solve_shifted(atb_, alpha);
}

} // namespace tikmor
