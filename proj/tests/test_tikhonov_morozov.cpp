#include "test_util.hpp"

#include "tikmor/tikhonov_morozov.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <numbers>

using namespace tikmor;
using tikmor::test::random_matrix;
using tikmor::test::random_vector;

TEST(EvalF, RootAndZeroIterate)
{
    LinearOperator I1(Matrix(Matrix::Identity(1, 1)));
    FValue F = eval_F(I1, Vector::Constant(1, 2.0), 1.0, Vector::Constant(1, 1.0), 1.0);
    EXPECT_EQ(F.f1[0], 0.0);
    EXPECT_EQ(F.f2, 0.0);
    EXPECT_EQ(F.norm(), 0.0);

    SeededStream   rng(1);
    Matrix         D = random_matrix(7, 4, rng);
    Vector         b = random_vector(7, rng);
    LinearOperator A(D);
    F = eval_F(A, b, 0.3, Vector::Zero(4), 2.0);
    EXPECT_LE((F.f1 + D.transpose() * b).norm(), 1e-14);
    EXPECT_NEAR(F.f2, 0.5 * b.squaredNorm() - 0.5 * 0.09, 1e-14);
}

TEST(EvalF, MatchesDenseFormula)
{
    SeededStream   rng(2);
    Matrix         D = random_matrix(9, 5, rng);
    Vector         b = random_vector(9, rng);
    Vector         x = random_vector(5, rng);
    LinearOperator A(D);
    FValue         F = eval_F(A, b, 0.7, x, 1.3);
    Vector f1 = (D.transpose() * D + 1.3 * Matrix::Identity(5, 5)) * x - D.transpose() * b;
    EXPECT_LE((F.f1 - f1).norm(), 1e-13);
    EXPECT_NEAR(F.f2, 0.5 * (D * x - b).squaredNorm() - 0.5 * 0.49, 1e-13);

    TikhonovMorozovSystem sys(A, b, 0.7);
    double                res = 0.0;
    FValue                G   = sys.evaluate(x, 1.3, &res);
    EXPECT_LE((G.f1 - f1).norm(), 1e-13);
    EXPECT_NEAR(res, (D * x - b).norm(), 1e-14);
}

TEST(StepInterval, ThreeCases)
{
    auto up = step_interval(1.0, 2.0, 0.9);
    EXPECT_EQ(up.gamma_max, 1.0);
    EXPECT_DOUBLE_EQ(up.theta, std::sqrt(2.0));
    EXPECT_EQ(up.case_id, 1);

    auto down = step_interval(1.0, -2.0, 0.9);
    EXPECT_DOUBLE_EQ(down.gamma_max, 0.45);
    EXPECT_NEAR(down.theta, std::sqrt(101.0), 1e-12);
    EXPECT_EQ(down.case_id, 3);

    auto mild = step_interval(2.0, -1.0, 0.9);
    EXPECT_EQ(mild.gamma_max, 1.0);
    EXPECT_DOUBLE_EQ(mild.theta, std::sqrt(5.0));
    EXPECT_EQ(mild.case_id, 2);

    auto flat = step_interval(1.0, 0.0, 0.9);
    EXPECT_EQ(flat.gamma_max, 1.0);
    EXPECT_DOUBLE_EQ(flat.theta, std::sqrt(2.0));
}

TEST(StepInterval, KeepsAlphaPositive)
{
    for (double da : {-0.5, -1.0, -3.0, -100.0})
    {
        auto I = step_interval(1.0, da, 0.9);
        EXPECT_GT(1.0 + I.gamma_max * da, 0.0);
    }
}

TEST(StepInterval, RejectsInvalid)
{
    EXPECT_THROW(step_interval(0.0, 1.0, 0.9), Error);
    EXPECT_THROW(step_interval(1.0, 1.0, 1.0), Error);
    EXPECT_THROW(step_interval(1.0, 1.0, 0.0), Error);
}

TEST(StepSize, Formulas)
{
    StepInterval I{1.0, std::sqrt(2.0), 1};
    Vector       dx = Vector::Zero(3);
    EXPECT_DOUBLE_EQ(step_size(StepVariant::Case2, dx, 1.0, I, 2.0, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(step_size(StepVariant::Case1, dx, 1.0, I, 2.0, 0.0), 0.25);

    LinearOperator A(Matrix(Matrix::Identity(3, 3) * 4.0));
    EXPECT_DOUBLE_EQ(step_size(StepVariant::Case1, dx, 1.0, I, 2.0, A), 0.25);

    Vector d = Vector::Unit(3, 0);
    // Case1: sqrt(1 + 16^2/4) + 1 + sqrt(2)
    double expected = 1.0 / ((std::sqrt(1.0 + 64.0) + 1.0 + std::sqrt(2.0)) * 2.0);
    EXPECT_NEAR(step_size(StepVariant::Case1, d, 1.0, I, 2.0, A), expected, 1e-15);

    double tiny = step_size(StepVariant::Case2, d, 1.0, I, 1e300, 0.0);
    EXPECT_GT(tiny, 0.0);
    EXPECT_DOUBLE_EQ(step_size(StepVariant::Case2, d, 0.0, I, 0.01, 0.0), 1.0);
}

TEST(DMatrix, ScalarGoldenRatio)
{
    Matrix gram = Matrix::Zero(1, 1);
    Vector x    = Vector::Ones(1);
    Matrix D    = d_matrix(gram, x, 1.0);
    EXPECT_EQ(D(0, 0), 1.0);
    EXPECT_EQ(D(0, 1), 1.0);
    EXPECT_EQ(D(1, 0), -1.0);
    EXPECT_EQ(D(1, 1), 0.0);
    const double phi = std::numbers::phi;
    EXPECT_NEAR(dinv_norm_svd(gram, x, 1.0), phi, 1e-12);
    EXPECT_NEAR(GramSpectrum(gram).dinv_norm(x, 1.0), phi, 1e-12);
    EXPECT_NEAR(1.0 / dinv_norm_svd(gram, x, 1.0), std::sqrt((3.0 - std::sqrt(5.0)) / 2.0), 1e-12);
}

TEST(DMatrix, SvdMatchesDenseInverse)
{
    SeededStream rng(6);
    Matrix       Am   = random_matrix(6, 4, rng);
    Matrix       gram = Am.transpose() * Am;
    Vector       x    = random_vector(4, rng);
    Matrix       Dinv = d_matrix(gram, x, 0.5).inverse();
    Eigen::JacobiSVD<Matrix> svd(Dinv);
    EXPECT_NEAR(dinv_norm_svd(gram, x, 0.5), svd.singularValues()[0],
                1e-10 * svd.singularValues()[0]);
}

TEST(DMatrix, SchurInverseMatchesDense)
{
    SeededStream rng(7);
    for (int t = 0; t < 20; ++t)
    {
        Index  n    = 1 + static_cast<Index>(rng.uniform() * 10);
        Matrix Am   = random_matrix(n + 3, n, rng);
        Matrix gram = Am.transpose() * Am;
        Vector x    = random_vector(n, rng);
        double a    = 0.01 + rng.uniform() * 5.0;
        Matrix Dinv = d_matrix(gram, x, a).inverse();
        EXPECT_LE((d_inverse_schur(gram, x, a) - Dinv).norm(), 1e-9 * Dinv.norm());
    }
}

TEST(DMatrix, ExactBelowBound)
{
    SeededStream rng(8);
    for (int t = 0; t < 50; ++t)
    {
        Index  n    = 1 + static_cast<Index>(rng.uniform() * 12);
        Matrix Am   = random_matrix(n + 2, n, rng) * (0.1 + 3.0 * rng.uniform());
        Matrix gram = Am.transpose() * Am;
        Vector x    = random_vector(n, rng) * std::pow(10.0, rng.uniform(-2.0, 1.0));
        double a    = std::pow(10.0, rng.uniform(-2.0, 2.0));
        double lmax = Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff();
        EXPECT_LE(dinv_norm_svd(gram, x, a), dinv_norm_bound(x.norm(), a, lmax) * (1 + 1e-12));
    }
}

TEST(DMatrix, BoundHoldsForShortX)
{
    // A = 0, x = 0.1, a = 1: the bound needs ||x||^2 in the second term
    Matrix gram = Matrix::Zero(1, 1);
    Vector x    = Vector::Constant(1, 0.1);
    double exact = dinv_norm_svd(gram, x, 1.0);
    EXPECT_GT(exact, 100.0);
    EXPECT_LE(exact, dinv_norm_bound(0.1, 1.0, 0.0));
}

TEST(GramSpectrum, DinvMatchesSvd)
{
    SeededStream rng(9);
    for (int t = 0; t < 40; ++t)
    {
        Index  n    = 1 + static_cast<Index>(rng.uniform() * 15);
        Index  m    = t % 3 == 0 ? std::max<Index>(1, n / 2) : n + 3; // some rank deficient
        Matrix Am   = random_matrix(m, n, rng);
        Matrix gram = Am.transpose() * Am;
        Vector x    = random_vector(n, rng) * std::pow(10.0, rng.uniform(-3.0, 2.0));
        double a    = std::pow(10.0, rng.uniform(-4.0, 3.0));
        double svd  = dinv_norm_svd(gram, x, a);
        double spec = GramSpectrum(gram).dinv_norm(x, a);
        EXPECT_LE(std::abs(spec - svd), 1e-8 * svd) << "t=" << t;
    }
}

TEST(GramSpectrum, ZeroXIsInfinite)
{
    GramSpectrum s(Matrix::Identity(3, 3));
    EXPECT_TRUE(std::isinf(s.dinv_norm(Vector::Zero(3), 1.0)));
}

TEST(GramSpectrum, ShiftedSolve)
{
    SeededStream rng(10);
    Matrix       Am   = random_matrix(8, 5, rng);
    Matrix       gram = Am.transpose() * Am;
    Vector       r    = random_vector(5, rng);
    Vector       x    = GramSpectrum(gram).solve_shifted(r, 0.3);
    EXPECT_LE(((gram + 0.3 * Matrix::Identity(5, 5)) * x - r).norm(), 1e-12);
}

TEST(LambdaMax, PowerIterationUpperEstimate)
{
    SeededStream rng(11);
    Matrix       Am   = random_matrix(40, 25, rng);
    double       lmax = Eigen::SelfAdjointEigenSolver<Matrix>(Am.transpose() * Am)
                      .eigenvalues()
                      .maxCoeff();
    double est = estimate_lambda_max(LinearOperator(Am));
    EXPECT_GE(est, lmax * (1 - 1e-6));
    EXPECT_LE(est, lmax * 1.05);
}

TEST(DinvNorm, OperatorModes)
{
    SeededStream   rng(12);
    Matrix         Am = random_matrix(10, 6, rng);
    LinearOperator A(Am);
    Vector         x     = random_vector(6, rng);
    Matrix         gram  = Am.transpose() * Am;
    double         exact = dinv_norm(A, x, 0.8, DInvMode::Exact);
    EXPECT_NEAR(exact, dinv_norm_svd(gram, x, 0.8), 1e-12 * exact);
    EXPECT_GE(dinv_norm(A, x, 0.8, DInvMode::Bound), exact);
    // x = 0 falls back to the exact value
    double zero = dinv_norm(A, Vector::Zero(6), 0.8, DInvMode::Bound);
    EXPECT_EQ(zero, dinv_norm(A, Vector::Zero(6), 0.8, DInvMode::Exact));

    TikhonovMorozovSystem sys(A, random_vector(10, rng), 0.1);
    EXPECT_NEAR(sys.dinv_norm(x, 0.8, DInvMode::Exact), exact, 1e-8 * exact);
    EXPECT_GE(sys.dinv_norm(x, 0.8, DInvMode::Bound), exact);
}

TEST(NewtonSystem, RootGivesZeroDirection)
{
    LinearOperator A(Matrix(Matrix::Identity(3, 3)));
    Vector         b  = Vector::Constant(3, 2.0 / std::sqrt(3.0)); // ||b|| = 2
    Vector         x  = b / 2.0;
    auto           d  = solve_newton_system(A, b, 1.0, x, 1.0);
    EXPECT_LE(d.dx.norm(), 1e-15);
    EXPECT_LE(std::abs(d.dalpha), 1e-15);
    TikhonovMorozovSystem sys(A, b, 1.0);
    auto                  e = sys.direction(x, 1.0, sys.evaluate(x, 1.0));
    EXPECT_LE(e.dx.norm(), 1e-15);
    EXPECT_LE(std::abs(e.dalpha), 1e-15);
}

TEST(NewtonSystem, ScalarCramer)
{
    const double a = 1.5, b = 2.0, eps = 0.4, x = 0.9, alpha = 0.7;
    LinearOperator A(Matrix(Matrix::Constant(1, 1, a)));
    Vector         bv = Vector::Constant(1, b);
    FValue         F  = eval_F(A, bv, eps, Vector::Constant(1, x), alpha);

    const double j11 = a * a + alpha, j12 = x, j21 = (a * x - b) * a / alpha;
    const double r1 = -F.f1[0], r2 = -F.f2 / alpha;
    const double det = -j12 * j21;
    const double dx  = (r1 * 0.0 - j12 * r2) / det;
    const double da  = (j11 * r2 - j21 * r1) / det;

    auto d = solve_newton_system(A, bv, eps, Vector::Constant(1, x), alpha);
    EXPECT_NEAR(d.dx[0], dx, 1e-13 * std::abs(dx));
    EXPECT_NEAR(d.dalpha, da, 1e-13 * std::abs(da));

    TikhonovMorozovSystem sys(A, bv, eps);
    auto e = sys.direction(Vector::Constant(1, x), alpha, F);
    EXPECT_NEAR(e.dx[0], dx, 1e-13 * std::abs(dx));
    EXPECT_NEAR(e.dalpha, da, 1e-13 * std::abs(da));
}

TEST(NewtonSystem, EigenbasisMatchesDenseLu)
{
    SeededStream rng(13);
    for (int t = 0; t < 30; ++t)
    {
        Index          n = 2 + static_cast<Index>(rng.uniform() * 12);
        Matrix         Am = random_matrix(n + 4, n, rng);
        Vector         b  = random_vector(n + 4, rng);
        Vector         x  = random_vector(n, rng);
        double         a  = std::pow(10.0, rng.uniform(-2.0, 2.0));
        LinearOperator A(Am);
        auto           dense = solve_newton_system(A, b, 0.2, x, a);
        EXPECT_LE(dense.solve_residual, 1e-10);

        TikhonovMorozovSystem sys(A, b, 0.2);
        auto                  spec = sys.direction(x, a, sys.evaluate(x, a));
        EXPECT_LE(spec.solve_residual, 1e-10);
        double scale = std::hypot(dense.dx.norm(), dense.dalpha);
        EXPECT_LE((spec.dx - dense.dx).norm(), 1e-8 * scale);
        EXPECT_LE(std::abs(spec.dalpha - dense.dalpha), 1e-8 * scale);
    }
}

TEST(NewtonSystem, SingularJacobian)
{
    // x = 0 makes the last column of the Jacobian vanish
    LinearOperator A(Matrix(Matrix::Identity(2, 2)));
    Vector         b = Vector::Ones(2);
    EXPECT_THROW(solve_newton_system(A, b, 0.5, Vector::Zero(2), 1.0), SingularJacobian);
    TikhonovMorozovSystem sys(A, b, 0.5);
    EXPECT_THROW(sys.direction(Vector::Zero(2), 1.0, sys.evaluate(Vector::Zero(2), 1.0)),
                 SingularJacobian);
}

TEST(NewtonSystem, FullStepResidualIdentity)
{
    // full step from a start satisfying F1 = 0
    SeededStream rng(14);
    for (int t = 0; t < 10; ++t)
    {
        Matrix         Am = random_matrix(8, 5, rng);
        Vector         b  = random_vector(8, rng);
        LinearOperator A(Am);
        double         a0 = 0.5 + rng.uniform();
        TikhonovMorozovSystem sys(A, b, 0.3 * b.norm());
        Vector x0 = sys.tikhonov_solution(a0);
        FValue F0 = sys.evaluate(x0, a0);
        auto   d  = sys.direction(x0, a0, F0);
        Vector x1 = x0 + d.dx;
        double a1 = a0 + d.dalpha;
        FValue F1 = sys.evaluate(x1, a1);
        Vector expect1 = d.dalpha * d.dx;
        double expect2 = 0.5 * (Am * d.dx).squaredNorm();
        double err = std::sqrt((F1.f1 - expect1).squaredNorm() + std::pow(F1.f2 - expect2, 2));
        EXPECT_LE(err, 1e-8 * (1.0 + F0.norm()));
    }
}
