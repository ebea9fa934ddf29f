#include "test_util.hpp"

#include "tikmor/ntm.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace tikmor;
using tikmor::test::identity_problem;
using tikmor::test::rel_diff;

TEST(Ntm, IdentityClosedForm)
{
    Vector b = Vector::LinSpaced(5, 1.0, 5.0);
    b *= 2.0 / b.norm();
    auto p = identity_problem(b, 1.0);

    NtmConfig cfg;
    cfg.tol = 1e-10;
    auto r  = ntm_solve(p, cfg);
    ASSERT_TRUE(r.converged());
    EXPECT_LE(rel_diff(r.alpha, 1.0), 1e-8);
    EXPECT_LE((r.x - b / 2.0).norm(), 1e-8);
    EXPECT_NEAR((r.x - b).norm(), 1.0, 1e-8);
}

TEST(Ntm, RejectsBadInput)
{
    Vector b = Vector::Ones(3);
    EXPECT_THROW(ntm_solve(identity_problem(b, 0.0)), Error);
    EXPECT_THROW(ntm_solve(identity_problem(b, b.norm())), InfeasibleDiscrepancy);
    EXPECT_THROW(ntm_solve(identity_problem(b, 5.0)), InfeasibleDiscrepancy);
    NtmConfig bad;
    bad.alpha0 = -1.0;
    EXPECT_THROW(ntm_solve(identity_problem(b, 0.5), bad), Error);
    bad        = {};
    bad.max_iter = 0;
    EXPECT_THROW(ntm_solve(identity_problem(b, 0.5), bad), Error);
}

TEST(Ntm, TraceShape)
{
    auto p = random_uniform_problem(40, 25, 0.1, 5);
    auto r = ntm_solve(p);
    ASSERT_TRUE(r.converged());
    ASSERT_EQ(static_cast<Index>(r.trace.size()), r.iterations + 1);
    EXPECT_EQ(r.trace[0].iter, 0);
    EXPECT_EQ(r.trace[0].alpha, 1.0);
    EXPECT_TRUE(std::isnan(r.trace[0].gamma));
    for (std::size_t i = 1; i < r.trace.size(); ++i)
    {
        const auto& row = r.trace[i];
        EXPECT_EQ(row.iter, static_cast<Index>(i));
        EXPECT_GT(row.alpha, 0.0);
        EXPECT_GT(row.gamma, 0.0);
        EXPECT_LE(row.gamma, 1.0);
        EXPECT_GE(row.case_id, 1);
        EXPECT_LE(row.case_id, 3);
    }
    EXPECT_LT(r.trace.back().f_norm, 1e-3);

    std::ostringstream csv;
    write_trace_csv(csv, r.trace, TraceSchema::Newton);
    std::string first = csv.str().substr(0, csv.str().find('\n'));
    EXPECT_EQ(first, "iter,alpha,gamma,res_norm,F_norm,dinv,theta,case_id");
}

TEST(Ntm, MaxIterationsFlagged)
{
    auto      p = random_uniform_problem(40, 25, 0.1, 6);
    NtmConfig cfg;
    cfg.max_iter = 2;
    auto r       = ntm_solve(p, cfg);
    EXPECT_EQ(r.status, SolveStatus::MaxIterations);
    EXPECT_FALSE(r.converged());
    EXPECT_EQ(r.iterations, 2);
    EXPECT_EQ(r.trace.size(), 3u);
}

TEST(Ntm, BothRulesSameSolution)
{
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        auto      p = random_uniform_problem(60, 40, 0.1, seed);
        NtmConfig c1, c2;
        c1.tol = c2.tol = 1e-9;
        c1.step_rule.variant = StepVariant::Case1;
        auto r1 = ntm_solve(p, c1);
        auto r2 = ntm_solve(p, c2);
        ASSERT_TRUE(r1.converged());
        ASSERT_TRUE(r2.converged());
        EXPECT_LE(rel_diff(r1.alpha, r2.alpha), 1e-6);
        EXPECT_LE((r1.x - r2.x).norm(), 1e-6 * r2.x.norm());
    }
}

TEST(Ntm, CaseOneSafeguards)
{
    for (std::uint64_t seed : {11u, 12u})
    {
        auto      p = random_uniform_problem(80, 50, 0.1, seed);
        NtmConfig cfg;
        cfg.step_rule.variant = StepVariant::Case1;
        auto r                = ntm_solve(p, cfg);
        ASSERT_TRUE(r.converged());
        EXPECT_NE(r.status, SolveStatus::SingularJacobian);
        for (std::size_t i = 2; i < r.trace.size(); ++i)
            EXPECT_LT(r.trace[i].dir_norm, r.trace[i - 1].dir_norm) << "step " << i;
    }
}

TEST(Ntm, BoundModeConverges)
{
    auto      p = random_uniform_problem(60, 40, 0.1, 21);
    NtmConfig exact, bound;
    bound.step_rule.dinv = DInvMode::Bound;
    auto re              = ntm_solve(p, exact);
    auto rb              = ntm_solve(p, bound);
    ASSERT_TRUE(re.converged());
    ASSERT_TRUE(rb.converged());
    EXPECT_GE(rb.iterations, re.iterations);
    EXPECT_LE(rel_diff(rb.alpha, re.alpha), 1e-3);
}

TEST(Ntm, MorozovAtConvergence)
{
    for (std::uint64_t seed : {31u, 32u, 33u})
    {
        auto p = random_uniform_problem(70, 50, 0.1, seed);
        auto r = ntm_solve(p);
        ASSERT_TRUE(r.converged());
        double res = (p.op.apply(r.x) - p.rhs).norm();
        EXPECT_LE(std::abs(res - p.noise_level), 1e-3 * std::max(1.0, p.noise_level));
        FValue F = eval_F(p.op, p.rhs, p.noise_level, r.x, r.alpha);
        EXPECT_LT(F.f1.norm(), 1e-3);
    }
}

TEST(Ntm, SparseOperator)
{
    SeededStream rng(40);
    Matrix       D = tikmor::test::random_matrix(50, 30, rng);
    for (Index i = 0; i < D.size(); ++i)
        if (rng.uniform() < 0.5)
            D.data()[i] = 0.0;
    auto pd = make_noisy_problem(LinearOperator(D), tikmor::test::random_vector(30, rng), 0.1, 1);
    auto ps = make_noisy_problem(LinearOperator(SparseMatrix(D.sparseView())), *pd.ground_truth,
                                 0.1, 1);
    auto rd = ntm_solve(pd);
    auto rs = ntm_solve(ps);
    ASSERT_TRUE(rd.converged());
    EXPECT_EQ(rd.iterations, rs.iterations);
    EXPECT_LE(rel_diff(rs.alpha, rd.alpha), 1e-10);
}
