#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "london/conditioning.hpp"
#include "oracle/debye_oracle.hpp"

using namespace london;

namespace {

LondonConfig config(double lambda, double sl = 0.0, double sm = 0.0)
{
    LondonConfig c;
    c.lambda_L = lambda;
    c.sigma_l = sl;
    c.sigma_m = sm;
    return c;
}

SingularValues oracle_singular_values(int n, int m, const LondonConfig& c)
{
    const oracle::DebyeOracle o(n, m, c.lambda_L);
    const CMat6 a = build_D_principal(c.lambda_L).inverse().cast<cplx>() * o.matrix(c.sigma_l, c.sigma_m);
    const Eigen::JacobiSVD<CMat6> svd(a);
    SingularValues s;
    for (int j = 0; j < 6; ++j)
        s[j] = svd.singularValues()(j);
    return s;
}

} // namespace

TEST(ModeSingularValues, DescendingAndNonnegative)
{
    for (int n : {0, 1, 7, 60}) {
        const auto s = mode_singular_values(n, config(0.3, 1.0, -2.0));
        for (int j = 0; j < 6; ++j) {
            EXPECT_GE(s[j], 0.0);
            if (j > 0) {
                EXPECT_LE(s[j], s[j - 1]);
            }
        }
    }
}

TEST(ModeSingularValues, IdentityLimit)
{
    for (int n : {1000, 4000}) {
        const auto s = mode_singular_values(n, config(1.0));
        for (double v : s)
            EXPECT_NEAR(v, 1.0, 0.01) << "n=" << n;
    }
    // and it gets closer
    const auto a = mode_singular_values(500, config(1.0));
    const auto b = mode_singular_values(2000, config(1.0));
    EXPECT_LT(std::abs(b[0] - 1.0), std::abs(a[0] - 1.0));
}

TEST(ModeSingularValues, MatchOracleAtDegreeTwo)
{
    for (auto c : {config(1.0), config(1.0, 1.0, -2.0)}) {
        const auto ours = mode_singular_values(2, c);
        const auto ref = oracle_singular_values(2, 1, c);
        for (int j = 0; j < 6; ++j)
            EXPECT_NEAR(ours[j], ref[j], 1e-8 * ref[0]) << "j=" << j;
    }
}

TEST(ModeSingularValues, IndependentOfOrderM)
{
    const auto c = config(0.5, -1.0, 3.0);
    const auto s0 = oracle_singular_values(3, 0, c);
    for (int m : {-3, 2}) {
        const auto s = oracle_singular_values(3, m, c);
        for (int j = 0; j < 6; ++j)
            EXPECT_NEAR(s[j], s0[j], 1e-9 * s0[0]);
    }
}

TEST(ConditionNumber, FiniteAtOriginAndStableUnderTruncation)
{
    const auto c = config(1.0);
    const auto r = condition_number(c);
    ASSERT_TRUE(r.finite);
    EXPECT_GE(r.kappa, 1.0);
    EXPECT_GT(r.n_cap, 0);
    EXPECT_LT(r.tail_deviation, 0.01);
    EXPECT_GE(r.kappa_bracketed, r.kappa);

    ConditionOptions fixed;
    fixed.n_cap = r.n_cap;
    const auto a = condition_number(c, fixed);
    fixed.n_cap = r.n_cap + 50;
    const auto b = condition_number(c, fixed);
    EXPECT_LT(std::abs(b.kappa - a.kappa) / a.kappa, 1e-3);
    EXPECT_DOUBLE_EQ(a.kappa, r.kappa);
}

TEST(ConditionNumber, UnconvergedCapIsAnError)
{
    ConditionOptions o;
    o.n_cap = 3;
    EXPECT_THROW(condition_number(config(0.1), o), precision_error);
}

TEST(ConditionNumber, ScanLimitIsAnError)
{
    ConditionOptions o;
    o.n_limit = 40;
    EXPECT_THROW(condition_number(config(0.01, 5.0, 5.0), o), precision_error);
}

TEST(ConditionNumber, ContextForAnotherLambdaRejected)
{
    const ConditionContext ctx(0.5, 100);
    EXPECT_THROW(condition_number(config(1.0), ctx), std::invalid_argument);
}

TEST(ConditionNumber, DegreeZeroOnlyAddsValues)
{
    const auto c = config(0.5, 2.0, 1.0);
    ConditionOptions with0;
    with0.include_degree_zero = true;
    EXPECT_GE(condition_number(c, with0).kappa, condition_number(c).kappa);
}

TEST(ConditionNumber, SymmetricInSigmaM)
{
    for (double lam : {1.0, 0.1}) {
        const ConditionContext ctx(lam, 100000);
        for (double sl : {-2.0, 0.5})
            for (double sm : {1.0, 3.5}) {
                const double a = condition_number(config(lam, sl, sm), ctx).kappa;
                const double b = condition_number(config(lam, sl, -sm), ctx).kappa;
                EXPECT_NEAR(a, b, 1e-10 * a);
            }
    }
}

TEST(ConditionNumber, TailDeviationDecreases)
{
    const auto c = config(1.0, 1.0, 1.0);
    const ConditionContext ctx(1.0, 600);
    const int n0 = tail_decrease_threshold(c, ctx, 600);
    EXPECT_LT(n0, 100);
    double prev = 1e300;
    for (int n = n0; n <= 600; n += 7) {
        const double d = detail::deviation(ctx.singular_values(n, 1.0, 1.0));
        EXPECT_LE(d, prev);
        prev = d;
    }
}

TEST(Sweep, SinglePointMatchesConditionNumber)
{
    SigmaGrid g;
    g.lo = g.hi = 0.0;
    g.points = 1;
    const auto s = sweep(1.0, g, g);
    ASSERT_EQ(s.points.size(), 1u);
    EXPECT_DOUBLE_EQ(s.points[0].result.kappa, condition_number(config(1.0)).kappa);
}

TEST(Sweep, OrderingAndBadGrid)
{
    SigmaGrid gl{-1.0, 1.0, 3}, gm{0.0, 2.0, 2};
    const auto s = sweep(0.5, gl, gm);
    ASSERT_EQ(s.points.size(), 6u);
    EXPECT_DOUBLE_EQ(s.at(2, 0).sigma_l, 1.0);
    EXPECT_DOUBLE_EQ(s.at(2, 0).sigma_m, 0.0);
    EXPECT_DOUBLE_EQ(s.at(0, 1).sigma_m, 2.0);
    for (const auto& p : s.points)
        EXPECT_GE(p.result.kappa, 1.0);
    EXPECT_THROW(sweep(0.5, SigmaGrid{1.0, -1.0, 3}, gm), std::invalid_argument);
    EXPECT_THROW(sweep(0.5, SigmaGrid{-1.0, 1.0, 0}, gm), std::invalid_argument);
}

TEST(Sweep, UnitLambdaOptimumAtOriginWithinBudget)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = sweep(1.0, SigmaGrid{}, SigmaGrid{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(secs, 60.0);
    ASSERT_EQ(s.points.size(), 441u);
    const auto& best = s.minimum();
    EXPECT_EQ(best.sigma_l, 0.0);
    EXPECT_EQ(best.sigma_m, 0.0);
    EXPECT_LE(s.at(10, 10).result.n_cap, 400);
    // the far corners of the grid need a little more
    for (const auto& p : s.points) {
        EXPECT_TRUE(p.result.finite);
        EXPECT_LE(p.result.n_cap, 500);
    }
}
