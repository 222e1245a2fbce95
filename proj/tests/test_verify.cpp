#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "london/verify.hpp"

using namespace london;

namespace {

constexpr double pi = std::numbers::pi;

LondonConfig config(double lambda, int n_max)
{
    LondonConfig c;
    c.lambda_L = lambda;
    c.n_max = n_max;
    return c;
}

// int_0^1 r^k e^{-(1-r)/lambda} dr by integration by parts
std::vector<double> exp_moments(double lambda, int k_max)
{
    std::vector<double> I(k_max + 1);
    I[0] = lambda * (1.0 - std::exp(-1.0 / lambda));
    for (int k = 1; k <= k_max; ++k)
        I[k] = lambda - lambda * k * I[k - 1];
    return I;
}

const vec3 charge{0.4, 0.2, 1.9};

const DebyeSolution& solved()
{
    static const DebyeSolution s = solve_external_charge(config(1.0, 24), charge);
    return s;
}

// a rigidly rotating unit charge density: J = z_hat x r, dipole moment 4 pi/15 z_hat
cvec3 spinning(const vec3& p) { return to_complex(vec3(-p.y(), p.x(), 0.0)); }

vec3 spinning_field(const vec3& x)
{
    const vec3 m(0.0, 0.0, 4.0 * pi / 15.0);
    const double r = x.norm();
    const vec3 u = x / r;
    return (3.0 * m.dot(u) * u - m) / (4.0 * pi * r * r * r);
}

} // namespace

TEST(VolumeQuadrature, BallVolumeAndExteriorMoments)
{
    const auto q = VolumeQuadrature::interior(12, 4);
    EXPECT_NEAR(q.integrate_scalar([](const vec3&) { return 1.0; }), 4.0 * pi / 3.0, 1e-13);
    const auto e = VolumeQuadrature::exterior(12, 4);
    EXPECT_NEAR(e.integrate_scalar([](const vec3& p) { return std::pow(p.norm(), -4.0); }), 4.0 * pi, 1e-12);
    EXPECT_NEAR(e.integrate_scalar([](const vec3& p) { return std::pow(p.norm(), -6.0); }), 4.0 * pi / 3.0, 1e-12);
    EXPECT_THROW(VolumeQuadrature::interior(0, 4), std::invalid_argument);
}

TEST(VolumeQuadrature, BoundaryLayerMoments)
{
    for (double lam : {0.2, 0.35, 1.0}) {
        const auto I = exp_moments(lam, 10);
        const auto q = VolumeQuadrature::interior(16, 0);
        for (int d = 0; d <= 8; ++d) {
            double sum = 0.0;
            for (int i = 0; i < q.n_radial(); ++i)
                sum += q.weights[i] * std::pow(q.radii[i], d) * std::exp(-(1.0 - q.radii[i]) / lam);
            EXPECT_NEAR(sum, I[d + 2], 1e-8) << "lambda=" << lam << " d=" << d;
        }
    }
}

TEST(BiotSavart, ZeroCurrent)
{
    const auto q = VolumeQuadrature::interior(6, 6);
    const auto b = biot_savart([](const vec3&) { return cvec3(cvec3::Zero()); }, q, {{0, 0, 2}, {1.5, 0, 0}});
    for (const auto& v : b)
        EXPECT_EQ(v.norm(), 0.0);
}

TEST(BiotSavart, RejectsTargetsInsideTheBall)
{
    const auto q = VolumeQuadrature::interior(4, 4);
    EXPECT_THROW(biot_savart(spinning, q, {{0, 0, 0.5}}), std::invalid_argument);
    EXPECT_THROW(biot_savart(spinning, q, {{0, 0, 1.0005}}), std::invalid_argument);
}

TEST(BiotSavart, SpinningBallIsAnExactDipole)
{
    const auto q = VolumeQuadrature::interior(24, 24);
    const std::vector<vec3> t{{0, 0, 1.5}, {2, 0, 0}, {1, -1.5, 2}};
    const auto b = biot_savart(spinning, q, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const vec3 ref = spinning_field(t[i]);
        EXPECT_LT((b[i] - to_complex(ref)).norm(), 1e-8 * ref.norm());
    }
}

TEST(BiotSavart, MatchesCurlOfVectorPotential)
{
    const auto q = VolumeQuadrature::interior(16, 16);
    const VolumeSamples v = sample_current(
        [](const vec3& p) { return to_complex(vec3(p.z() * p.z() - 0.2, p.x() * p.y(), -p.y() * p.z() + 0.4)); }, q);
    auto potential = [&](const vec3& x) {
        cvec3 a = cvec3::Zero();
        for (std::size_t i = 0; i < v.points.size(); ++i)
            a += v.weights[i] * v.values[i] / (4.0 * pi * (x - v.points[i]).norm());
        return a;
    };
    const double h = 1e-4;
    for (const vec3& x : {vec3(0, 0, 1.6), vec3(1.2, 0.9, -0.4)}) {
        cvec3 d[3];
        for (int a = 0; a < 3; ++a) {
            vec3 e = vec3::Zero();
            e(a) = h;
            d[a] = (potential(x + e) - potential(x - e)) / (2.0 * h);
        }
        const cvec3 curl(d[1](2) - d[2](1), d[2](0) - d[0](2), d[0](1) - d[1](0));
        const cvec3 b = biot_savart(v, {x})[0];
        EXPECT_LT((b - curl).norm(), 1e-7 * b.norm());
    }
}

TEST(BiotSavart, DivergenceFree)
{
    const auto q = VolumeQuadrature::interior(8, 24);
    const VolumeSamples v = sample_current(solved(), q);
    const double h = 1e-4;
    for (const vec3& x : {vec3(0, 0, 1.6), vec3(-1.1, 0.9, 0.7)}) {
        cplx div = 0.0;
        for (int a = 0; a < 3; ++a) {
            vec3 e = vec3::Zero();
            e(a) = h;
            div += (biot_savart(v, {x + e})[0](a) - biot_savart(v, {x - e})[0](a)) / (2.0 * h);
        }
        EXPECT_LT(std::abs(div), 1e-6);
    }
}

TEST(BiotSavart, OutgoingFieldFromInteriorCurrent)
{
    const std::vector<vec3> t{{0, 0, 1.5}, {0, 2, 0}, {-3, 0, 0}, {1.2, -0.8, 1.5}};
    const auto st = biot_savart_study(solved(), t, 6, 24, 2);
    ASSERT_EQ(st.levels.size(), 2u);
    EXPECT_LT(st.levels[0].error, 1e-3);
    EXPECT_LT(st.finest_error(), 1e-8);
    EXPECT_GE(st.ratios()[0], 4.0);
    EXPECT_EQ(st.levels[1].n_radial, 12);
    EXPECT_EQ(st.levels[1].angular_degree, 48);
}

TEST(Representation, ReproducesInteriorFieldAndVanishesOutside)
{
    const DebyeSolution& s = solved();
    const std::vector<vec3> in{{0.2, 0.1, 0.3}, {0, 0, -0.5}, {-0.4, 0.5, 0.1}};
    const std::vector<vec3> out{{0, 0, 1.7}, {1.5, 1, 0}};
    std::vector<vec3> all = in;
    all.insert(all.end(), out.begin(), out.end());
    const auto rep = representation_from_data(s, all, VolumeQuadrature::interior(32, 32), 48);
    const FieldEvaluation f = eval_fields_series(s, in, Side::Interior);
    for (std::size_t i = 0; i < in.size(); ++i) {
        const cvec3 b_minus = s.config.lambda_L * f.b[i];
        EXPECT_LT((rep.total[i] - b_minus).norm(), 1e-3 * b_minus.norm()) << i;
    }
    for (std::size_t i = in.size(); i < all.size(); ++i)
        EXPECT_LT(rep.total[i].norm(), 1e-10 * rep.volume[i].norm()) << i;
}

TEST(Energy, HomogeneousDataGivesZero)
{
    const auto c = config(1.0, 12);
    const SphereGrid g = SphereGrid::for_degree(12, 8);
    const DebyeSolution s = solve_scattering(c, project_rhs(BoundaryData(g), 12));
    const auto e = energy_identity(s, VolumeQuadrature::interior(12, 12), VolumeQuadrature::exterior(12, 12));
    EXPECT_EQ(e.volume(), 0.0);
    EXPECT_EQ(e.flux(), 0.0);
    EXPECT_LT(e.volume(), 1e-10 * energy_identity(solved(), VolumeQuadrature::interior(12, 24),
                                                   VolumeQuadrature::exterior(12, 24))
                                      .volume());
}

TEST(Energy, VolumeEqualsBoundaryFlux)
{
    for (double lam : {1.0, 0.4}) {
        const DebyeSolution s = solve_external_charge(config(lam, 20), charge);
        const auto e = energy_identity(s, VolumeQuadrature::interior(32, 20), VolumeQuadrature::exterior(24, 20));
        EXPECT_GT(e.volume(), 0.0);
        EXPECT_LT(std::abs(e.volume_interior - e.flux_interior), 1e-6 * e.flux_interior) << lam;
        EXPECT_LT(std::abs(e.volume_exterior - e.flux_exterior), 1e-6 * e.flux_exterior) << lam;
        EXPECT_LT(e.relative_residual(), 1e-6);
    }
}

TEST(Energy, ExteriorAgainstModeSum)
{
    // int_{r>1} |grad S_0[Y_n]|^2 = (n+1)/(2n+1)^2
    const DebyeSolution& s = solved();
    double ref = 0.0;
    for (int n = 0; n <= s.n_max(); ++n)
        for (int m = -n; m <= n; ++m)
            ref += (n + 1.0) / ((2.0 * n + 1.0) * (2.0 * n + 1.0)) * std::norm(s.q_plus(n, m));
    const auto e = energy_identity(s, VolumeQuadrature::interior(4, 24), VolumeQuadrature::exterior(30, 24));
    EXPECT_NEAR(e.volume_exterior, ref, 1e-10 * ref);
}

TEST(Energy, QuadraticInData)
{
    const auto c = config(1.0, 16);
    const SphereGrid g = SphereGrid::for_degree(16, 16);
    BoundaryData d = external_charge_data(charge, g);
    const auto e1 = energy_identity(solve_scattering(c, project_rhs(d, 16)), VolumeQuadrature::interior(24, 16),
                                    VolumeQuadrature::exterior(24, 16));
    for (auto& v : d.b_in)
        v *= 2.0;
    const auto e2 = energy_identity(solve_scattering(c, project_rhs(d, 16)), VolumeQuadrature::interior(24, 16),
                                    VolumeQuadrature::exterior(24, 16));
    EXPECT_NEAR(e2.volume(), 4.0 * e1.volume(), 1e-12 * e2.volume());
}

TEST(FarField, MonopoleSlope)
{
    DebyeSolution s(config(1.0, 4));
    s.q_plus(0, 0) = 1.0;
    const auto f = farfield_decay(s, {{0, 0, 1}, {1, -2, 0.5}}, {2, 4, 8, 16});
    ASSERT_EQ(f.slopes.size(), 2u);
    for (double sl : f.slopes)
        EXPECT_NEAR(sl, -2.0, 0.01);
}

TEST(FarField, SolvedProblemDecaysFastEnough)
{
    const auto f = farfield_decay(solved(), {{0, 0, 1}, {1, 0, 0}, {1, 1, 1}, {0, -1, -0.3}}, {4, 8, 16, 32});
    EXPECT_FALSE(f.identically_zero);
    EXPECT_LE(f.worst_slope(), -2.0 + 0.05);
}

TEST(FarField, ZeroFieldFlagged)
{
    const auto f = farfield_decay([](const vec3&) { return cvec3(cvec3::Zero()); }, {{0, 0, 1}}, {2, 4});
    EXPECT_TRUE(f.identically_zero);
    EXPECT_TRUE(f.slopes.empty());
}

TEST(FarField, RadiiChecked)
{
    auto one = [](const vec3&) { return cvec3(1.0, 0.0, 0.0); };
    EXPECT_THROW(farfield_decay(one, {{0, 0, 1}}, {4}), std::invalid_argument);
    EXPECT_THROW(farfield_decay(one, {{0, 0, 1}}, {1.5, 4}), std::invalid_argument);
    EXPECT_THROW(farfield_decay(one, {{0, 0, 1}}, {4, 3}), std::invalid_argument);
}

TEST(LondonResidual, SolvedProblem)
{
    EXPECT_LT(london_residual(solved(), {{0.2, 0.1, 0.3}, {0, 0.6, -0.5}, {0.7, 0.1, 0.1}}), 1e-5);
    EXPECT_THROW(london_residual(solved(), {{0, 0, 0.9995}}), std::invalid_argument);
}

TEST(Report, CheckBelow)
{
    EXPECT_TRUE(check_below("a", 1e-9, 1e-8).pass);
    EXPECT_FALSE(check_below("a", 1e-7, 1e-8).pass);
    EXPECT_FALSE(check_below("a", std::nan(""), 1e-8).pass);
}

TEST(SolutionChecks, AllPassForSolvedData)
{
    const SphereGrid g = SphereGrid::for_degree(24, 16);
    const BoundaryData d = external_charge_data(charge, g);
    const DebyeSolution s = solve_scattering(config(0.5, 24), project_rhs(d, 24));
    const auto checks = solution_checks(s, d);
    EXPECT_EQ(checks.size(), 7u);
    for (const auto& c : checks)
        EXPECT_TRUE(c.pass) << c.name << " = " << c.value;
}

TEST(SolutionChecks, WrongDataIsCaught)
{
    const SphereGrid g = SphereGrid::for_degree(24, 16);
    const BoundaryData d = external_charge_data(charge, g);
    const DebyeSolution s = solve_scattering(config(0.5, 24), project_rhs(d, 24));
    const BoundaryData other = external_charge_data(vec3(0, 0, -1.6), g);
    bool any_fail = false;
    for (const auto& c : solution_checks(s, other))
        any_fail = any_fail || !c.pass;
    EXPECT_TRUE(any_fail);
}
