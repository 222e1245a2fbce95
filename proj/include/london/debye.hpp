#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "london/errors.hpp"
#include "london/layerops.hpp"
#include "london/specfun.hpp"
#include "london/sphgrid.hpp"
#include "london/vec.hpp"

namespace london {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using CMat6 = Eigen::Matrix<cplx, 6, 6>;
using CVec6 = Eigen::Matrix<cplx, 6, 1>;

struct LondonConfig {
    double lambda_L = 1.0;
    double sigma_m = 0.0;
    double sigma_l = 0.0;
    int n_max = 40;

    double x() const { return 1.0 / lambda_L; }

    void validate() const
    {
        check_lambda(lambda_L);
        if (!std::isfinite(sigma_m) || !std::isfinite(sigma_l))
            throw std::invalid_argument("sigma_m and sigma_l must be finite");
        if (n_max < 0)
            throw std::invalid_argument("n_max must be nonnegative");
    }
};

/// Unknown ordering of the per-degree system.
enum Unknown : int { RhoMinus = 0, RhoPlus = 1, MuMinus = 2, QMinus = 3, QPlus = 4, RMinus = 5 };

/// The printed identity block.
inline Mat6 build_D(double lambda_L)
{
    check_lambda(lambda_L);
    Mat6 d = Mat6::Zero();
    d(0, 0) = d(1, 1) = d(2, 2) = -0.25;
    d(3, 3) = -lambda_L / 4.0;
    d(3, 4) = 0.25;
    d(4, 3) = lambda_L / 2.0;
    d(4, 4) = 0.5;
    d(5, 5) = -0.5;
    return d;
}

/// The identity block including the non-compact -1 couplings of the three
/// Laplace-Beltrami rows; this is the large-n limit of A_n and the block used
/// for preconditioning.
inline Mat6 build_D_principal(double lambda_L)
{
    Mat6 d = build_D(lambda_L);
    d(0, 3) = d(1, 4) = d(2, 5) = -1.0;
    return d;
}

namespace detail {

inline void check_degree(int n)
{
    if (n < 0)
        throw std::invalid_argument("mode degree must be nonnegative");
}

} // namespace detail

/// A_n from the Bessel/Hankel products at k = i/lambda, in complex
/// arithmetic. Entry (6,3) carries the factor 1/(2n+1) that the
/// surface-gradient symbol produces; the display omits it. At n = 0 row 4
/// vanishes identically (see build_mode_system).
inline CMat6 build_An(int n, const LondonConfig& cfg, const ModBesselRatios& b)
{
    detail::check_degree(n);
    cfg.validate();
    if (b.order_max() < n || std::abs(b.argument() - cfg.x()) > 1e-14 * cfg.x())
        throw std::invalid_argument("build_An: Bessel ratio table does not match config");
    const cplx I(0.0, 1.0);
    const double lam = cfg.lambda_L;
    const cplx k = I / lam;
    const double N = n * (n + 1.0);
    const double p = 2.0 * n + 1.0;
    const double delta0 = n == 0 ? 1.0 : 0.0;

    const cplx jh = jh_product(b, n);
    const cplx djh = djh_product(b, n);
    const cplx jh_dn = jh_down_product(b, n);
    const cplx jup_h = j_up_h_product(b, n);
    const cplx jup_hdn = j_up_h_down_product(b, n);

    const cplx a = N * (I * ((n + 1.0) * jh_dn + double(n) * jup_h - k * jup_hdn)) / (lam * p * p * p);
    const cplx bb = I * N * (jh_dn - jup_h) / (lam * p);

    CMat6 A = CMat6::Zero();
    const double lb = (-N + delta0) / (p * p);
    A(0, 0) = A(1, 1) = A(2, 2) = lb;
    A(0, 3) = A(1, 4) = A(2, 5) = -1.0;

    A(3, 0) = a;
    A(3, 1) = cfg.sigma_l * N * (jh + k * djh) / (p * p * p * lam);
    A(3, 3) = N * jh / p;
    A(3, 4) = N / (p * p);

    A(4, 0) = -bb / p;
    A(4, 1) = -cfg.sigma_l * N * jh / (lam * p * p);
    A(4, 3) = -I * djh / lam;
    A(4, 4) = (n + 1.0) / p;

    A(5, 1) = -cfg.sigma_m * jh * N / (lam * lam * p * p);
    A(5, 2) = bb / (lam * p);
    A(5, 5) = I * djh / (lam * lam);
    return A;
}

inline CMat6 build_An(int n, const LondonConfig& cfg)
{
    cfg.validate();
    return build_An(n, cfg, ModBesselRatios(n + 1, cfg.x()));
}

/// The block actually solved. For n = 0 the tangential row is empty (a
/// constant has no surface gradient) and the block is singular; the row is
/// replaced by the D entry -lambda/4 on q^-, which selects the mean-zero q^-.
inline CMat6 build_mode_system(int n, const LondonConfig& cfg, const ModBesselRatios& b)
{
    CMat6 A = build_An(n, cfg, b);
    if (n == 0)
        A(3, 3) = -cfg.lambda_L / 4.0;
    return A;
}

/// The same matrix in real arithmetic, for sweeps over many degrees.
inline Mat6 build_An_real(int n, double sigma_l, double sigma_m, const ModBesselRatios& b)
{
    const double x = b.argument();
    const double N = n * (n + 1.0);
    const double p = 2.0 * n + 1.0;
    const double p2 = p * p, p3 = p2 * p;
    const double delta0 = n == 0 ? 1.0 : 0.0;
    const double ik = b.ik(n), dik = b.dik(n);
    const double ik_dn = b.ik_down(n), iup_k = b.i_up_k(n), iup_kdn = b.i_up_k_down(n);

    const double a = N * x * ((n + 1.0) * ik_dn + n * iup_k + x * iup_kdn) / p3;
    const double bb = N * x * (ik_dn - iup_k) / p;

    Mat6 A = Mat6::Zero();
    const double lb = (-N + delta0) / p2;
    A(0, 0) = A(1, 1) = A(2, 2) = lb;
    A(0, 3) = A(1, 4) = A(2, 5) = -1.0;
    A(3, 0) = a;
    A(3, 1) = sigma_l * N * x * (-ik - x * dik) / p3;
    A(3, 3) = -N * ik / p;
    A(3, 4) = N / p2;
    A(4, 0) = -bb / p;
    A(4, 1) = sigma_l * N * x * ik / p2;
    A(4, 3) = x * dik;
    A(4, 4) = (n + 1.0) / p;
    A(5, 1) = sigma_m * x * x * N * ik / p2;
    A(5, 2) = x * bb / p;
    A(5, 5) = -x * x * dik;
    return A;
}

/// Boundary functionals sampled on a grid: B^In (full vector) and J^In . n.
struct BoundaryData {
    SphereGrid grid;
    std::vector<cvec3> b_in;
    std::vector<cplx> jn_in;

    explicit BoundaryData(SphereGrid g)
        : grid(std::move(g)), b_in(grid.size(), cvec3::Zero()), jn_in(grid.size(), 0.0)
    {
    }
};

inline BoundaryData sample_boundary_data(const SphereGrid& grid,
                                         const std::function<cvec3(const vec3&)>& b_in,
                                         const std::function<cplx(const vec3&)>& jn_in)
{
    BoundaryData d(grid);
    for (int j = 0; j < grid.n_theta(); ++j)
        for (int k = 0; k < grid.n_phi(); ++k) {
            const vec3 p = grid.point(j, k);
            d.b_in[grid.index(j, k)] = b_in(p);
            d.jn_in[grid.index(j, k)] = jn_in(p);
        }
    return d;
}

/// Right-hand sides of rows 4-6 per (n, m); rows 1-3 are homogeneous.
struct ProjectedRhs {
    ModeCoefficients u4; // -S_0[div_G (n x n x B^In)]
    ModeCoefficients u5; // B^In . n
    ModeCoefficients u6; // J^In . n
    double tail_fraction = 0.0;
    std::vector<std::string> warnings;

    CVec6 at(int n, int m) const
    {
        CVec6 r = CVec6::Zero();
        r(3) = u4(n, m);
        r(4) = u5(n, m);
        r(5) = u6(n, m);
        return r;
    }
};

/// Default padding of the data grid beyond n_max (also the band used to
/// estimate the truncated tail).
inline int default_data_pad(int n_max) { return std::max(16, n_max / 2); }

inline ProjectedRhs project_rhs(const BoundaryData& data, int n_max, double tail_tolerance = 1e-10)
{
    const SphereGrid& g = data.grid;
    g.require_degree(n_max);
    const int n_probe = g.max_degree();

    std::vector<cplx> bn(g.size());
    for (int j = 0; j < g.n_theta(); ++j)
        for (int k = 0; k < g.n_phi(); ++k)
            bn[g.index(j, k)] = bdot(data.b_in[g.index(j, k)], g.normal(j, k));

    const TangentialCoefficients bt = g.tangential_analyze(data.b_in, n_probe);
    const ModeCoefficients u5 = g.analyze(bn, n_probe);
    const ModeCoefficients u6 = g.analyze(data.jn_in, n_probe);

    ProjectedRhs rhs;
    rhs.u4 = ModeCoefficients(n_max);
    rhs.u5 = ModeCoefficients(n_max);
    rhs.u6 = ModeCoefficients(n_max);
    double kept = 0.0, tail = 0.0;
    for (int n = 0; n <= n_probe; ++n)
        for (int m = -n; m <= n; ++m) {
            // -S_0[div(-B_t)] = S_0[-N g] on Y_nm
            const cplx v4 = -n * (n + 1.0) * bt.grad(n, m) * symbol_S0(n);
            const double e = std::norm(v4) + std::norm(u5(n, m)) + std::norm(u6(n, m)) +
                             n * (n + 1.0) * (std::norm(bt.grad(n, m)) + std::norm(bt.rot(n, m)));
            if (n <= n_max) {
                rhs.u4(n, m) = v4;
                rhs.u5(n, m) = u5(n, m);
                rhs.u6(n, m) = u6(n, m);
                kept += e;
            } else {
                tail += e;
            }
        }
    rhs.tail_fraction = (kept + tail) > 0.0 ? tail / (kept + tail) : 0.0;
    if (n_probe > n_max && rhs.tail_fraction > tail_tolerance)
        rhs.warnings.push_back("boundary data not resolved at n_max = " + std::to_string(n_max) +
                               ": tail energy fraction " + std::to_string(rhs.tail_fraction));
    return rhs;
}

/// Direct solve of one degree block A_n c = rhs.
class ModeSolver {
public:
    ModeSolver(int n, const CMat6& A, double max_condition = 1e12) : n_(n), lu_(A)
    {
        const Eigen::JacobiSVD<CMat6> svd(A);
        const auto s = svd.singularValues();
        condition_ = s(5) > 0.0 ? s(0) / s(5) : std::numeric_limits<double>::infinity();
        if (!(condition_ <= max_condition))
            throw singular_mode_error(n, "mode block n = " + std::to_string(n) +
                                             " is singular or near-singular (condition " +
                                             std::to_string(condition_) + ")");
    }

    CVec6 solve(const CVec6& rhs) const { return lu_.solve(rhs); }
    double condition() const noexcept { return condition_; }
    int degree() const noexcept { return n_; }

private:
    int n_;
    Eigen::PartialPivLU<CMat6> lu_;
    double condition_ = 0.0;
};

inline CVec6 solve_mode(int n, const CMat6& A, const CVec6& rhs)
{
    return ModeSolver(n, A).solve(rhs);
}

struct DebyeSolution {
    LondonConfig config;
    ModeCoefficients rho_minus, rho_plus, mu_minus, q_minus, q_plus, r_minus;
    std::vector<std::string> warnings;
    double max_residual = 0.0;

    DebyeSolution() = default;
    explicit DebyeSolution(const LondonConfig& cfg)
        : config(cfg), rho_minus(cfg.n_max), rho_plus(cfg.n_max), mu_minus(cfg.n_max),
          q_minus(cfg.n_max), q_plus(cfg.n_max), r_minus(cfg.n_max)
    {
    }

    int n_max() const { return config.n_max; }

    ModeCoefficients& density(int u)
    {
        switch (u) {
        case RhoMinus: return rho_minus;
        case RhoPlus: return rho_plus;
        case MuMinus: return mu_minus;
        case QMinus: return q_minus;
        case QPlus: return q_plus;
        default: return r_minus;
        }
    }
    const ModeCoefficients& density(int u) const
    {
        return const_cast<DebyeSolution*>(this)->density(u);
    }

    CVec6 at(int n, int m) const
    {
        CVec6 c;
        for (int u = 0; u < 6; ++u)
            c(u) = density(u)(n, m);
        return c;
    }

    /// M = (int |q+|^2 + |q-|^2 + |r-|^2)^(1/2)
    double density_norm() const
    {
        return std::sqrt(q_plus.norm_squared() + q_minus.norm_squared() + r_minus.norm_squared());
    }

    /// int_Gamma q+ dS
    cplx q_plus_total() const { return std::sqrt(4.0 * std::numbers::pi) * q_plus(0, 0); }
};

inline DebyeSolution solve_scattering(const LondonConfig& cfg, const ProjectedRhs& rhs)
{
    cfg.validate();
    if (rhs.u4.n_max() < cfg.n_max)
        throw std::invalid_argument("solve_scattering: right-hand side truncated below n_max");
    DebyeSolution sol(cfg);
    sol.warnings = rhs.warnings;
    const ModBesselRatios b(cfg.n_max + 1, cfg.x());
    double scale = 0.0;
    for (int n = 0; n <= cfg.n_max; ++n) {
        const CMat6 A = build_mode_system(n, cfg, b);
        const ModeSolver solver(n, A);
        for (int m = -n; m <= n; ++m) {
            const CVec6 r = rhs.at(n, m);
            const CVec6 c = solver.solve(r);
            for (int u = 0; u < 6; ++u)
                sol.density(u)(n, m) = c(u);
            sol.max_residual = std::max(sol.max_residual, (A * c - r).norm());
            scale = std::max(scale, r.norm());
        }
    }
    if (scale > 0.0)
        sol.max_residual /= scale;

    const double ref = std::max(1.0, sol.density_norm());
    if (std::abs(sol.q_minus(0, 0)) > 1e-12 * ref)
        sol.warnings.push_back("q- has nonzero mean");
    if (std::abs(sol.r_minus(0, 0)) > 1e-12 * ref)
        sol.warnings.push_back("r- has nonzero mean: J^In . n carries net flux " +
                               std::to_string(std::abs(sol.r_minus(0, 0))));
    const cplx flux_in = std::sqrt(4.0 * std::numbers::pi) * rhs.u5(0, 0);
    if (std::abs(sol.q_plus_total() - flux_in) > 1e-10 * std::max(1.0, std::abs(flux_in)))
        throw precision_error("solve_scattering: flux of q+ does not match flux of B^In");
    return sol;
}

inline DebyeSolution solve_scattering(const LondonConfig& cfg, const BoundaryData& data)
{
    return solve_scattering(cfg, project_rhs(data, cfg.n_max));
}

} // namespace london
