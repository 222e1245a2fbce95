#pragma once

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "london/debye.hpp"
#include "london/errors.hpp"
#include "london/layerops.hpp"
#include "london/specfun.hpp"
#include "london/sphgrid.hpp"
#include "london/vec.hpp"

namespace london {

enum class Side { Interior, Exterior };

inline const char* side_name(Side s) { return s == Side::Interior ? "interior" : "exterior"; }

/// Field values at a list of targets. Interior targets carry B~- and J-,
/// exterior targets carry B+ (in `b`; `j` is zero). Targets on the wrong
/// side or within the exclusion distance of the sphere are flagged invalid
/// and hold zeros.
struct FieldEvaluation {
    Side side = Side::Interior;
    std::vector<vec3> targets;
    std::vector<cvec3> b;
    std::vector<cvec3> j;
    std::vector<bool> valid;
    int quadrature_degree = 0;

    std::size_t size() const { return targets.size(); }
    bool all_valid() const
    {
        for (bool v : valid)
            if (!v)
                return false;
        return true;
    }
};

/// Densities of the representation sampled on a grid: the tangential
/// m-, l- built from rho-, rho+, mu- and the scalars q-, r-, q+.
struct SurfaceDensities {
    SphereGrid grid;
    std::vector<cvec3> m_minus, l_minus;
    std::vector<cplx> q_minus, r_minus, q_plus;
};

/// m- = x grad S0^2 rho- + x sigma_m n x grad S0^2 rho+,
/// l- = -x grad S0^2 mu- - x sigma_l n x grad S0^2 rho+.
inline TangentialCoefficients m_minus_coefficients(const DebyeSolution& s)
{
    const int n_max = s.n_max();
    const double x = s.config.x();
    TangentialCoefficients t(n_max);
    for (int n = 1; n <= n_max; ++n) {
        const double f = x * symbol_S0_squared(n);
        for (int m = -n; m <= n; ++m) {
            t.grad(n, m) = f * s.rho_minus(n, m);
            t.rot(n, m) = f * s.config.sigma_m * s.rho_plus(n, m);
        }
    }
    return t;
}

inline TangentialCoefficients l_minus_coefficients(const DebyeSolution& s)
{
    const int n_max = s.n_max();
    const double x = s.config.x();
    TangentialCoefficients t(n_max);
    for (int n = 1; n <= n_max; ++n) {
        const double f = x * symbol_S0_squared(n);
        for (int m = -n; m <= n; ++m) {
            t.grad(n, m) = -f * s.mu_minus(n, m);
            t.rot(n, m) = -f * s.config.sigma_l * s.rho_plus(n, m);
        }
    }
    return t;
}

inline SurfaceDensities synthesize_densities(const DebyeSolution& s, const SphereGrid& grid)
{
    SurfaceDensities d{grid, {}, {}, {}, {}, {}};
    d.m_minus = grid.tangential_synthesize(m_minus_coefficients(s));
    d.l_minus = grid.tangential_synthesize(l_minus_coefficients(s));
    d.q_minus = grid.synthesize(s.q_minus);
    d.r_minus = grid.synthesize(s.r_minus);
    d.q_plus = grid.synthesize(s.q_plus);
    return d;
}

struct EvalOptions {
    double exclusion = 1e-3;
    int quadrature_degree = 0; // 0: chosen from the closest target
    int max_auto_degree = 600;
};

namespace detail {

inline bool target_ok(const vec3& p, Side side, double exclusion)
{
    const double r = p.norm();
    if (!std::isfinite(r))
        return false;
    return side == Side::Interior ? r < 1.0 - exclusion : r > 1.0 + exclusion;
}

// Degree at which smooth quadrature of the layer potentials reaches double
// precision for the closest valid target: the integrand decays like
// rho^L with rho = r (inside) or 1/r (outside).
inline int auto_quadrature_degree(const std::vector<vec3>& targets, Side side, int n_max,
                                  const EvalOptions& opt)
{
    double worst = 0.0;
    for (const vec3& p : targets)
        if (target_ok(p, side, opt.exclusion)) {
            const double r = p.norm();
            worst = std::max(worst, side == Side::Interior ? r : 1.0 / r);
        }
    int extra = 40;
    if (worst > 0.0)
        extra = int(std::ceil(37.0 / -std::log(worst)));
    return std::min(std::max(n_max + 40, n_max + extra + 8), std::max(opt.max_auto_degree, n_max + 40));
}

} // namespace detail

/// Off-surface fields by direct quadrature of the layer potentials over a
/// Gauss grid.
inline FieldEvaluation eval_fields(const DebyeSolution& s, const std::vector<vec3>& targets, Side side,
                                   const EvalOptions& opt = {})
{
    FieldEvaluation out;
    out.side = side;
    out.targets = targets;
    out.b.assign(targets.size(), cvec3::Zero());
    out.j.assign(targets.size(), cvec3::Zero());
    out.valid.assign(targets.size(), false);
    const int L = opt.quadrature_degree > 0 ? std::max(opt.quadrature_degree, s.n_max())
                                            : detail::auto_quadrature_degree(targets, side, s.n_max(), opt);
    out.quadrature_degree = L;

    const SphereGrid grid = SphereGrid::for_degree(L);
    const SurfaceDensities d = synthesize_densities(s, grid);
    const double x = s.config.x();
    const double four_pi = 4.0 * std::numbers::pi;

    for (std::size_t t = 0; t < targets.size(); ++t) {
        const vec3& p = targets[t];
        if (!detail::target_ok(p, side, opt.exclusion))
            continue;
        out.valid[t] = true;
        if (side == Side::Exterior) {
            cvec3 b = cvec3::Zero();
            for (int jt = 0; jt < grid.n_theta(); ++jt) {
                const double w = grid.weight(jt);
                for (int k = 0; k < grid.n_phi(); ++k) {
                    const std::size_t i = grid.index(jt, k);
                    const vec3 R = p - grid.point(jt, k);
                    const double r = R.norm();
                    const vec3 grad0 = -R / (four_pi * r * r * r);
                    b += (w * d.q_plus[i]) * to_complex(grad0);
                }
            }
            out.b[t] = b;
            continue;
        }
        cvec3 theta = cvec3::Zero(), a = cvec3::Zero();
        cvec3 grad_psi = cvec3::Zero(), grad_phi = cvec3::Zero();
        cvec3 curl_a = cvec3::Zero(), curl_theta = cvec3::Zero();
        for (int jt = 0; jt < grid.n_theta(); ++jt) {
            const double w = grid.weight(jt);
            for (int k = 0; k < grid.n_phi(); ++k) {
                const std::size_t i = grid.index(jt, k);
                const vec3 R = p - grid.point(jt, k);
                const double r = R.norm();
                const double g = w * std::exp(-x * r) / (four_pi * r);
                const cvec3 grad = to_complex(vec3(-g * (x + 1.0 / r) / r * R));
                theta += g * d.m_minus[i];
                a += g * d.l_minus[i];
                grad_psi += d.q_minus[i] * grad;
                grad_phi += d.r_minus[i] * grad;
                curl_a += bcross(grad, d.l_minus[i]);
                curl_theta += bcross(grad, d.m_minus[i]);
            }
        }
        out.b[t] = -x * theta + grad_psi + curl_a;
        out.j[t] = -x * a - grad_phi - curl_theta;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Series evaluation. Inside the sphere S_k acts on a degree-n harmonic
// density through s_n(r) = x i_n(xr) k_n(x); grad_G Y_n splits into vector
// harmonics of degrees n-1 and n+1, each carried by its own profile.

/// Field of one degree in the basis (Y r_hat, grad_G Y, r_hat x grad_G Y).
struct ModeField {
    cplx radial = 0.0, grad = 0.0, rot = 0.0;
};

struct InteriorModeFields {
    ModeField b, j;
};

/// B~- and J- of degree n at radius r for unknowns c, given s_L(r), s_L'(r)
/// for L = n-1, n, n+1 (entries for L < 0 ignored).
inline InteriorModeFields interior_mode_fields(int n, const CVec6& c, const LondonConfig& cfg, double r,
                                               const RadialProfiles& p)
{
    const double x = cfg.x();
    const double N = n * (n + 1.0);
    const double q = 2.0 * n + 1.0;
    const double s = p.s[n], ds = p.ds[n];
    const double s_dn = n > 0 ? p.s[n - 1] : 0.0, ds_dn = n > 0 ? p.ds[n - 1] : 0.0;
    const double s_up = p.s[n + 1], ds_up = p.ds[n + 1];

    // S_k[grad_G Y] = a Y r_hat + b grad_G Y
    const double a = N * (s_dn - s_up) / q;
    const double b = ((n + 1.0) * s_dn + n * s_up) / q;
    const double db = ((n + 1.0) * ds_dn + n * ds_up) / q;
    // curl(a Y r_hat + b grad_G Y) = (-a/r + b' + b/r) r_hat x grad_G Y
    const double curl_g = -a / r + db + b / r;
    // curl(s r_hat x grad_G Y) = -(N/r) s Y r_hat - (s' + s/r) grad_G Y
    const double curl_r_rad = -N * s / r, curl_r_grad = -(ds + s / r);

    const double f = n > 0 ? x * symbol_S0_squared(n) : 0.0;
    const cplx rho_m = c(RhoMinus), rho_p = c(RhoPlus), mu = c(MuMinus);
    const cplx qm = c(QMinus), rm = c(RMinus);
    const double sm = cfg.sigma_m, sl = cfg.sigma_l;

    // theta = S_k[m-], A = S_k[l-]
    const ModeField theta{f * rho_m * a, f * rho_m * b, f * sm * rho_p * s};
    const ModeField av{-f * mu * a, -f * mu * b, -f * sl * rho_p * s};
    const ModeField curl_theta{f * sm * rho_p * curl_r_rad, f * sm * rho_p * curl_r_grad, f * rho_m * curl_g};
    const ModeField curl_a{-f * sl * rho_p * curl_r_rad, -f * sl * rho_p * curl_r_grad, -f * mu * curl_g};
    // grad S_k[Y] = s' Y r_hat + (s/r) grad_G Y
    const ModeField grad_psi{qm * ds, qm * s / r, 0.0};
    const ModeField grad_phi{rm * ds, rm * s / r, 0.0};

    InteriorModeFields o;
    o.b = {-x * theta.radial + grad_psi.radial + curl_a.radial, -x * theta.grad + grad_psi.grad + curl_a.grad,
           -x * theta.rot + grad_psi.rot + curl_a.rot};
    o.j = {-x * av.radial - grad_phi.radial - curl_theta.radial, -x * av.grad - grad_phi.grad - curl_theta.grad,
           -x * av.rot - grad_phi.rot - curl_theta.rot};
    return o;
}

/// B+ of degree n at radius r >= 1: grad S_0[Y] = r^{-n-2}(-(n+1) Y r_hat + grad_G Y)/(2n+1).
inline ModeField exterior_mode_field(int n, cplx q_plus, double r)
{
    const double f = std::pow(r, -double(n) - 2.0) / (2.0 * n + 1.0);
    return {-(n + 1.0) * f * q_plus, f * q_plus, 0.0};
}

/// Boundary values of B~- (interior limit), J- (interior limit) and B+
/// (exterior limit), obtained from the jump relations mode by mode.
struct SurfaceTraces {
    VectorCoefficients b_tilde, j, b_plus;
};

inline SurfaceTraces surface_traces(const DebyeSolution& s)
{
    const int n_max = s.n_max();
    const ModBesselRatios bx(n_max + 2, s.config.x());
    const RadialProfiles p = interior_profiles(bx, 1.0, n_max + 1);
    SurfaceTraces t{VectorCoefficients(n_max), VectorCoefficients(n_max), VectorCoefficients(n_max)};
    for (int n = 0; n <= n_max; ++n)
        for (int m = -n; m <= n; ++m) {
            const InteriorModeFields f = interior_mode_fields(n, s.at(n, m), s.config, 1.0, p);
            t.b_tilde.radial(n, m) = f.b.radial;
            t.b_tilde.grad(n, m) = f.b.grad;
            t.b_tilde.rot(n, m) = f.b.rot;
            t.j.radial(n, m) = f.j.radial;
            t.j.grad(n, m) = f.j.grad;
            t.j.rot(n, m) = f.j.rot;
            const ModeField e = exterior_mode_field(n, s.q_plus(n, m), 1.0);
            t.b_plus.radial(n, m) = e.radial;
            t.b_plus.grad(n, m) = e.grad;
        }
    return t;
}

/// Off-surface fields by summing the series. Used to cross-check the
/// quadrature. The per-mode terms carry 1/r and cancel at the centre, so
/// interior targets with r < 1e-2 are flagged rather than evaluated.
inline FieldEvaluation eval_fields_series(const DebyeSolution& s, const std::vector<vec3>& targets, Side side,
                                          double exclusion = 1e-3)
{
    const int n_max = s.n_max();
    FieldEvaluation out;
    out.side = side;
    out.targets = targets;
    out.b.assign(targets.size(), cvec3::Zero());
    out.j.assign(targets.size(), cvec3::Zero());
    out.valid.assign(targets.size(), false);
    const ModBesselRatios bx(n_max + 2, s.config.x());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const vec3& p = targets[t];
        if (!detail::target_ok(p, side, exclusion) || p.norm() < 1e-2)
            continue;
        out.valid[t] = true;
        const double r = p.norm();
        const vec3 dir = p / r;
        const HarmonicsAtPoint h(n_max, dir);
        const cvec3 rh = to_complex(h.frame().r_hat);
        cvec3 b = cvec3::Zero(), j = cvec3::Zero();
        if (side == Side::Exterior) {
            for (int n = 0; n <= n_max; ++n)
                for (int m = -n; m <= n; ++m) {
                    const ModeField e = exterior_mode_field(n, s.q_plus(n, m), r);
                    b += e.radial * h.y(n, m) * rh + e.grad * h.grad(n, m);
                }
            out.b[t] = b;
            continue;
        }
        const RadialProfiles prof = interior_profiles(bx, r, n_max + 1);
        for (int n = 0; n <= n_max; ++n)
            for (int m = -n; m <= n; ++m) {
                const InteriorModeFields f = interior_mode_fields(n, s.at(n, m), s.config, r, prof);
                const cvec3 rot = h.rot(n, m);
                b += f.b.radial * h.y(n, m) * rh + f.b.grad * h.grad(n, m) + f.b.rot * rot;
                j += f.j.radial * h.y(n, m) * rh + f.j.grad * h.grad(n, m) + f.j.rot * rot;
            }
        out.b[t] = b;
        out.j[t] = j;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference solution: B~-_0, J-_0 from a Yukawa source outside, B+_0 from a
// point charge inside.

struct ReferenceSources {
    vec3 x_o{0.0, 0.0, 2.0};
    vec3 x_i{0.3, 0.0, 0.0};
    cvec3 v_o{cplx(1.0), cplx(0.0, 1.0), cplx(0.0)};
    double lambda_L = 1.0;

    void validate() const
    {
        check_lambda(lambda_L);
        if (!(x_o.norm() > 1.0))
            throw std::invalid_argument("x_o must lie outside the unit sphere");
        if (!(x_i.norm() < 1.0))
            throw std::invalid_argument("x_i must lie inside the unit sphere");
        if (v_o.norm() == 0.0)
            throw std::invalid_argument("v_o must be nonzero");
    }
};

namespace detail {

inline void check_separated(const vec3& p, const vec3& src)
{
    if ((p - src).norm() < 1e-12)
        throw std::invalid_argument("reference field requested at its source point");
}

} // namespace detail

/// B+_0 = grad_x g_0(x, x_i).
inline vec3 reference_b_plus(const ReferenceSources& s, const vec3& p)
{
    detail::check_separated(p, s.x_i);
    const vec3 R = p - s.x_i;
    const double r = R.norm();
    return -R / (4.0 * std::numbers::pi * r * r * r);
}

/// B~-_0 = Re(k curl(v_o g_k)), k = i/lambda.
inline vec3 reference_b_tilde(const ReferenceSources& s, const vec3& p)
{
    detail::check_separated(p, s.x_o);
    const double x = 1.0 / s.lambda_L;
    const vec3 R = p - s.x_o;
    const double r = R.norm();
    const double g = std::exp(-x * r) / (4.0 * std::numbers::pi * r);
    const cvec3 grad = to_complex(vec3(-g * (x + 1.0 / r) / r * R));
    const cplx k(0.0, x);
    return (k * bcross(grad, s.v_o)).real();
}

/// J-_0 = Re(i curl curl(v_o g_k)). The sign is the one for which
/// curl B~- = J-/lambda and curl J- = -B~-/lambda hold.
inline vec3 reference_j(const ReferenceSources& s, const vec3& p)
{
    detail::check_separated(p, s.x_o);
    const double x = 1.0 / s.lambda_L;
    const vec3 R = p - s.x_o;
    const double r = R.norm();
    const vec3 u = R / r;
    const double g = std::exp(-x * r) / (4.0 * std::numbers::pi * r);
    const double g1 = -g * (x + 1.0 / r);
    const double g2 = g * (x * x + 2.0 * x / r + 2.0 / (r * r));
    // curl curl (v g) = H v - v lap g, H = g'' u u^T + (g'/r)(I - u u^T), lap g = x^2 g
    const cplx uv = bdot(s.v_o, u);
    const cvec3 hv = (g2 - g1 / r) * uv * to_complex(u) + (g1 / r) * s.v_o;
    const cvec3 cc = hv - x * x * g * s.v_o;
    return (cplx(0.0, 1.0) * cc).real();
}

/// Boundary data of the accuracy problem: B^In = lambda B~-_0 - B+_0 and
/// J^In . n = J-_0 . n.
inline BoundaryData reference_boundary_data(const ReferenceSources& s, const SphereGrid& grid)
{
    s.validate();
    return sample_boundary_data(
        grid,
        [&](const vec3& p) { return to_complex(vec3(s.lambda_L * reference_b_tilde(s, p) - reference_b_plus(s, p))); },
        [&](const vec3& p) { return cplx(reference_j(s, p).dot(p)); });
}

// ---------------------------------------------------------------------------
// Error functionals.

/// Off-surface samples used by eps_1: B~-, J- at interior targets and B+ at
/// exterior targets.
struct TargetSamples {
    std::vector<cvec3> b_tilde, j, b_plus;
};

/// Boundary samples on a grid used by eps_2.
struct SurfaceSamples {
    std::vector<cvec3> b_tilde, j, b_plus;
};

inline double eps1(const TargetSamples& computed, const TargetSamples& reference, double M)
{
    if (!(M > 0.0))
        throw undefined_error("eps1: density norm M is zero");
    if (computed.b_tilde.size() != reference.b_tilde.size() || computed.j.size() != reference.j.size() ||
        computed.b_plus.size() != reference.b_plus.size() || computed.b_tilde.size() != computed.j.size())
        throw std::invalid_argument("eps1: sample counts differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < computed.b_tilde.size(); ++i)
        sum += (computed.b_tilde[i] - reference.b_tilde[i]).squaredNorm() +
               (computed.j[i] - reference.j[i]).squaredNorm();
    for (std::size_t i = 0; i < computed.b_plus.size(); ++i)
        sum += (computed.b_plus[i] - reference.b_plus[i]).squaredNorm();
    return std::sqrt(sum) / M;
}

inline double eps2(const SurfaceSamples& computed, const SurfaceSamples& reference, const SphereGrid& grid,
                   double M)
{
    if (!(M > 0.0))
        throw undefined_error("eps2: density norm M is zero");
    const std::size_t n = grid.size();
    for (const auto* v : {&computed.b_tilde, &computed.j, &computed.b_plus, &reference.b_tilde, &reference.j,
                          &reference.b_plus})
        if (v->size() != n)
            throw std::invalid_argument("eps2: samples do not match the grid");
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i)
        e[i] = (computed.b_tilde[i] - reference.b_tilde[i]).squaredNorm() +
               (computed.j[i] - reference.j[i]).squaredNorm() +
               (computed.b_plus[i] - reference.b_plus[i]).squaredNorm();
    return std::sqrt(grid.integrate(e)) / M;
}

/// Boundary traces of a solution synthesized on a grid.
inline SurfaceSamples surface_samples(const DebyeSolution& s, const SphereGrid& grid)
{
    const SurfaceTraces t = surface_traces(s);
    return {grid.vector_synthesize(t.b_tilde), grid.vector_synthesize(t.j), grid.vector_synthesize(t.b_plus)};
}

inline SurfaceSamples reference_surface_samples(const ReferenceSources& src, const SphereGrid& grid)
{
    SurfaceSamples r;
    for (const vec3& p : grid.points()) {
        r.b_tilde.push_back(to_complex(reference_b_tilde(src, p)));
        r.j.push_back(to_complex(reference_j(src, p)));
        r.b_plus.push_back(to_complex(reference_b_plus(src, p)));
    }
    return r;
}

// ---------------------------------------------------------------------------
// The accuracy protocol: solve with the reference data and compare at 10
// interior and 10 exterior targets and on the boundary.

struct AccuracyOptions {
    int n_targets = 10;
    double r_interior = 0.5;
    double r_exterior = 1.5;
    std::uint64_t seed = 1;
    int data_pad = -1; // -1: default_data_pad(n_max)
};

/// Targets at fixed radius in pseudo-random directions.
inline std::vector<vec3> random_targets(int count, double radius, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<vec3> out;
    while (int(out.size()) < count) {
        vec3 v(g(rng), g(rng), g(rng));
        if (v.norm() < 1e-8)
            continue;
        out.push_back(radius * v.normalized());
    }
    return out;
}

struct AccuracyResult {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double M = 0.0;
    double wall_time_s = 0.0;
    double tail_fraction = 0.0;
    std::vector<std::string> warnings;
};

inline AccuracyResult run_accuracy(const ReferenceSources& src, const LondonConfig& cfg,
                                   const AccuracyOptions& opt = {})
{
    const auto start = std::chrono::steady_clock::now();
    src.validate();
    cfg.validate();
    if (std::abs(src.lambda_L - cfg.lambda_L) > 0.0)
        throw std::invalid_argument("run_accuracy: reference and solver penetration depths differ");
    const int pad = opt.data_pad >= 0 ? opt.data_pad : default_data_pad(cfg.n_max);
    const SphereGrid data_grid = SphereGrid::for_degree(cfg.n_max, pad);
    const ProjectedRhs rhs = project_rhs(reference_boundary_data(src, data_grid), cfg.n_max);
    const DebyeSolution sol = solve_scattering(cfg, rhs);

    const std::vector<vec3> t_in = random_targets(opt.n_targets, opt.r_interior, opt.seed);
    const std::vector<vec3> t_out = random_targets(opt.n_targets, opt.r_exterior, opt.seed + 1);
    const FieldEvaluation fi = eval_fields(sol, t_in, Side::Interior);
    const FieldEvaluation fo = eval_fields(sol, t_out, Side::Exterior);
    if (!fi.all_valid() || !fo.all_valid())
        throw std::invalid_argument("run_accuracy: targets too close to the boundary");

    TargetSamples computed{fi.b, fi.j, fo.b}, reference;
    for (const vec3& p : t_in) {
        reference.b_tilde.push_back(to_complex(reference_b_tilde(src, p)));
        reference.j.push_back(to_complex(reference_j(src, p)));
    }
    for (const vec3& p : t_out)
        reference.b_plus.push_back(to_complex(reference_b_plus(src, p)));

    AccuracyResult r;
    r.M = sol.density_norm();
    r.eps1 = eps1(computed, reference, r.M);
    r.eps2 = eps2(surface_samples(sol, data_grid), reference_surface_samples(src, data_grid), data_grid, r.M);
    r.tail_fraction = rhs.tail_fraction;
    r.warnings = sol.warnings;
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace london
