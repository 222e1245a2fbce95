#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "london/debye.hpp"
#include "london/fields.hpp"
#include "london/quadrature.hpp"
#include "london/sphgrid.hpp"
#include "london/vec.hpp"

namespace london {

// ---------------------------------------------------------------------------
// Volume quadrature. Gauss-Legendre in u on [0,1] mapped by
// r = 1 - (1-u)^p, which packs nodes towards the boundary where J- lives.
// The exterior rule maps r = 1/s and needs no truncation radius.

struct VolumeQuadrature {
    std::vector<double> radii;   // shell radii
    std::vector<double> weights; // radial weights, r^2 dr included
    SphereGrid grid;

    VolumeQuadrature() : grid(1, 1) {}

    int n_radial() const { return int(radii.size()); }
    int angular_degree() const { return grid.max_degree(); }
    std::size_t size() const { return radii.size() * grid.size(); }

    static VolumeQuadrature interior(int n_radial, int angular_degree, int clustering = 2)
    {
        if (n_radial < 1 || angular_degree < 0 || clustering < 1)
            throw std::invalid_argument("VolumeQuadrature: need n_radial >= 1, angular_degree >= 0, clustering >= 1");
        VolumeQuadrature q;
        q.grid = SphereGrid::for_degree(angular_degree);
        const GaussRule g = gauss_legendre(n_radial, 0.0, 1.0);
        const double p = clustering;
        for (int i = 0; i < n_radial; ++i) {
            const double v = 1.0 - g.nodes[i];
            const double r = 1.0 - std::pow(v, p);
            q.radii.push_back(r);
            q.weights.push_back(g.weights[i] * p * std::pow(v, p - 1.0) * r * r);
        }
        return q;
    }

    /// Region r > 1, by r = 1/s on s in (0,1]: r^2 dr = s^-4 ds.
    static VolumeQuadrature exterior(int n_radial, int angular_degree)
    {
        if (n_radial < 1 || angular_degree < 0)
            throw std::invalid_argument("VolumeQuadrature: need n_radial >= 1, angular_degree >= 0");
        VolumeQuadrature q;
        q.grid = SphereGrid::for_degree(angular_degree);
        const GaussRule g = gauss_legendre(n_radial, 0.0, 1.0);
        for (int i = 0; i < n_radial; ++i) {
            const double s = g.nodes[i];
            q.radii.push_back(1.0 / s);
            q.weights.push_back(g.weights[i] / (s * s * s * s));
        }
        return q;
    }

    template <class F>
    double integrate_scalar(const F& f) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            double shell = 0.0;
            for (int j = 0; j < grid.n_theta(); ++j)
                for (int k = 0; k < grid.n_phi(); ++k)
                    shell += grid.weight(j) * f(radii[i] * grid.point(j, k));
            sum += weights[i] * shell;
        }
        return sum;
    }
};

/// B~- and J- on the sphere of radius r sampled at the grid directions.
struct ShellFields {
    std::vector<cvec3> b, j;
};

inline ShellFields interior_shell(const DebyeSolution& s, const ModBesselRatios& bx, double r, const SphereGrid& grid)
{
    const int n_max = s.n_max();
    const RadialProfiles p = interior_profiles(bx, r, n_max + 1);
    VectorCoefficients b(n_max), j(n_max);
    for (int n = 0; n <= n_max; ++n)
        for (int m = -n; m <= n; ++m) {
            const InteriorModeFields f = interior_mode_fields(n, s.at(n, m), s.config, r, p);
            b.radial(n, m) = f.b.radial;
            b.grad(n, m) = f.b.grad;
            b.rot(n, m) = f.b.rot;
            j.radial(n, m) = f.j.radial;
            j.grad(n, m) = f.j.grad;
            j.rot(n, m) = f.j.rot;
        }
    return {grid.vector_synthesize(b), grid.vector_synthesize(j)};
}

inline std::vector<cvec3> exterior_shell(const DebyeSolution& s, double r, const SphereGrid& grid)
{
    const int n_max = s.n_max();
    VectorCoefficients v(n_max);
    for (int n = 0; n <= n_max; ++n)
        for (int m = -n; m <= n; ++m) {
            const ModeField e = exterior_mode_field(n, s.q_plus(n, m), r);
            v.radial(n, m) = e.radial;
            v.grad(n, m) = e.grad;
        }
    return grid.vector_synthesize(v);
}

/// Weighted point samples of a vector field over a volume rule.
struct VolumeSamples {
    std::vector<vec3> points;
    std::vector<double> weights;
    std::vector<cvec3> values;
};

/// J- of a solution on the interior rule. The angular grid must resolve n_max.
inline VolumeSamples sample_current(const DebyeSolution& s, const VolumeQuadrature& q)
{
    if (q.angular_degree() < s.n_max())
        throw std::invalid_argument("sample_current: angular degree " + std::to_string(q.angular_degree()) +
                                    " below n_max " + std::to_string(s.n_max()));
    const ModBesselRatios bx(s.n_max() + 2, s.config.x());
    VolumeSamples v;
    for (int i = 0; i < q.n_radial(); ++i) {
        const ShellFields f = interior_shell(s, bx, q.radii[i], q.grid);
        for (int j = 0; j < q.grid.n_theta(); ++j)
            for (int k = 0; k < q.grid.n_phi(); ++k) {
                const std::size_t idx = q.grid.index(j, k);
                v.points.push_back(q.radii[i] * q.grid.point(j, k));
                v.weights.push_back(q.weights[i] * q.grid.weight(j));
                v.values.push_back(f.j[idx]);
            }
    }
    return v;
}

inline VolumeSamples sample_current(const std::function<cvec3(const vec3&)>& current, const VolumeQuadrature& q)
{
    VolumeSamples v;
    for (int i = 0; i < q.n_radial(); ++i)
        for (int j = 0; j < q.grid.n_theta(); ++j)
            for (int k = 0; k < q.grid.n_phi(); ++k) {
                const vec3 p = q.radii[i] * q.grid.point(j, k);
                v.points.push_back(p);
                v.weights.push_back(q.weights[i] * q.grid.weight(j));
                v.values.push_back(current(p));
            }
    return v;
}

// ---------------------------------------------------------------------------
// Biot-Savart: B(x) = curl int G J = sum w J(y) x (x - y) / (4 pi |x - y|^3).

inline std::vector<cvec3> biot_savart(const VolumeSamples& v, const std::vector<vec3>& targets,
                                      double margin = 1e-3)
{
    std::vector<cvec3> out;
    out.reserve(targets.size());
    for (const vec3& x : targets) {
        if (!(x.norm() > 1.0 + margin))
            throw std::invalid_argument("biot_savart: target inside the closed ball (|x| <= 1 + margin)");
        cvec3 b = cvec3::Zero();
        for (std::size_t q = 0; q < v.points.size(); ++q) {
            const vec3 d = x - v.points[q];
            const double r = d.norm();
            b += (v.weights[q] / (4.0 * std::numbers::pi * r * r * r)) * bcross(v.values[q], d);
        }
        out.push_back(b);
    }
    return out;
}

inline std::vector<cvec3> biot_savart(const std::function<cvec3(const vec3&)>& current, const VolumeQuadrature& q,
                                      const std::vector<vec3>& targets, double margin = 1e-3)
{
    return biot_savart(sample_current(current, q), targets, margin);
}

/// B^In = grad_x g_0(x, x_e) for a unit charge outside the sphere, J^In . n = 0.
/// Harmonic in a neighbourhood of the ball, so the outgoing field is
/// generated by J- alone.
inline BoundaryData external_charge_data(const vec3& x_e, const SphereGrid& grid)
{
    if (!(x_e.norm() > 1.0))
        throw std::invalid_argument("external_charge_data: charge must lie outside the unit sphere");
    return sample_boundary_data(
        grid,
        [&](const vec3& p) {
            const vec3 d = p - x_e;
            const double r = d.norm();
            return to_complex(vec3(-d / (4.0 * std::numbers::pi * r * r * r)));
        },
        [](const vec3&) { return cplx(0.0); });
}

inline DebyeSolution solve_external_charge(const LondonConfig& cfg, const vec3& x_e)
{
    cfg.validate();
    const SphereGrid g = SphereGrid::for_degree(cfg.n_max, default_data_pad(cfg.n_max));
    return solve_scattering(cfg, project_rhs(external_charge_data(x_e, g), cfg.n_max));
}

inline double max_relative_error(const std::vector<cvec3>& a, const std::vector<cvec3>& ref)
{
    if (a.size() != ref.size())
        throw std::invalid_argument("max_relative_error: sizes differ");
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double s = ref[i].norm();
        e = std::max(e, s > 0.0 ? (a[i] - ref[i]).norm() / s : (a[i] - ref[i]).norm());
    }
    return e;
}

struct BiotSavartLevel {
    int n_radial = 0, angular_degree = 0;
    double error = 0.0; // max relative error against B+ over the targets
};

struct BiotSavartStudy {
    std::vector<vec3> targets;
    std::vector<BiotSavartLevel> levels;

    double finest_error() const { return levels.empty() ? 0.0 : levels.back().error; }
    /// error ratio between consecutive levels (coarse / fine)
    std::vector<double> ratios() const
    {
        std::vector<double> r;
        for (std::size_t i = 1; i < levels.size(); ++i)
            r.push_back(levels[i].error > 0.0 ? levels[i - 1].error / levels[i].error
                                              : std::numeric_limits<double>::infinity());
        return r;
    }
};

/// Biot-Savart of J- against the represented B+ with both quadrature orders
/// doubled at each level. The angular degree never drops below n_max.
inline BiotSavartStudy biot_savart_study(const DebyeSolution& s, const std::vector<vec3>& targets, int n_radial,
                                         int angular_degree, int levels = 3)
{
    if (levels < 1)
        throw std::invalid_argument("biot_savart_study: need at least one level");
    BiotSavartStudy st;
    st.targets = targets;
    const FieldEvaluation ref = eval_fields_series(s, targets, Side::Exterior);
    if (!ref.all_valid())
        throw std::invalid_argument("biot_savart_study: targets must lie outside the sphere");
    for (int l = 0; l < levels; ++l) {
        const int nr = n_radial << l;
        const int la = std::max(s.n_max(), angular_degree << l);
        const VolumeQuadrature q = VolumeQuadrature::interior(nr, la);
        st.levels.push_back({nr, la, max_relative_error(biot_savart(sample_current(s, q), targets), ref.b)});
    }
    return st;
}

// ---------------------------------------------------------------------------
// Field representation from volume and boundary data (interior points):
// B(x) = curl int_Omega G J - curl int_Gamma G (n x B) + grad int_Gamma G (n . B).
// The same sum vanishes outside the closed ball.

struct RepresentationResult {
    std::vector<cvec3> volume, tangential, normal, total;
};

inline RepresentationResult representation_from_data(const DebyeSolution& s, const std::vector<vec3>& targets,
                                                     const VolumeQuadrature& q, int surface_degree)
{
    const double lam = s.config.lambda_L;
    const VolumeSamples v = sample_current(s, q);
    const SphereGrid g = SphereGrid::for_degree(std::max(surface_degree, s.n_max()));
    const SurfaceSamples tr = surface_samples(s, g);
    RepresentationResult out;
    for (const vec3& x : targets) {
        if (std::abs(x.norm() - 1.0) < 1e-3)
            throw std::invalid_argument("representation_from_data: target too close to the boundary");
        // Inside, J(x) is subtracted under the integral and restored with
        // int_Omega (x - y)/(4 pi |x - y|^3) dy = x/3, which leaves an O(1/|x - y|) integrand.
        const bool inside = x.norm() < 1.0;
        cvec3 j0 = cvec3::Zero();
        if (inside && x.norm() >= 1e-2)
            j0 = eval_fields_series(s, {x}, Side::Interior).j[0];
        else if (inside)
            throw std::invalid_argument("representation_from_data: interior targets need |x| >= 1e-2");
        cvec3 bv = bcross(j0, to_complex(vec3(x / 3.0))), bt = cvec3::Zero(), bn = cvec3::Zero();
        for (std::size_t i = 0; i < v.points.size(); ++i) {
            const vec3 d = x - v.points[i];
            const double r = d.norm();
            if (r < 1e-12)
                continue;
            bv += (v.weights[i] / (4.0 * std::numbers::pi * r * r * r)) * bcross(v.values[i] - j0, d);
        }
        for (int j = 0; j < g.n_theta(); ++j)
            for (int k = 0; k < g.n_phi(); ++k) {
                const std::size_t idx = g.index(j, k);
                const vec3 y = g.point(j, k);
                const vec3 d = x - y;
                const double r = d.norm();
                // grad_x G = -d / (4 pi r^3)
                const cvec3 gg = to_complex(vec3(-d / (4.0 * std::numbers::pi * r * r * r)));
                const cvec3 b = lam * tr.b_tilde[idx];
                const cvec3 nxb = bcross(to_complex(y), b);
                const double w = g.weight(j);
                bt -= w * bcross(gg, nxb);
                bn += w * bdot(b, y) * gg;
            }
        out.volume.push_back(bv);
        out.tangential.push_back(bt);
        out.normal.push_back(bn);
        out.total.push_back(bv + bt + bn);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Energy. With B- = lambda B~-:
//   int_Omega |B-|^2/lambda^2 + |J-|^2 = lambda Re int_Gamma n . (conj B~- x J-)
//   int_{Omega^c} |B+|^2 = -Re int_Gamma conj(u) n . B+,  B+ = grad u, u = S_0[q+].

struct EnergyBalance {
    double volume_interior = 0.0, volume_exterior = 0.0;
    double flux_interior = 0.0, flux_exterior = 0.0;

    double lambda_L = 1.0;
    double volume() const { return volume_interior + volume_exterior / (lambda_L * lambda_L); }
    double flux() const { return flux_interior + flux_exterior / (lambda_L * lambda_L); }
    double relative_residual() const
    {
        const double s = std::max(std::abs(volume()), std::abs(flux()));
        return s > 0.0 ? std::abs(volume() - flux()) / s : 0.0;
    }
};

inline EnergyBalance energy_identity(const DebyeSolution& s, const VolumeQuadrature& q_in,
                                     const VolumeQuadrature& q_out)
{
    const int n_max = s.n_max();
    if (q_in.angular_degree() < n_max || q_out.angular_degree() < n_max)
        throw std::invalid_argument("energy_identity: angular degree below n_max");
    EnergyBalance e;
    const double lam = s.config.lambda_L;
    e.lambda_L = lam;

    const ModBesselRatios bx(n_max + 2, s.config.x());
    for (int i = 0; i < q_in.n_radial(); ++i) {
        const ShellFields f = interior_shell(s, bx, q_in.radii[i], q_in.grid);
        std::vector<double> d(q_in.grid.size());
        for (std::size_t p = 0; p < d.size(); ++p)
            d[p] = f.b[p].squaredNorm() + f.j[p].squaredNorm();
        e.volume_interior += q_in.weights[i] * q_in.grid.integrate(d);
    }
    for (int i = 0; i < q_out.n_radial(); ++i) {
        const std::vector<cvec3> b = exterior_shell(s, q_out.radii[i], q_out.grid);
        std::vector<double> d(q_out.grid.size());
        for (std::size_t p = 0; p < d.size(); ++p)
            d[p] = b[p].squaredNorm();
        e.volume_exterior += q_out.weights[i] * q_out.grid.integrate(d);
    }

    // boundary side: products of degree <= 2 n_max are exact on this grid
    const SphereGrid g = SphereGrid::for_degree(n_max);
    const SurfaceSamples tr = surface_samples(s, g);
    ModeCoefficients u(n_max);
    for (int n = 0; n <= n_max; ++n)
        for (int m = -n; m <= n; ++m)
            u(n, m) = symbol_S0(n) * s.q_plus(n, m);
    const std::vector<cplx> uv = g.synthesize(u);
    std::vector<double> fi(g.size()), fe(g.size());
    for (int j = 0; j < g.n_theta(); ++j)
        for (int k = 0; k < g.n_phi(); ++k) {
            const std::size_t idx = g.index(j, k);
            const vec3 nrm = g.normal(j, k);
            fi[idx] = bdot(bcross(tr.b_tilde[idx].conjugate(), tr.j[idx]), nrm).real();
            fe[idx] = -(std::conj(uv[idx]) * bdot(tr.b_plus[idx], nrm)).real();
        }
    e.flux_interior = lam * g.integrate(fi);
    e.flux_exterior = g.integrate(fe);
    return e;
}

// ---------------------------------------------------------------------------
// Far field.

struct FarFieldFit {
    std::vector<vec3> directions;
    std::vector<double> slopes; // empty when the field is identically zero
    bool identically_zero = false;

    double worst_slope() const
    {
        double w = -std::numeric_limits<double>::infinity();
        for (double s : slopes)
            w = std::max(w, s);
        return w;
    }
};

/// Least-squares slope of log|B| against log r along each direction.
inline FarFieldFit farfield_decay(const std::function<cvec3(const vec3&)>& field, const std::vector<vec3>& directions,
                                  const std::vector<double>& radii)
{
    if (radii.size() < 2)
        throw std::invalid_argument("farfield_decay: need at least two radii");
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (radii[i] < 2.0 || (i > 0 && !(radii[i] > radii[i - 1])))
            throw std::invalid_argument("farfield_decay: radii must be increasing and >= 2");
    FarFieldFit fit;
    fit.directions = directions;
    std::vector<std::vector<double>> mags;
    double biggest = 0.0;
    for (const vec3& d : directions) {
        const vec3 u = d.normalized();
        std::vector<double> m;
        for (double r : radii) {
            m.push_back(field(r * u).norm());
            biggest = std::max(biggest, m.back());
        }
        mags.push_back(m);
    }
    if (biggest == 0.0) {
        fit.identically_zero = true;
        return fit;
    }
    for (const auto& m : mags) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = double(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double lx = std::log(radii[i]);
            const double ly = std::log(std::max(m[i], std::numeric_limits<double>::min()));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        fit.slopes.push_back((n * sxy - sx * sy) / (n * sxx - sx * sx));
    }
    return fit;
}

inline FarFieldFit farfield_decay(const DebyeSolution& s, const std::vector<vec3>& directions,
                                  const std::vector<double>& radii)
{
    return farfield_decay(
        [&](const vec3& p) { return eval_fields_series(s, {p}, Side::Exterior).b[0]; }, directions, radii);
}

// ---------------------------------------------------------------------------
// London system by central differences of the series fields:
// curl B~- = J-/lambda, curl J- = -B~-/lambda.

inline double london_residual(const DebyeSolution& s, const std::vector<vec3>& points, double h = 1e-4)
{
    const double lam = s.config.lambda_L;
    std::vector<vec3> probes;
    for (const vec3& p : points) {
        if (!(p.norm() + h < 1.0 - 1e-3) || p.norm() - h < 1e-2)
            throw std::invalid_argument("london_residual: points must lie inside, away from centre and boundary");
        probes.push_back(p);
        for (int a = 0; a < 3; ++a) {
            vec3 e = vec3::Zero();
            e(a) = h;
            probes.push_back(p + e);
            probes.push_back(p - e);
        }
    }
    const FieldEvaluation f = eval_fields_series(s, probes, Side::Interior);
    double worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t base = 7 * i;
        auto curl = [&](const std::vector<cvec3>& v) {
            cvec3 d[3];
            for (int a = 0; a < 3; ++a)
                d[a] = (v[base + 1 + 2 * a] - v[base + 2 + 2 * a]) / (2.0 * h);
            return cvec3(d[1](2) - d[2](1), d[2](0) - d[0](2), d[0](1) - d[1](0));
        };
        const cvec3 b = f.b[base], j = f.j[base];
        const double scale = std::max({b.norm(), j.norm(), std::numeric_limits<double>::min()});
        const double r1 = (curl(f.b) - j / lam).norm();
        const double r2 = (curl(f.j) + b / lam).norm();
        worst = std::max(worst, std::max(r1, r2) / scale);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Report.

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline CheckResult check_below(const std::string& name, double value, double tol)
{
    return {name, value, tol, std::isfinite(value) && value <= tol};
}

/// Checks that need only a solution and the data it was solved with:
/// mean-zero q-, r-; flux of q+; full boundary continuity (L2 over the data
/// grid, scaled by M); J-.n against the data; London residual at interior
/// points; far-field decay.
inline std::vector<CheckResult> solution_checks(const DebyeSolution& s, const BoundaryData& data,
                                                std::uint64_t seed = 11)
{
    const SphereGrid& g = data.grid;
    const double lam = s.config.lambda_L;
    const double M = s.density_norm();
    const double area = std::sqrt(4.0 * std::numbers::pi);
    std::vector<CheckResult> out;
    out.push_back(check_below("mean of q-", std::abs(s.q_minus(0, 0)) * area, 1e-12));
    out.push_back(check_below("mean of r-", std::abs(s.r_minus(0, 0)) * area, 1e-12));

    std::vector<cplx> bn(g.size());
    for (int j = 0; j < g.n_theta(); ++j)
        for (int k = 0; k < g.n_phi(); ++k)
            bn[g.index(j, k)] = bdot(data.b_in[g.index(j, k)], g.normal(j, k));
    out.push_back(check_below("|int q+ - int B^In.n|", std::abs(s.q_plus_total() - g.integrate(bn)), 1e-10));

    const SurfaceSamples tr = surface_samples(s, g);
    std::vector<double> cont(g.size());
    double jn = 0.0;
    for (int j = 0; j < g.n_theta(); ++j)
        for (int k = 0; k < g.n_phi(); ++k) {
            const std::size_t i = g.index(j, k);
            cont[i] = (lam * tr.b_tilde[i] - tr.b_plus[i] - data.b_in[i]).squaredNorm();
            jn = std::max(jn, std::abs(bdot(tr.j[i], g.normal(j, k)) - data.jn_in[i]));
        }
    out.push_back(check_below("boundary continuity lambda B~- - B+ - B^In (L2/M)",
                              M > 0.0 ? std::sqrt(g.integrate(cont)) / M : std::sqrt(g.integrate(cont)), 1e-6));
    out.push_back(check_below("max |J-.n - J^In.n|", jn, 1e-8));
    out.push_back(check_below("London residual by finite differences", london_residual(s, random_targets(6, 0.6, seed)),
                              1e-5));
    const FarFieldFit ff = farfield_decay(s, random_targets(6, 1.0, seed + 1), {4, 8, 16, 32});
    if (!ff.identically_zero)
        out.push_back(check_below("far-field slope + 2", ff.worst_slope() + 2.0, 0.05));
    return out;
}

} // namespace london
