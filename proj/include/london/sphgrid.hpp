#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "london/quadrature.hpp"
#include "london/specfun.hpp"
#include "london/vec.hpp"

namespace london {

/// Coefficients c_nm of an expansion in orthonormal Y_nm, 0 <= n <= n_max.
class ModeCoefficients {
public:
    ModeCoefficients() = default;
    explicit ModeCoefficients(int n_max) : n_max_(n_max), c_((n_max + 1) * (n_max + 1), 0.0)
    {
        if (n_max < 0)
            throw std::invalid_argument("ModeCoefficients: n_max must be nonnegative");
    }

    static int index(int n, int m) { return n * n + n + m; }

    int n_max() const noexcept { return n_max_; }
    std::size_t size() const noexcept { return c_.size(); }
    cplx& operator()(int n, int m) { return c_[index(n, m)]; }
    const cplx& operator()(int n, int m) const { return c_[index(n, m)]; }
    std::vector<cplx>& data() noexcept { return c_; }
    const std::vector<cplx>& data() const noexcept { return c_; }

    /// Sum of |c_nm|^2, i.e. the L2(sphere) norm squared.
    double norm_squared() const
    {
        double s = 0.0;
        for (const cplx& v : c_)
            s += std::norm(v);
        return s;
    }

    bool mean_zero(double tol) const { return c_.empty() || std::abs(c_[0]) < tol; }

private:
    int n_max_ = -1;
    std::vector<cplx> c_;
};

/// t = sum g_nm grad_G Y_nm + h_nm n x grad_G Y_nm (entries at n = 0 unused).
struct TangentialCoefficients {
    ModeCoefficients grad;
    ModeCoefficients rot;

    TangentialCoefficients() = default;
    explicit TangentialCoefficients(int n_max) : grad(n_max), rot(n_max) {}
    int n_max() const { return grad.n_max(); }
};

/// Components of a vector field in the basis (Y r_hat, grad_G Y, r_hat x grad_G Y).
struct VectorCoefficients {
    ModeCoefficients radial;
    ModeCoefficients grad;
    ModeCoefficients rot;

    VectorCoefficients() = default;
    explicit VectorCoefficients(int n_max) : radial(n_max), grad(n_max), rot(n_max) {}
    int n_max() const { return radial.n_max(); }
};

inline ModeCoefficients surface_laplacian(const ModeCoefficients& c)
{
    ModeCoefficients out(c.n_max());
    for (int n = 0; n <= c.n_max(); ++n)
        for (int m = -n; m <= n; ++m)
            out(n, m) = -double(n) * (n + 1) * c(n, m);
    return out;
}

/// Surface divergence of a tangential field, as scalar coefficients.
inline ModeCoefficients surface_divergence(const TangentialCoefficients& t)
{
    return surface_laplacian(t.grad);
}

/// Gauss-Legendre in cos(theta) times uniform longitude.
class SphereGrid {
public:
    SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi)
    {
        if (n_theta < 1 || n_phi < 1)
            throw std::invalid_argument("SphereGrid: need positive grid dimensions");
        const GaussRule rule = gauss_legendre(n_theta);
        cos_theta_.resize(n_theta);
        sin_theta_.resize(n_theta);
        weight_.resize(n_theta);
        for (int j = 0; j < n_theta; ++j) {
            cos_theta_[j] = -rule.nodes[j];
            sin_theta_[j] = std::sqrt((1.0 - cos_theta_[j]) * (1.0 + cos_theta_[j]));
            weight_[j] = rule.weights[j];
        }
        phi_.resize(n_phi);
        for (int k = 0; k < n_phi; ++k)
            phi_[k] = 2.0 * std::numbers::pi * k / n_phi;
        twiddle_.resize(n_phi);
        for (int k = 0; k < n_phi; ++k)
            twiddle_[k] = std::polar(1.0, phi_[k]);
    }

    /// Minimal alias-free grid for degree n_max, optionally padded.
    static SphereGrid for_degree(int n_max, int pad = 0)
    {
        return SphereGrid(n_max + 1 + pad, 2 * (n_max + pad) + 2);
    }

    int n_theta() const noexcept { return n_theta_; }
    int n_phi() const noexcept { return n_phi_; }
    std::size_t size() const noexcept { return std::size_t(n_theta_) * n_phi_; }
    std::size_t index(int j, int k) const { return std::size_t(j) * n_phi_ + k; }

    double cos_theta(int j) const { return cos_theta_[j]; }
    double sin_theta(int j) const { return sin_theta_[j]; }
    double phi(int k) const { return phi_[k]; }
    double theta_weight(int j) const { return weight_[j]; }
    double weight(int j) const { return weight_[j] * 2.0 * std::numbers::pi / n_phi_; }

    vec3 point(int j, int k) const
    {
        return {sin_theta_[j] * std::cos(phi_[k]), sin_theta_[j] * std::sin(phi_[k]),
                cos_theta_[j]};
    }
    vec3 normal(int j, int k) const { return point(j, k); }
    vec3 theta_hat(int j, int k) const
    {
        return {cos_theta_[j] * std::cos(phi_[k]), cos_theta_[j] * std::sin(phi_[k]),
                -sin_theta_[j]};
    }
    vec3 phi_hat(int k) const { return {-std::sin(phi_[k]), std::cos(phi_[k]), 0.0}; }

    std::vector<vec3> points() const
    {
        std::vector<vec3> p;
        p.reserve(size());
        for (int j = 0; j < n_theta_; ++j)
            for (int k = 0; k < n_phi_; ++k)
                p.push_back(point(j, k));
        return p;
    }

    /// Largest degree that analyze/synthesize handle without aliasing.
    int max_degree() const { return std::min(n_theta_ - 1, (n_phi_ - 1) / 2); }

    void require_degree(int n_max) const
    {
        if (n_max < 0 || n_max > max_degree())
            throw std::invalid_argument("SphereGrid " + std::to_string(n_theta_) + "x" +
                                        std::to_string(n_phi_) +
                                        " cannot resolve degree " + std::to_string(n_max));
    }

    template <class T>
    T integrate(const std::vector<T>& f) const
    {
        T total{};
        for (int j = 0; j < n_theta_; ++j) {
            T ring{};
            for (int k = 0; k < n_phi_; ++k)
                ring += f[index(j, k)];
            total += weight(j) * ring;
        }
        return total;
    }

    ModeCoefficients analyze(const std::vector<cplx>& values, int n_max) const
    {
        require_degree(n_max);
        check_size(values.size());
        ModeCoefficients c(n_max);
        std::vector<cplx> fm(2 * n_max + 1);
        for (int j = 0; j < n_theta_; ++j) {
            ring_forward(&values[index(j, 0)], n_max, fm.data());
            const LegendreColumn col(n_max, cos_theta_[j], sin_theta_[j]);
            const double w = weight(j);
            for (int m = -n_max; m <= n_max; ++m) {
                const cplx f = w * signed_factor(m) * fm[m + n_max];
                for (int n = std::abs(m); n <= n_max; ++n)
                    c(n, m) += col.value(n, std::abs(m)) * f;
            }
        }
        return c;
    }

    std::vector<cplx> synthesize(const ModeCoefficients& c) const
    {
        const int n_max = c.n_max();
        require_degree(n_max);
        std::vector<cplx> out(size());
        std::vector<cplx> gm(2 * n_max + 1);
        for (int j = 0; j < n_theta_; ++j) {
            const LegendreColumn col(n_max, cos_theta_[j], sin_theta_[j]);
            for (int m = -n_max; m <= n_max; ++m) {
                cplx g = 0.0;
                for (int n = std::abs(m); n <= n_max; ++n)
                    g += col.value(n, std::abs(m)) * c(n, m);
                gm[m + n_max] = signed_factor(m) * g;
            }
            ring_inverse(gm.data(), n_max, &out[index(j, 0)]);
        }
        return out;
    }

    /// Projection of the tangential part of `values` onto grad_G Y_nm and
    /// n x grad_G Y_nm, normalized so band-limited fields reconstruct exactly.
    TangentialCoefficients tangential_analyze(const std::vector<cvec3>& values, int n_max) const
    {
        require_degree(n_max);
        check_size(values.size());
        TangentialCoefficients t(n_max);
        std::vector<cplx> t_theta(n_phi_), t_phi(n_phi_);
        std::vector<cplx> ft(2 * n_max + 1), fp(2 * n_max + 1);
        for (int j = 0; j < n_theta_; ++j) {
            for (int k = 0; k < n_phi_; ++k) {
                const cvec3& v = values[index(j, k)];
                t_theta[k] = bdot(v, theta_hat(j, k));
                t_phi[k] = bdot(v, phi_hat(k));
            }
            ring_forward(t_theta.data(), n_max, ft.data());
            ring_forward(t_phi.data(), n_max, fp.data());
            const LegendreColumn col(n_max, cos_theta_[j], sin_theta_[j]);
            const double w = weight(j);
            for (int m = -n_max; m <= n_max; ++m) {
                const int am = std::abs(m);
                const double sgn = signed_factor(m);
                const cplx Tt = w * sgn * ft[m + n_max];
                const cplx Tp = w * sgn * fp[m + n_max];
                const cplx im(0.0, m);
                for (int n = std::max(am, 1); n <= n_max; ++n) {
                    const double d = col.dtheta(n, am);
                    const double u = am == 0 ? 0.0 : col.over_sin(n, am);
                    t.grad(n, m) += d * Tt - im * u * Tp;
                    t.rot(n, m) += d * Tp + im * u * Tt;
                }
            }
        }
        for (int n = 1; n <= n_max; ++n) {
            const double inv = 1.0 / (n * (n + 1.0));
            for (int m = -n; m <= n; ++m) {
                t.grad(n, m) *= inv;
                t.rot(n, m) *= inv;
            }
        }
        return t;
    }

    std::vector<cvec3> tangential_synthesize(const TangentialCoefficients& t) const
    {
        VectorCoefficients v(t.n_max());
        v.grad = t.grad;
        v.rot = t.rot;
        return vector_synthesize(v);
    }

    /// Samples of F Y r_hat + G grad_G Y + H r_hat x grad_G Y.
    std::vector<cvec3> vector_synthesize(const VectorCoefficients& v) const
    {
        const int n_max = v.n_max();
        require_degree(n_max);
        std::vector<cvec3> out(size());
        std::vector<cplx> fr(2 * n_max + 1), ft(2 * n_max + 1), fp(2 * n_max + 1);
        std::vector<cplx> sr(n_phi_), st(n_phi_), sp(n_phi_);
        for (int j = 0; j < n_theta_; ++j) {
            const LegendreColumn col(n_max, cos_theta_[j], sin_theta_[j]);
            for (int m = -n_max; m <= n_max; ++m) {
                const int am = std::abs(m);
                const cplx im(0.0, m);
                cplx r = 0.0, th = 0.0, ph = 0.0;
                for (int n = am; n <= n_max; ++n) {
                    const double lam = col.value(n, am);
                    const double d = col.dtheta(n, am);
                    const double u = am == 0 ? 0.0 : col.over_sin(n, am);
                    r += lam * v.radial(n, m);
                    th += d * v.grad(n, m) - im * u * v.rot(n, m);
                    ph += im * u * v.grad(n, m) + d * v.rot(n, m);
                }
                const double sgn = signed_factor(m);
                fr[m + n_max] = sgn * r;
                ft[m + n_max] = sgn * th;
                fp[m + n_max] = sgn * ph;
            }
            ring_inverse(fr.data(), n_max, sr.data());
            ring_inverse(ft.data(), n_max, st.data());
            ring_inverse(fp.data(), n_max, sp.data());
            for (int k = 0; k < n_phi_; ++k)
                out[index(j, k)] = sr[k] * to_complex(normal(j, k)) +
                                   st[k] * to_complex(theta_hat(j, k)) +
                                   sp[k] * to_complex(phi_hat(k));
        }
        return out;
    }

private:
    void check_size(std::size_t n) const
    {
        if (n != size())
            throw std::invalid_argument("SphereGrid: sample count does not match grid");
    }

    cplx twiddle(long long mk) const
    {
        long long r = mk % n_phi_;
        if (r < 0)
            r += n_phi_;
        return twiddle_[r];
    }

    // out[m + n_max] = sum_k f_k exp(-i m phi_k)
    void ring_forward(const cplx* f, int n_max, cplx* out) const
    {
        for (int m = -n_max; m <= n_max; ++m) {
            cplx s = 0.0;
            for (int k = 0; k < n_phi_; ++k)
                s += f[k] * twiddle(-static_cast<long long>(m) * k);
            out[m + n_max] = s;
        }
    }

    // f_k = sum_m g[m + n_max] exp(i m phi_k)
    void ring_inverse(const cplx* g, int n_max, cplx* f) const
    {
        for (int k = 0; k < n_phi_; ++k) {
            cplx s = 0.0;
            for (int m = -n_max; m <= n_max; ++m)
                s += g[m + n_max] * twiddle(static_cast<long long>(m) * k);
            f[k] = s;
        }
    }

    int n_theta_, n_phi_;
    std::vector<double> cos_theta_, sin_theta_, weight_, phi_;
    std::vector<cplx> twiddle_;
};

/// All Y_nm and grad_G Y_nm (as Cartesian vectors) at one direction.
class HarmonicsAtPoint {
public:
    HarmonicsAtPoint(int n_max, const vec3& direction)
        : n_max_(n_max), frame_(direction), y_((n_max + 1) * (n_max + 1)),
          grad_((n_max + 1) * (n_max + 1))
    {
        const LegendreColumn col(n_max, frame_.cos_theta, frame_.sin_theta);
        const cvec3 th = to_complex(frame_.theta_hat);
        const cvec3 ph = to_complex(frame_.phi_hat);
        for (int m = -n_max; m <= n_max; ++m) {
            const int am = std::abs(m);
            const cplx e = signed_factor(m) * std::polar(1.0, m * frame_.phi);
            const cplx im(0.0, m);
            for (int n = am; n <= n_max; ++n) {
                const int i = ModeCoefficients::index(n, m);
                y_[i] = col.value(n, am) * e;
                const double u = am == 0 ? 0.0 : col.over_sin(n, am);
                grad_[i] = e * (col.dtheta(n, am) * th + im * u * ph);
            }
        }
    }

    int n_max() const noexcept { return n_max_; }
    const SphericalFrame& frame() const noexcept { return frame_; }
    const cplx& y(int n, int m) const { return y_[ModeCoefficients::index(n, m)]; }
    /// grad_G Y_nm on the unit sphere.
    const cvec3& grad(int n, int m) const { return grad_[ModeCoefficients::index(n, m)]; }
    /// r_hat x grad_G Y_nm.
    cvec3 rot(int n, int m) const { return bcross(frame_.r_hat, grad(n, m)); }

private:
    int n_max_;
    SphericalFrame frame_;
    std::vector<cplx> y_;
    std::vector<cvec3> grad_;
};

} // namespace london
