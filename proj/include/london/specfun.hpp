#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "london/errors.hpp"

namespace london {

using cplx = std::complex<double>;

/// Modified spherical Bessel functions i_n(x), k_n(x) for n = 0..order_max,
/// with k_0(x) = exp(-x)/x.
struct BesselTable {
    int order_max = 0;
    double argument = 0.0;
    std::vector<double> i_values;
    std::vector<double> k_values;
};

inline BesselTable mod_sph_bessel(int n_max, double x)
{
    if (n_max < 0)
        throw std::invalid_argument("mod_sph_bessel: n_max must be nonnegative");
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("mod_sph_bessel: argument must be positive and finite");

    const double i0 = std::sinh(x) / x;
    if (!std::isfinite(i0))
        throw std::range_error("mod_sph_bessel: sinh(x) overflows for x = " + std::to_string(x));

    BesselTable t;
    t.order_max = n_max;
    t.argument = x;
    t.i_values.assign(n_max + 1, 0.0);
    t.k_values.assign(n_max + 1, 0.0);

    // Miller recurrence, rescaling whenever the unnormalized values grow large.
    const int start = n_max + std::max(20, static_cast<int>(std::ceil(x)));
    double f_up = 0.0, f = 1.0;
    for (int n = start; n >= 1; --n) {
        const double f_down = f_up + (2.0 * n + 1.0) / x * f;
        f_up = f;
        f = f_down;
        if (n - 1 <= n_max)
            t.i_values[n - 1] = f;
        if (std::abs(f) > 1e200) {
            f *= 1e-200;
            f_up *= 1e-200;
            for (int j = n - 1; j <= n_max; ++j)
                t.i_values[j] *= 1e-200;
        }
    }
    const double scale = i0 / t.i_values[0];
    for (double& v : t.i_values) {
        v *= scale;
        if (!(v >= DBL_MIN))
            throw precision_error("mod_sph_bessel: i_n underflows for n_max = " +
                                  std::to_string(n_max) + ", x = " + std::to_string(x));
    }

    t.k_values[0] = std::exp(-x) / x;
    if (n_max >= 1)
        t.k_values[1] = t.k_values[0] * (1.0 + 1.0 / x);
    for (int n = 1; n < n_max; ++n)
        t.k_values[n + 1] = t.k_values[n - 1] + (2.0 * n + 1.0) / x * t.k_values[n];
    for (double v : t.k_values)
        if (!std::isfinite(v) || !(v >= DBL_MIN))
            throw std::range_error("mod_sph_bessel: k_n leaves floating range for n_max = " +
                                   std::to_string(n_max) + ", x = " + std::to_string(x));
    return t;
}

/// Scale-free representation of i_n, k_n at one argument: consecutive ratios
/// and the products i_n k_n. Stays finite where the functions themselves
/// overflow or underflow (large n, large or small x).
class ModBesselRatios {
public:
    ModBesselRatios() = default;

    ModBesselRatios(int order_max, double y) : order_max_(order_max), y_(y)
    {
        if (order_max < 0)
            throw std::invalid_argument("ModBesselRatios: order_max must be nonnegative");
        if (!(y >= 0.0) || !std::isfinite(y))
            throw std::invalid_argument("ModBesselRatios: argument must be nonnegative and finite");
        rho_.assign(order_max + 1, 0.0);
        if (y == 0.0)
            return;
        t_.assign(order_max + 1, 0.0);
        prod_.assign(order_max + 1, 0.0);

        // rho_n = i_{n+1}/i_n from the backward continued fraction.
        const int start = order_max + std::max(20, static_cast<int>(std::ceil(y))) + 16;
        double r = y / (2.0 * start + 3.0);
        for (int n = start - 1; n >= 0; --n) {
            r = 1.0 / ((2.0 * n + 3.0) / y + r);
            if (n <= order_max)
                rho_[n] = r;
        }
        // t_n = k_{n+1}/k_n, stable upward.
        t_[0] = 1.0 + 1.0 / y;
        for (int n = 1; n <= order_max; ++n)
            t_[n] = 1.0 / t_[n - 1] + (2.0 * n + 1.0) / y;
        // Wronskian i_n k_{n+1} + i_{n+1} k_n = 1/y^2.
        for (int n = 0; n <= order_max; ++n)
            prod_[n] = 1.0 / (y * y * (t_[n] + rho_[n]));
    }

    int order_max() const noexcept { return order_max_; }
    double argument() const noexcept { return y_; }

    /// i_{n+1}(y) / i_n(y)
    double rho(int n) const { return rho_[n]; }
    /// k_{n+1}(y) / k_n(y)
    double t(int n) const { return t_[n]; }
    /// k_{n-1}(y) / k_n(y), with k_{-1} = k_0.
    double k_down(int n) const { return n == 0 ? 1.0 : 1.0 / t_[n - 1]; }

    /// i_n k_n
    double ik(int n) const { return prod_[n]; }
    /// i_n' k_n (derivative in the argument)
    double dik(int n) const { return (rho_[n] + n / y_) * prod_[n]; }
    /// i_n k_{n-1}
    double ik_down(int n) const { return prod_[n] * k_down(n); }
    /// i_{n+1} k_n
    double i_up_k(int n) const { return rho_[n] * prod_[n]; }
    /// i_{n+1} k_{n-1}
    double i_up_k_down(int n) const { return rho_[n] * prod_[n] * k_down(n); }

private:
    int order_max_ = 0;
    double y_ = 0.0;
    std::vector<double> rho_;
    std::vector<double> t_;
    std::vector<double> prod_;
};

// Products of spherical Bessel and Hankel functions at k = i/lambda. With
// x = 1/lambda: j_n(ix) = i^n i_n(x), h_n(ix) = -i^{-n} k_n(x), and
// j_n'(ix) = i^{n-1} i_n'(x).

/// j_n(k) h_n(k) = -i_n k_n
inline cplx jh_product(const ModBesselRatios& b, int n) { return {-b.ik(n), 0.0}; }
/// j_n'(k) h_n(k) = i * i_n' k_n
inline cplx djh_product(const ModBesselRatios& b, int n) { return {0.0, b.dik(n)}; }
/// j_n(k) h_{n-1}(k) = -i * i_n k_{n-1}
inline cplx jh_down_product(const ModBesselRatios& b, int n) { return {0.0, -b.ik_down(n)}; }
/// j_{n+1}(k) h_n(k) = -i * i_{n+1} k_n
inline cplx j_up_h_product(const ModBesselRatios& b, int n) { return {0.0, -b.i_up_k(n)}; }
/// j_{n+1}(k) h_{n-1}(k) = i_{n+1} k_{n-1}
inline cplx j_up_h_down_product(const ModBesselRatios& b, int n) { return {b.i_up_k_down(n), 0.0}; }

inline void check_lambda(double lambda_L)
{
    if (!(lambda_L > 0.0) || !std::isfinite(lambda_L))
        throw std::invalid_argument("penetration depth lambda_L must be positive and finite");
}

/// j_n(k) h_n(k) at k = i/lambda_L.
inline cplx bessel_product_jh(int n, double lambda_L)
{
    if (n < 0)
        throw std::invalid_argument("bessel_product_jh: n must be nonnegative");
    check_lambda(lambda_L);
    return jh_product(ModBesselRatios(n, 1.0 / lambda_L), n);
}

/// Interior radial profiles s_L(r) = x i_L(x r) k_L(x) and their r-derivatives
/// for L = 0..order_max, x = 1/lambda. `at_x` must cover order_max + 1.
struct RadialProfiles {
    std::vector<double> s;
    std::vector<double> ds;
};

inline RadialProfiles interior_profiles(const ModBesselRatios& at_x, double r, int order_max)
{
    const double x = at_x.argument();
    if (at_x.order_max() < order_max + 1)
        throw std::invalid_argument("interior_profiles: ratio table too short");
    const ModBesselRatios at_xr(order_max + 1, x * r);

    // R_L = i_L(xr)/i_L(x), L = 0..order_max+1.
    std::vector<double> ratio(order_max + 2);
    if (r * x < 1e-300)
        ratio[0] = 2.0 * x * std::exp(-x) / (-std::expm1(-2.0 * x));
    else
        ratio[0] = std::exp(x * (r - 1.0)) * (-std::expm1(-2.0 * x * r)) /
                   (r * (-std::expm1(-2.0 * x)));
    for (int L = 0; L <= order_max; ++L)
        ratio[L + 1] = ratio[L] * at_xr.rho(L) / at_x.rho(L);

    RadialProfiles p;
    p.s.resize(order_max + 1);
    p.ds.resize(order_max + 1);
    for (int L = 0; L <= order_max; ++L) {
        const double ik = at_x.ik(L);
        p.s[L] = x * ik * ratio[L];
        // (2L+1) i_L' = L i_{L-1} + (L+1) i_{L+1}
        const double down = L > 0 ? L * ratio[L - 1] / at_x.rho(L - 1) : 0.0;
        const double up = (L + 1.0) * ratio[L + 1] * at_x.rho(L);
        p.ds[L] = x * x * ik * (down + up) / (2.0 * L + 1.0);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Orthonormal associated Legendre functions with the Condon-Shortley phase.

inline int tri_index(int n, int m) { return n * (n + 1) / 2 + m; }

/// lambda_n^m(theta) = N_n^m P_n^m(cos theta) for 0 <= m <= n <= degree_max,
/// together with d/dtheta and u_n^m = lambda_n^m / sin(theta) (m >= 1), the
/// latter regular at the poles.
class LegendreColumn {
public:
    LegendreColumn() = default;

    LegendreColumn(int degree_max, double cos_theta, double sin_theta)
        : degree_max_(degree_max)
    {
        const int size = tri_index(degree_max + 1, 0);
        value_.assign(size, 0.0);
        dtheta_.assign(size, 0.0);
        over_sin_.assign(size, 0.0);
        const double c = cos_theta, s = sin_theta;

        double diag = 1.0 / std::sqrt(4.0 * std::numbers::pi);
        double diag_over_sin = 0.0;
        for (int m = 0; m <= degree_max; ++m) {
            if (m > 0) {
                const double f = -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
                diag_over_sin = f * diag;
                diag = f * s * diag;
            }
            fill_order(m, c, diag, diag_over_sin);
        }
        for (int n = 0; n <= degree_max; ++n) {
            dtheta_[tri_index(n, 0)] =
                n == 0 ? 0.0 : std::sqrt(n * (n + 1.0)) * value_[tri_index(n, 1)];
            for (int m = 1; m <= n; ++m) {
                double d = n * c * over_sin_[tri_index(n, m)];
                if (n > m)
                    d -= std::sqrt((2.0 * n + 1.0) / (2.0 * n - 1.0) * (n * n - m * m)) *
                         over_sin_[tri_index(n - 1, m)];
                dtheta_[tri_index(n, m)] = d;
            }
        }
    }

    int degree_max() const noexcept { return degree_max_; }
    double value(int n, int m) const { return value_[tri_index(n, m)]; }
    double dtheta(int n, int m) const { return dtheta_[tri_index(n, m)]; }
    double over_sin(int n, int m) const { return over_sin_[tri_index(n, m)]; }

private:
    void fill_order(int m, double c, double diag, double diag_over_sin)
    {
        value_[tri_index(m, m)] = diag;
        over_sin_[tri_index(m, m)] = diag_over_sin;
        double a_prev = 0.0;
        for (int n = m + 1; n <= degree_max_; ++n) {
            const double a = std::sqrt((4.0 * n * n - 1.0) / (double(n) * n - double(m) * m));
            double v = c * value_[tri_index(n - 1, m)];
            double u = c * over_sin_[tri_index(n - 1, m)];
            if (n > m + 1) {
                v -= value_[tri_index(n - 2, m)] / a_prev;
                u -= over_sin_[tri_index(n - 2, m)] / a_prev;
            }
            value_[tri_index(n, m)] = a * v;
            over_sin_[tri_index(n, m)] = a * u;
            a_prev = a;
        }
    }

    int degree_max_ = 0;
    std::vector<double> value_;
    std::vector<double> dtheta_;
    std::vector<double> over_sin_;
};

/// Signed-order Legendre factor: Y_nm = legendre_signed(...) * exp(i m phi).
inline double signed_factor(int m) { return (m < 0 && (m & 1)) ? -1.0 : 1.0; }

/// Orthonormal spherical harmonic Y_nm(theta, phi), Condon-Shortley phase.
inline cplx sph_harm(int n, int m, double theta, double phi)
{
    if (n < 0 || std::abs(m) > n)
        throw std::invalid_argument("sph_harm: require 0 <= |m| <= n");
    const LegendreColumn col(n, std::cos(theta), std::sin(theta));
    const double v = signed_factor(m) * col.value(n, std::abs(m));
    return v * std::polar(1.0, m * phi);
}

} // namespace london
