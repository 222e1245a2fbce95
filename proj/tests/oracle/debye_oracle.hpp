#pragma once

// Brute-force application of the boundary operators to spherical-harmonic
// densities. For every target x0 on a Gauss grid the layer potentials are
// integrated in geodesic polar coordinates centred at x0:
//   y = cos(a) x0 + sin(a) (cos(b) e1 + sin(b) e2),  dS = sin(a) da db,
// Gauss-Legendre in a on [0, pi], trapezoid in b. The area element cancels
// the 1/d kernel singularity, and the trapezoid sum removes the odd 1/d^2
// part of gradient kernels exactly (principal value). Jump terms are added
// explicitly, then the three boundary functionals are projected onto Y_nm.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "london/debye.hpp"
#include "london/quadrature.hpp"
#include "london/sphgrid.hpp"
#include "oracle/symbol_oracle.hpp"

namespace oracle {

using london::cplx;
using london::cvec3;
using london::vec3;

struct OracleOptions {
    int n_alpha = 80;
    int beta_pad = 12;
    int target_pad = 4;
};

class DebyeOracle {
public:
    DebyeOracle(int n, int m, double lambda, OracleOptions opt = {})
        : n_(n), m_(m), lambda_(lambda), x_(1.0 / lambda),
          targets_(london::SphereGrid::for_degree(n + opt.target_pad))
    {
        const double s0 = oracle_symbol(Kernel::S0, n, 1.0);
        s0_ = s0;
        s0_sq_ = s0 * s0;
        const london::GaussRule ra = london::gauss_legendre(opt.n_alpha, 0.0, std::numbers::pi);
        const int n_beta = 2 * n + opt.beta_pad;

        const std::size_t nt = targets_.size();
        at_.resize(nt);
        for (int j = 0; j < targets_.n_theta(); ++j)
            for (int k = 0; k < targets_.n_phi(); ++k) {
                const vec3 x0 = targets_.point(j, k);
                TargetIntegrals& t = at_[targets_.index(j, k)];
                t.normal = x0;
                basis(x0, t.y0, t.g0);
                t.r0 = london::bcross(x0, t.g0);

                vec3 e1 = std::abs(x0.z()) < 0.9 ? vec3(0, 0, 1).cross(x0) : vec3(1, 0, 0).cross(x0);
                e1.normalize();
                const vec3 e2 = x0.cross(e1);
                for (int ia = 0; ia < opt.n_alpha; ++ia) {
                    const double a = ra.nodes[ia];
                    const double wa = ra.weights[ia] * std::sin(a) * 2.0 * std::numbers::pi / n_beta;
                    for (int ib = 0; ib < n_beta; ++ib) {
                        const double b = 2.0 * std::numbers::pi * ib / n_beta;
                        const vec3 y = std::cos(a) * x0 + std::sin(a) * (std::cos(b) * e1 + std::sin(b) * e2);
                        accumulate(t, x0, y, wa);
                    }
                }
            }
    }

    /// Per-degree matrix for the given representation parameters.
    london::CMat6 matrix(double sigma_l, double sigma_m) const
    {
        const double N = n_ * (n_ + 1.0);
        london::CMat6 A = london::CMat6::Zero();
        const double lb = (-N + (n_ == 0 ? 1.0 : 0.0)) * s0_sq_;
        for (int r = 0; r < 3; ++r) {
            A(r, r) = lb;
            A(r, r + 3) = -1.0;
        }
        for (int col = 0; col < 6; ++col) {
            london::CVec6 c = london::CVec6::Zero();
            c(col) = 1.0;
            std::vector<cvec3> v(targets_.size());
            std::vector<cplx> vn(targets_.size()), jn(targets_.size());
            for (std::size_t i = 0; i < targets_.size(); ++i) {
                cvec3 b_int, j_int, b_ext;
                fields(at_[i], c, sigma_l, sigma_m, b_int, j_int, b_ext);
                v[i] = lambda_ * b_int - b_ext;
                vn[i] = london::bdot(v[i], at_[i].normal);
                jn[i] = london::bdot(j_int, at_[i].normal);
            }
            const int L = targets_.max_degree();
            const london::TangentialCoefficients vt = targets_.tangential_analyze(v, L);
            A(3, col) = -N * vt.grad(n_, m_) * s0_;
            A(4, col) = targets_.analyze(vn, L)(n_, m_);
            A(5, col) = targets_.analyze(jn, L)(n_, m_);
        }
        return A;
    }

    /// Largest coefficient produced outside (n, m) by any column.
    double leakage(double sigma_l, double sigma_m) const
    {
        double worst = 0.0;
        for (int col = 0; col < 6; ++col) {
            london::CVec6 c = london::CVec6::Zero();
            c(col) = 1.0;
            std::vector<cplx> vn(targets_.size()), jn(targets_.size());
            for (std::size_t i = 0; i < targets_.size(); ++i) {
                cvec3 b_int, j_int, b_ext;
                fields(at_[i], c, sigma_l, sigma_m, b_int, j_int, b_ext);
                vn[i] = london::bdot(cvec3(lambda_ * b_int - b_ext), at_[i].normal);
                jn[i] = london::bdot(j_int, at_[i].normal);
            }
            const int L = targets_.max_degree();
            const london::ModeCoefficients a = targets_.analyze(vn, L), b = targets_.analyze(jn, L);
            for (int nn = 0; nn <= L; ++nn)
                for (int mm = -nn; mm <= nn; ++mm)
                    if (nn != n_ || mm != m_)
                        worst = std::max({worst, std::abs(a(nn, mm)), std::abs(b(nn, mm))});
        }
        return worst;
    }

private:
    struct TargetIntegrals {
        vec3 normal;
        cplx y0;
        cvec3 g0 = cvec3::Zero(), r0 = cvec3::Zero();
        cplx sk_y = 0.0;                                             // S_k[Y]
        cvec3 sk_g = cvec3::Zero(), sk_r = cvec3::Zero();            // S_k[grad Y], S_k[n x grad Y]
        cvec3 grad_sk_y = cvec3::Zero();                             // p.v. grad S_k[Y]
        cvec3 curl_sk_g = cvec3::Zero(), curl_sk_r = cvec3::Zero();  // p.v. curl S_k[.]
        cvec3 grad_s0_y = cvec3::Zero();                             // p.v. grad S_0[Y]
    };

    void basis(const vec3& p, cplx& y, cvec3& g) const
    {
        const london::HarmonicsAtPoint h(n_, p);
        y = h.y(n_, m_);
        g = h.grad(n_, m_);
    }

    void accumulate(TargetIntegrals& t, const vec3& x0, const vec3& y, double w) const
    {
        cplx yv;
        cvec3 gv;
        basis(y, yv, gv);
        const cvec3 rv = london::bcross(y, gv);
        const vec3 R = x0 - y;
        const double d = R.norm();
        const double gk = std::exp(-x_ * d) / (4.0 * std::numbers::pi * d);
        const vec3 grad_k = -gk * (x_ + 1.0 / d) / d * R;
        const vec3 grad_0 = -R / (4.0 * std::numbers::pi * d * d * d);
        t.sk_y += w * gk * yv;
        t.sk_g += w * gk * gv;
        t.sk_r += w * gk * rv;
        t.grad_sk_y += w * yv * london::to_complex(grad_k);
        t.curl_sk_g += w * london::bcross(grad_k, gv);
        t.curl_sk_r += w * london::bcross(grad_k, rv);
        t.grad_s0_y += w * yv * london::to_complex(grad_0);
    }

    // Interior limits of B~-, J- and exterior limit of B+ for densities
    // c = [rho-, rho+, mu-, q-, q+, r-] Y_nm.
    void fields(const TargetIntegrals& t, const london::CVec6& c, double sigma_l, double sigma_m,
                cvec3& b_int, cvec3& j_int, cvec3& b_ext) const
    {
        const cvec3 nrm = london::to_complex(t.normal);
        const double f = x_ * s0_sq_;
        // m- = x S0^2 [grad rho- + sigma_m n x grad rho+]
        // l- = -x S0^2 [grad mu- + sigma_l n x grad rho+]
        const cvec3 theta = f * (c(0) * t.sk_g + sigma_m * c(1) * t.sk_r);
        const cvec3 a_vec = -f * (c(2) * t.sk_g + sigma_l * c(1) * t.sk_r);
        const cvec3 m_here = f * (c(0) * t.g0 + sigma_m * c(1) * t.r0);
        const cvec3 l_here = -f * (c(2) * t.g0 + sigma_l * c(1) * t.r0);
        const cvec3 curl_theta =
            f * (c(0) * t.curl_sk_g + sigma_m * c(1) * t.curl_sk_r) + 0.5 * london::bcross(nrm, m_here);
        const cvec3 curl_a =
            -f * (c(2) * t.curl_sk_g + sigma_l * c(1) * t.curl_sk_r) + 0.5 * london::bcross(nrm, l_here);
        const cvec3 grad_psi = c(3) * (t.grad_sk_y + 0.5 * t.y0 * nrm);
        const cvec3 grad_phi = c(5) * (t.grad_sk_y + 0.5 * t.y0 * nrm);
        b_int = -x_ * theta + grad_psi + curl_a;
        j_int = -x_ * a_vec - grad_phi - curl_theta;
        b_ext = c(4) * (t.grad_s0_y - 0.5 * t.y0 * nrm);
    }

    int n_, m_;
    double lambda_, x_;
    double s0_ = 0.0, s0_sq_ = 0.0;
    london::SphereGrid targets_;
    std::vector<TargetIntegrals> at_;
};

} // namespace oracle
