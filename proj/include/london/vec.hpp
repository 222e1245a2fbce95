#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace london {

using cplx = std::complex<double>;
using vec3 = Eigen::Vector3d;
using cvec3 = Eigen::Vector3cd;

inline cvec3 to_complex(const vec3& v) { return v.cast<cplx>(); }

/// Bilinear (unconjugated) product; Eigen's dot() conjugates its left operand.
inline cplx bdot(const cvec3& a, const cvec3& b) { return a.cwiseProduct(b).sum(); }
inline cplx bdot(const cvec3& a, const vec3& b)
{
    return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

/// Bilinear cross product; Eigen's cross() conjugates complex operands.
template <class A, class B>
inline cvec3 bcross(const A& a, const B& b)
{
    const cvec3 u = a.template cast<cplx>();
    const cvec3 v = b.template cast<cplx>();
    return {u(1) * v(2) - u(2) * v(1), u(2) * v(0) - u(0) * v(2), u(0) * v(1) - u(1) * v(0)};
}

/// Local spherical frame at a direction: r_hat, theta_hat, phi_hat. At the
/// poles phi is taken as 0.
struct SphericalFrame {
    double cos_theta, sin_theta, phi;
    vec3 r_hat, theta_hat, phi_hat;

    explicit SphericalFrame(const vec3& p)
    {
        const double rho = std::hypot(p.x(), p.y());
        const double r = std::hypot(rho, p.z());
        cos_theta = p.z() / r;
        sin_theta = rho / r;
        phi = rho > 0.0 ? std::atan2(p.y(), p.x()) : 0.0;
        const double cp = std::cos(phi), sp = std::sin(phi);
        r_hat = vec3(sin_theta * cp, sin_theta * sp, cos_theta);
        theta_hat = vec3(cos_theta * cp, cos_theta * sp, -sin_theta);
        phi_hat = vec3(-sp, cp, 0.0);
    }
};

} // namespace london
