#pragma once

#include <cmath>

#include "london/specfun.hpp"

namespace london {

// Symbols (eigenvalues on Y_nm) of the layer operators on the unit sphere.
// Normal derivatives use the outward normal; S_k' is the on-surface
// principal value, so the interior limit of d/dn S_k[sigma] is
// (S_k' + 1/2) sigma and the exterior limit is (S_k' - 1/2) sigma.

inline double symbol_S0(int n) { return 1.0 / (2.0 * n + 1.0); }

/// S_0' = D_0 on the sphere.
inline double symbol_S0_prime(int n) { return -0.5 / (2.0 * n + 1.0); }

/// S_0'' + D_0', which is compact; the pieces are never used separately.
inline double symbol_S0pp_plus_D0p(int n) { return 1.0 / (2.0 * n + 1.0); }

/// S_0^2, the stand-in for the inverse surface Laplacian.
inline double symbol_S0_squared(int n)
{
    const double s = symbol_S0(n);
    return s * s;
}

/// (Delta_G + W) S_0^2, with W the projection onto constants.
inline double symbol_laplace_beltrami_link(int n)
{
    return (-double(n) * (n + 1) + (n == 0 ? 1.0 : 0.0)) * symbol_S0_squared(n);
}

/// S_k = i k j_n(k) h_n(k), k = i/lambda; positive real.
inline cplx symbol_Sk(const ModBesselRatios& b, int n)
{
    const cplx k(0.0, b.argument());
    return cplx(0.0, 1.0) * k * jh_product(b, n);
}

inline cplx symbol_Sk(int n, double lambda_L)
{
    check_lambda(lambda_L);
    return symbol_Sk(ModBesselRatios(n + 1, 1.0 / lambda_L), n);
}

/// S_k' = x^2 i_n' k_n - 1/2.
inline cplx symbol_Sk_prime(const ModBesselRatios& b, int n)
{
    const double x = b.argument();
    // i k^2 j_n'(k) h_n(k) = x^2 i_n' k_n
    const cplx k(0.0, x);
    return cplx(0.0, 1.0) * k * k * djh_product(b, n) - 0.5;
}

inline cplx symbol_Sk_prime(int n, double lambda_L)
{
    check_lambda(lambda_L);
    return symbol_Sk_prime(ModBesselRatios(n + 1, 1.0 / lambda_L), n);
}

/// S_k applied to grad_G Y_nm, restricted to the sphere:
/// radial * Y_nm r_hat + tangential * grad_G Y_nm. Obtained from the
/// Cartesian decomposition of grad_G Y_n into degree n+1 and n-1 vector
/// harmonics, each carried by the scalar symbol of its own degree.
struct VectorSymbol {
    double radial;
    double tangential;
};

inline VectorSymbol symbol_Sk_surface_gradient(const ModBesselRatios& b, int n)
{
    const double N = n * (n + 1.0);
    const double up = symbol_Sk(b, n + 1).real();
    const double down = n > 0 ? symbol_Sk(b, n - 1).real() : 0.0;
    const double alpha = n / (2.0 * n + 1.0), beta = (n + 1.0) / (2.0 * n + 1.0);
    return {N * (down - up) / (2.0 * n + 1.0), alpha * up + beta * down};
}

struct SymbolSet {
    int n = 0;
    double lambda_L = 1.0;
    double s0 = 0.0;
    cplx sk;
    cplx sk_prime;
    double s0_prime = 0.0;
    double s0_squared = 0.0;
    double lb_link = 0.0;
};

inline SymbolSet symbol_set(int n, double lambda_L)
{
    check_lambda(lambda_L);
    const ModBesselRatios b(n + 1, 1.0 / lambda_L);
    SymbolSet s;
    s.n = n;
    s.lambda_L = lambda_L;
    s.s0 = symbol_S0(n);
    s.sk = symbol_Sk(b, n);
    s.sk_prime = symbol_Sk_prime(b, n);
    s.s0_prime = symbol_S0_prime(n);
    s.s0_squared = symbol_S0_squared(n);
    s.lb_link = symbol_laplace_beltrami_link(n);
    return s;
}

/// Residual of Delta_G S_0^2 = -1/4 + S_0'^2 - (S_0'' + D_0' - 2 H S_0') S_0
/// for mean curvature H.
inline double calderon_residual(int n, double mean_curvature)
{
    const double lhs = -double(n) * (n + 1) * symbol_S0_squared(n);
    const double sp = symbol_S0_prime(n);
    const double rhs =
        -0.25 + sp * sp - (symbol_S0pp_plus_D0p(n) - 2.0 * mean_curvature * sp) * symbol_S0(n);
    return lhs - rhs;
}

} // namespace london
