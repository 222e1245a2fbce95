#pragma once

// Extended-precision reference values for modified spherical Bessel
// functions: ascending power series for i_n, the terminating closed form for
// k_n. Kept independent of the library recurrences.

#include <cmath>

namespace oracle {

using real = long double;

inline real double_factorial_odd(int n) // (2n+1)!!
{
    real r = 1.0L;
    for (int k = 3; k <= 2 * n + 1; k += 2)
        r *= k;
    return r;
}

inline real series_i(int n, real x)
{
    const real h = x * x / 2.0L;
    real term = 1.0L, sum = 1.0L, comp = 0.0L;
    for (int k = 1; k < 400; ++k) {
        term *= h / (k * (2.0L * n + 2.0L * k + 1.0L));
        const real y = term - comp;
        const real t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term < sum * 1e-22L)
            break;
    }
    return std::pow(x, n) / double_factorial_odd(n) * sum;
}

inline real closed_k(int n, real x)
{
    real sum = 0.0L;
    real coef = 1.0L; // (n+j)! / (j! (n-j)!)
    for (int j = 0; j <= n; ++j) {
        if (j > 0)
            coef *= real(n + j) * real(n - j + 1) / real(j);
        sum += coef / std::pow(2.0L * x, j);
    }
    return std::exp(-x) / x * sum;
}

inline real series_di(int n, real x) // derivative via (2n+1) i_n' = n i_{n-1} + (n+1) i_{n+1}
{
    const real down = n > 0 ? n * series_i(n - 1, x) : 0.0L;
    return (down + (n + 1) * series_i(n + 1, x)) / (2.0L * n + 1.0L);
}

} // namespace oracle
