#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace london {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// P_n(z) and P_n'(z) by the three-term recurrence.
inline void legendre_with_derivative(int n, double z, double& p, double& dp)
{
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (z * p1 - p0) / (z * z - 1.0);
}

} // namespace detail

/// Gauss-Legendre rule on [-1, 1], nodes in increasing order.
inline GaussRule gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            detail::legendre_with_derivative(n, z, p, dp);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        detail::legendre_with_derivative(n, z, p, dp);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[n - 1 - i] = z;
        rule.nodes[i] = -z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

/// Gauss-Legendre rule mapped to [a, b].
inline GaussRule gauss_legendre(int n, double a, double b)
{
    GaussRule rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

} // namespace london
