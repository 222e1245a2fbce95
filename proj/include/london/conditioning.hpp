#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "london/debye.hpp"
#include "london/errors.hpp"
#include "london/specfun.hpp"

namespace london {

using SingularValues = std::array<double, 6>;

namespace detail {

inline SingularValues singular_values(const Mat6& m)
{
    const Eigen::JacobiSVD<Mat6> svd(m);
    SingularValues s;
    for (int j = 0; j < 6; ++j)
        s[j] = svd.singularValues()(j);
    return s;
}

} // namespace detail

/// Singular values (descending) of D^-1 A_n with D the principal block. For
/// n = 0 the printed block is singular (constant q- is in its kernel); the
/// gauge-fixed block that is actually solved is used instead.
inline SingularValues mode_singular_values(int n, const LondonConfig& cfg, const ModBesselRatios& b)
{
    detail::check_degree(n);
    Mat6 a = build_An_real(n, cfg.sigma_l, cfg.sigma_m, b);
    if (n == 0)
        a(3, 3) = -cfg.lambda_L / 4.0;
    return detail::singular_values(build_D_principal(cfg.lambda_L).inverse() * a);
}

inline SingularValues mode_singular_values(int n, const LondonConfig& cfg)
{
    cfg.validate();
    return mode_singular_values(n, cfg, ModBesselRatios(n + 1, cfg.x()));
}

struct ConditionOptions {
    double tail_tolerance = 0.01; // truncation once max_j |s_j,n - 1| < tol
    int n_cap = 0;                // 0: chosen automatically
    int n_limit = 100000;         // hard ceiling of the automatic scan
    // The gauge-fixed n = 0 block does not depend on sigma and carries the
    // extreme singular values for every lambda; by default kappa is taken
    // over the operator degrees n >= 1.
    bool include_degree_zero = false;
};

struct ConditionResult {
    double kappa = 0.0;
    double s_max = 0.0, s_min = std::numeric_limits<double>::infinity();
    int n_at_smax = -1, j_at_smax = -1;
    int n_at_smin = -1, j_at_smin = -1;
    int n_cap = 0;       // first degree after which every block is within tolerance
    int n_scanned = 0;   // last degree examined (tail verification included)
    double tail_deviation = 0.0; // max_j |s - 1| over (n_cap, n_scanned]
    bool finite = true;
    /// kappa with the unscanned tail bracketed to [1 - tol, 1 + tol]
    double kappa_bracketed = 0.0;
};

/// Table of Bessel ratios reused across parameter sweeps at fixed lambda.
class ConditionContext {
public:
    ConditionContext(double lambda_L, int n_limit)
        : lambda_(lambda_L), table_(n_limit + 1, 1.0 / lambda_L), d_inv_(build_D_principal(lambda_L).inverse())
    {
    }

    double lambda_L() const noexcept { return lambda_; }
    int n_limit() const noexcept { return table_.order_max() - 1; }
    const ModBesselRatios& table() const noexcept { return table_; }

    SingularValues singular_values(int n, double sigma_l, double sigma_m) const
    {
        Mat6 a = build_An_real(n, sigma_l, sigma_m, table_);
        if (n == 0)
            a(3, 3) = -lambda_ / 4.0;
        return detail::singular_values(d_inv_ * a);
    }

private:
    double lambda_;
    ModBesselRatios table_;
    Mat6 d_inv_;
};

namespace detail {

inline void absorb(ConditionResult& r, int n, const SingularValues& s)
{
    for (int j = 0; j < 6; ++j) {
        if (s[j] > r.s_max) {
            r.s_max = s[j];
            r.n_at_smax = n;
            r.j_at_smax = j + 1;
        }
        if (s[j] < r.s_min) {
            r.s_min = s[j];
            r.n_at_smin = n;
            r.j_at_smin = j + 1;
        }
    }
}

inline double deviation(const SingularValues& s)
{
    double d = 0.0;
    for (double v : s)
        d = std::max(d, std::abs(v - 1.0));
    return d;
}

} // namespace detail

/// kappa = s_max / s_min over all singular values of D^-1 A_n, n = 0..n_cap.
/// Automatic n_cap: scan until no block has deviated by tol over a span of
/// at least twice the last offending degree plus 50. A given n_cap is
/// verified over (n_cap, 2 n_cap + 50]; a violation there is an error.
inline ConditionResult condition_number(const LondonConfig& cfg, const ConditionContext& ctx,
                                        const ConditionOptions& opt = {})
{
    cfg.validate();
    if (std::abs(ctx.lambda_L() - cfg.lambda_L) > 0.0)
        throw std::invalid_argument("condition_number: context built for another lambda");
    const double tol = opt.tail_tolerance;
    ConditionResult r;

    const int n_first = opt.include_degree_zero ? 0 : 1;
    int last_violation = n_first - 1;
    int n = n_first;
    const int fixed_end = opt.n_cap > 0 ? 2 * opt.n_cap + 50 : -1;
    if (fixed_end > ctx.n_limit())
        throw std::invalid_argument("condition_number: n_cap exceeds the ratio table");
    for (;; ++n) {
        if (opt.n_cap > 0) {
            if (n > fixed_end)
                break;
        } else {
            if (n >= 64 && n >= 2 * (last_violation + 1) + 50)
                break;
            if (n > ctx.n_limit())
                throw precision_error("condition_number: singular values not within " + std::to_string(tol) +
                                      " of 1 below degree " + std::to_string(ctx.n_limit()) +
                                      "; raise the scan limit");
        }
        const SingularValues s = ctx.singular_values(n, cfg.sigma_l, cfg.sigma_m);
        const double dev = detail::deviation(s);
        if (dev >= tol)
            last_violation = n;
        if (opt.n_cap > 0 && n > opt.n_cap) {
            r.tail_deviation = std::max(r.tail_deviation, dev);
            continue; // verification only
        }
        detail::absorb(r, n, s);
        if (opt.n_cap == 0 && n > last_violation)
            r.tail_deviation = std::max(r.tail_deviation, dev);
        if (opt.n_cap == 0 && n == last_violation)
            r.tail_deviation = 0.0;
    }
    r.n_scanned = n - 1;
    if (opt.n_cap > 0) {
        if (last_violation > opt.n_cap)
            throw precision_error("condition_number: tail not converged at n_cap = " + std::to_string(opt.n_cap) +
                                  " (degree " + std::to_string(last_violation) + " deviates by >= " +
                                  std::to_string(tol) + "); use a larger n_cap");
        r.n_cap = opt.n_cap;
    } else {
        r.n_cap = last_violation + 1;
    }
    r.finite = r.s_min > 0.0 && std::isfinite(r.s_max);
    r.kappa = r.finite ? r.s_max / r.s_min : std::numeric_limits<double>::infinity();
    r.kappa_bracketed =
        r.finite ? std::max(r.s_max, 1.0 + tol) / std::min(r.s_min, 1.0 - tol) : std::numeric_limits<double>::infinity();
    return r;
}

inline ConditionResult condition_number(const LondonConfig& cfg, const ConditionOptions& opt = {})
{
    const int limit = opt.n_cap > 0 ? 2 * opt.n_cap + 50 : opt.n_limit;
    return condition_number(cfg, ConditionContext(cfg.lambda_L, limit), opt);
}

/// Smallest n0 >= 1 such that max_j |s_j,n - 1| is non-increasing on
/// [n0, n_hi]. Returns n_hi when the deviation rises at the last step.
inline int tail_decrease_threshold(const LondonConfig& cfg, const ConditionContext& ctx, int n_hi)
{
    if (n_hi < 2 || n_hi > ctx.n_limit())
        throw std::invalid_argument("tail_decrease_threshold: n_hi outside [2, table limit]");
    double next = detail::deviation(ctx.singular_values(n_hi, cfg.sigma_l, cfg.sigma_m));
    int n0 = n_hi;
    for (int n = n_hi - 1; n >= 1; --n) {
        const double d = detail::deviation(ctx.singular_values(n, cfg.sigma_l, cfg.sigma_m));
        if (d < next)
            break;
        next = d;
        n0 = n;
    }
    return n0;
}

struct SigmaGrid {
    double lo = -5.0, hi = 5.0;
    int points = 21;

    double value(int i) const
    {
        if (points == 1)
            return 0.5 * (lo + hi);
        return lo + (hi - lo) * i / (points - 1);
    }
    void validate() const
    {
        if (points < 1 || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("sigma grid needs points >= 1 and lo <= hi");
    }
};

struct SweepPoint {
    double sigma_l = 0.0, sigma_m = 0.0;
    ConditionResult result;
};

struct ConditionSweepResult {
    double lambda_L = 1.0;
    SigmaGrid grid_l, grid_m;
    std::vector<SweepPoint> points; // sigma_l outer, sigma_m inner

    const SweepPoint& at(int il, int im) const { return points[std::size_t(il) * grid_m.points + im]; }

    const SweepPoint& minimum() const
    {
        std::size_t best = 0;
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].result.kappa < points[best].result.kappa)
                best = i;
        return points[best];
    }
};

inline ConditionSweepResult sweep(double lambda_L, const SigmaGrid& gl, const SigmaGrid& gm,
                                  const ConditionOptions& opt = {})
{
    check_lambda(lambda_L);
    gl.validate();
    gm.validate();
    const int limit = opt.n_cap > 0 ? 2 * opt.n_cap + 50 : opt.n_limit;
    const ConditionContext ctx(lambda_L, limit);
    ConditionSweepResult out;
    out.lambda_L = lambda_L;
    out.grid_l = gl;
    out.grid_m = gm;
    for (int il = 0; il < gl.points; ++il)
        for (int im = 0; im < gm.points; ++im) {
            LondonConfig c;
            c.lambda_L = lambda_L;
            c.sigma_l = gl.value(il);
            c.sigma_m = gm.value(im);
            out.points.push_back({c.sigma_l, c.sigma_m, condition_number(c, ctx, opt)});
        }
    return out;
}

} // namespace london
