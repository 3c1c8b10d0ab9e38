#pragma once

// Two-sided bounds on log r(t) / log r for the annulus sheared by Spin_t.
// These are pure formula evaluators; they do not compute r(t) itself.
//
// A caution that matters when sampling widely: the closed-form lower bound
// and the upper bound cross for log r > 2 once t is large enough, i.e. the
// pair is NOT consistent on all of t > 2*pi.  bounds_consistency_limit
// returns the threshold.  The refined lower bound (the extremal-length
// fraction with the extra 1/log r normalization) never crosses the upper
// bound.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "annulab/spin.hpp"

namespace annulab {

/// Upper bound sqrt(1 + t^2 / (log r)^2), valid for t > 0.
inline double rt_upper_bound(const SpinParams& p) {
    if (!(p.t > 0.0)) throw std::domain_error("rt_upper_bound: t must be positive");
    const double h = p.annulus.log_r();
    return std::sqrt(1.0 + (p.t / h) * (p.t / h));
}

/// Lower bound t ((1 - 2pi/t)^2 + (log r / t)^2) / sqrt(1 + (log r / t)^2),
/// asserted only for t > 2*pi.
inline double rt_lower_bound(const SpinParams& p) {
    if (!(p.t > 2.0 * pi)) throw std::domain_error("rt_lower_bound: t must exceed 2*pi");
    const double h = p.annulus.log_r();
    const double a = 1.0 - 2.0 * pi / p.t;
    const double b = h / p.t;
    return p.t * (a * a + b * b) / std::sqrt(1.0 + b * b);
}

/// Refined lower bound, the explicit extremal-length fraction
///   (2 sqrt((t-2pi)^2 + (log r)^2))^2 / (4 sqrt(t^2 + (log r)^2) log r),
/// already normalized to express log r(t) / log r.  Requires t > 2*pi.
inline double rt_lower_bound_refined(const SpinParams& p) {
    if (!(p.t > 2.0 * pi)) {
        throw std::domain_error("rt_lower_bound_refined: t must exceed 2*pi");
    }
    const double h = p.annulus.log_r();
    const double d = p.t - 2.0 * pi;
    return (d * d + h * h) / (std::sqrt(p.t * p.t + h * h) * h);
}

/// Certified bracket for log r(t) / log r at one (t, r).
struct BoundPair {
    double lower;
    double refined_lower;
    double upper;

    bool consistent() const { return lower <= upper; }
};

inline BoundPair rt_bound_pair(const SpinParams& p) {
    return BoundPair{rt_lower_bound(p), rt_lower_bound_refined(p), rt_upper_bound(p)};
}

/// Largest t for which rt_lower_bound <= rt_upper_bound.  For log r <= 1
/// the pair is consistent for every t > 2*pi (returns +inf); above that
/// the quadratic h (t-2pi)^2 + h^3 <= t^2 + h^2 eventually fails.
inline double bounds_consistency_limit(const AnnulusSpec& annulus) {
    const double h = annulus.log_r();
    if (h <= 1.0) return std::numeric_limits<double>::infinity();
    const double a = h - 1.0;
    const double b = -4.0 * pi * h;
    const double c = 4.0 * pi * pi * h + h * h * h - h * h;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return 2.0 * pi;  // inconsistent for every t > 2*pi
    const double t_hi = (-b + std::sqrt(disc)) / (2.0 * a);
    return t_hi > 2.0 * pi ? t_hi : 2.0 * pi;
}

struct BoundRow {
    double t;
    double r;
    double lower;
    double refined_lower;
    double upper;
};

/// Bound table over a log-spaced t grid in (t_min, t_max], t_min > 2*pi.
inline std::vector<BoundRow> rt_bound_table(const AnnulusSpec& annulus, double t_min,
                                            double t_max, int steps) {
    if (!(t_min > 2.0 * pi) || !(t_max > t_min)) {
        throw std::domain_error("rt_bound_table: need 2*pi < t_min < t_max");
    }
    if (steps < 2) throw std::domain_error("rt_bound_table: steps must be >= 2");
    std::vector<BoundRow> rows;
    rows.reserve(static_cast<std::size_t>(steps));
    const double l0 = std::log(t_min), l1 = std::log(t_max);
    for (int k = 0; k < steps; ++k) {
        const double t = std::exp(l0 + (l1 - l0) * k / (steps - 1));
        const SpinParams p(t, annulus);
        rows.push_back(BoundRow{t, annulus.r(), rt_lower_bound(p),
                                rt_lower_bound_refined(p), rt_upper_bound(p)});
    }
    return rows;
}

} // namespace annulab
