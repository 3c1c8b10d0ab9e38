#pragma once

// Poincare, Kobayashi and Caratheodory metric quantities on the disc and
// on annuli.  Everything is a pure function; densities on the annulus are
// reported against |dzeta| in the strip coordinate (use density_to_dz for
// the round-annulus coordinate).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "annulab/annulus.hpp"

namespace annulab {

/// Thrown by the infinite-product evaluator when the requested relative
/// tolerance cannot be certified within the term budget.
class SlowConvergence : public std::runtime_error {
  public:
    SlowConvergence(const std::string& what, double achieved_bound)
        : std::runtime_error(what), achieved_bound_(achieved_bound) {}
    double achieved_bound() const { return achieved_bound_; }

  private:
    double achieved_bound_;
};

/// Poincare density |v| / (1 - |p|^2) on the unit disc.
inline double poincare_disc(const complex& p, const complex& v) {
    const double ap = std::abs(p);
    if (!(ap < 1.0)) throw std::domain_error("poincare_disc: |p| must be < 1");
    return std::abs(v) / (1.0 - ap * ap);
}

/// Global Poincare distance on the unit disc,
/// (1/2) log((1+r)/(1-r)) with r the pseudo-hyperbolic distance.
inline double poincare_global_disc(const complex& z1, const complex& z2) {
    if (!(std::abs(z1) < 1.0) || !(std::abs(z2) < 1.0)) {
        throw std::domain_error("poincare_global_disc: both points must lie in the open disc");
    }
    const double rhat = std::abs(z1 - z2) / std::abs(1.0 - std::conj(z1) * z2);
    return 0.5 * std::log((1.0 + rhat) / (1.0 - rhat));
}

/// Kobayashi (Poincare) density of A_r against |dzeta| at a strip point:
///   pi |v| / (2 log r * cos(eta*pi / (2 log r))).
/// The boundary lines eta = +-log r are a domain error (the density
/// diverges there).
inline double kobayashi_annulus(const AnnulusSpec& a, const StripPoint& p, const complex& v) {
    const double h = a.log_r();
    if (!(std::abs(p.eta) < h)) {
        throw std::domain_error("kobayashi_annulus: |eta| must be < log r (density is "
                                "unbounded at the boundary)");
    }
    return pi * std::abs(v) / (2.0 * h * std::cos(p.eta * pi / (2.0 * h)));
}

/// Core-curve value K_r(1) = pi / (2 log r).
inline double kobayashi_core(const AnnulusSpec& a) { return pi / (2.0 * a.log_r()); }

namespace detail {

struct ProductResult {
    double value;        // the converged product quotient
    double error_bound;  // certified relative error
    std::size_t terms;
};

/// Quotient of Simha's products,
///   prod (1+r^{-4n})^2 (1-r^{-4n})^2 / prod (1+r^{-4n+2})^2 (1-r^{-4n+2})^2.
/// Each combined factor equals ((1-r^{-8n}) / (1-r^{-8n+4}))^2, so the
/// quotient is accumulated in log space with log1p (the per-term
/// contributions are all positive, which keeps the sum free of
/// cancellation), and the deviations decay geometrically, which gives the
/// tail bound.
inline ProductResult simha_product(double r, double rel_tol, std::size_t max_terms) {
    if (!(rel_tol > 0.0) || rel_tol > 1e-3) {
        throw std::domain_error("simha product: rel_tol must lie in (0, 1e-3]");
    }
    const double q8 = std::pow(r, -8.0);  // ratio between consecutive deviations
    const double r4 = std::pow(r, 4.0);

    double log_product = 0.0;
    double a_n = q8;  // r^{-8n}
    for (std::size_t n = 1; n <= max_terms; ++n) {
        const double b_n = a_n * r4;  // r^{-8n+4}
        log_product += 2.0 * (std::log1p(-a_n) - std::log1p(-b_n));

        // Next factor's deviation and the geometric tail from it.
        const double a_next = a_n * q8;
        const double b_next = a_next * r4;
        const double next_dev = 2.0 * (b_next - a_next) / (1.0 - b_next);
        const double tail_log = next_dev / (1.0 - q8);
        const double tail_bound = std::expm1(tail_log);
        if (next_dev < rel_tol / 10.0 && tail_bound <= rel_tol) {
            return ProductResult{std::exp(log_product), tail_bound, n};
        }
        a_n = a_next;
    }
    // Could not certify within the budget; report the bound we did reach.
    const double b_n = a_n * r4;
    const double dev = 2.0 * (b_n - a_n) / (1.0 - b_n);
    const double achieved = std::expm1(dev / (1.0 - q8));
    throw SlowConvergence("simha product: slow convergence at r = " + std::to_string(r) +
                              " (achieved relative bound " + std::to_string(achieved) +
                              " after " + std::to_string(max_terms) + " terms)",
                          achieved);
}

} // namespace detail

inline constexpr std::size_t simha_default_max_terms = 1000000;

/// The product quotient of Simha's formula by itself (tends to 1 as r grows).
inline double simha_product_quotient(const AnnulusSpec& a, double rel_tol = 1e-12,
                                     std::size_t max_terms = simha_default_max_terms) {
    return detail::simha_product(a.r(), rel_tol, max_terms).value;
}

/// Caratheodory core density C_r(1) by Simha's explicit formula,
///   (2/r) * product quotient,
/// with certified relative error <= rel_tol from the geometric tail bound.
inline double caratheodory_core_simha(const AnnulusSpec& a, double rel_tol = 1e-12,
                                      std::size_t max_terms = simha_default_max_terms) {
    return 2.0 / a.r() * detail::simha_product(a.r(), rel_tol, max_terms).value;
}

/// Core ratio C_r(1)/K_r(1) = (4/pi) (log r / r) * product quotient.
inline double metric_ratio_core(const AnnulusSpec& a, double rel_tol = 1e-12,
                                std::size_t max_terms = simha_default_max_terms) {
    return 4.0 / pi * a.log_r() / a.r() *
           detail::simha_product(a.r(), rel_tol, max_terms).value;
}

/// Upper bound (1/n) * r/(r-1) for C_{r^n}(1).
inline double car_decay_bound(const AnnulusSpec& a, int n) {
    if (n < 1) throw std::domain_error("car_decay_bound: n must be >= 1");
    return a.r() / (a.r() - 1.0) / static_cast<double>(n);
}

/// Both covering facts for z -> z^n from A_r onto A_{r^n}:
/// Caratheodory contracts, C_{r^n}(1) <= (1/n) C_r(1), while Kobayashi is
/// a covering isometry, n * K_{r^n}(1) = K_r(1).
struct CoveringCheck {
    double car_covered;    // C_{r^n}(1)
    double car_bound;      // (1/n) C_r(1)
    bool car_holds;
    double kob_scaled;     // n * K_{r^n}(1)
    double kob_base;       // K_r(1)
    bool kob_equal;        // to 1e-14 relative
    bool holds;
};

inline CoveringCheck covering_contraction_check(const AnnulusSpec& a, int n,
                                                double rel_tol = 1e-12) {
    if (n < 1) throw std::domain_error("covering_contraction_check: n must be >= 1");
    const AnnulusSpec covered = a.power(n);
    CoveringCheck c{};
    c.car_covered = caratheodory_core_simha(covered, rel_tol);
    c.car_bound = caratheodory_core_simha(a, rel_tol) / static_cast<double>(n);
    c.car_holds = c.car_covered <= c.car_bound * (1.0 + 2.0 * rel_tol);
    c.kob_scaled = static_cast<double>(n) * kobayashi_core(covered);
    c.kob_base = kobayashi_core(a);
    c.kob_equal = std::abs(c.kob_scaled - c.kob_base) <= 1e-14 * c.kob_base;
    c.holds = c.car_holds && c.kob_equal;
    return c;
}

struct RatioSample {
    double r;
    double caratheodory;
    double kobayashi;
    double ratio;
};

/// Sample (r, C, K, C/K) on a log-spaced grid; the ratio is the curve of
/// Figure-2 type, strictly decreasing in r.
inline std::vector<RatioSample> ratio_curve(double r_min, double r_max, int steps,
                                            double rel_tol = 1e-12) {
    if (!(1.0 < r_min && r_min < r_max)) {
        throw std::domain_error("ratio_curve: need 1 < r_min < r_max");
    }
    if (steps < 2) throw std::domain_error("ratio_curve: steps must be >= 2");
    std::vector<RatioSample> rows;
    rows.reserve(static_cast<std::size_t>(steps));
    const double l0 = std::log(r_min), l1 = std::log(r_max);
    for (int k = 0; k < steps; ++k) {
        const double r = std::exp(l0 + (l1 - l0) * k / (steps - 1));
        const AnnulusSpec a(r);
        const double cara = caratheodory_core_simha(a, rel_tol);
        const double kob = kobayashi_core(a);
        rows.push_back(RatioSample{r, cara, kob, cara / kob});
    }
    return rows;
}

} // namespace annulab
