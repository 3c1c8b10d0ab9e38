#pragma once

// Round annulus A_r = {1/r < |z| < r} and its strip model
//   { zeta = xi + i*eta : |eta| < log r } / (zeta -> zeta + 2*pi),
// which is the coordinate every other header works in.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace annulab {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Rectangular coordinate in the strip model. `xi` is periodic mod 2*pi,
/// `eta` is the signed log-radius coordinate, |eta| <= log r.
struct StripPoint {
    double xi{0.0};
    double eta{0.0};
};

/// The annulus A_r, r > 1, together with the derived quantities used
/// everywhere: log r and the conformal modulus (1/pi) log r.
class AnnulusSpec {
  public:
    explicit AnnulusSpec(double r) : r_(r) {
        if (!(r > 1.0) || !std::isfinite(r)) {
            throw std::domain_error("AnnulusSpec: radius must satisfy r > 1, got r = " +
                                    std::to_string(r));
        }
        log_r_ = std::log(r);
        modulus_ = log_r_ / pi;
    }

    double r() const { return r_; }
    double log_r() const { return log_r_; }
    double modulus() const { return modulus_; }

    /// A_{r^n}, the degree-n covering target of A_r under z -> z^n.
    AnnulusSpec power(int n) const {
        if (n < 1) throw std::domain_error("AnnulusSpec::power: n must be >= 1");
        return AnnulusSpec(std::pow(r_, static_cast<double>(n)));
    }

    bool contains(const StripPoint& p) const { return std::abs(p.eta) <= log_r_; }
    bool strictly_contains(const StripPoint& p) const { return std::abs(p.eta) < log_r_; }

  private:
    double r_;
    double log_r_;
    double modulus_;
};

/// A point together with a tangent direction, the argument pair of every
/// infinitesimal metric.
struct TangentSample {
    StripPoint point;
    complex vector{1.0, 0.0};

    bool vector_usable() const {
        return std::isfinite(vector.real()) && std::isfinite(vector.imag()) &&
               std::abs(vector) > 0.0;
    }
};

/// z = exp(i*zeta): strip coordinate to the round annulus.
inline complex annulus_point(const StripPoint& p) {
    return std::exp(complex(-p.eta, p.xi));
}

/// Inverse of annulus_point: zeta = -i log z with eta = -log|z|.
inline StripPoint strip_point(const complex& z) {
    if (!(std::abs(z) > 0.0)) throw std::domain_error("strip_point: z must be nonzero");
    return StripPoint{std::arg(z), -std::log(std::abs(z))};
}

/// Convert a density reported against |dzeta| to one against |dz| at the
/// same point (|dzeta/dz| = 1/|z|).
inline double density_to_dz(double density_dzeta, const complex& z) {
    return density_dzeta / std::abs(z);
}

inline double density_to_dzeta(double density_dz, const complex& z) {
    return density_dz * std::abs(z);
}

} // namespace annulab
