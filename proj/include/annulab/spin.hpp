#pragma once

// The Spin_t shear of the strip model: it translates the core line eta = 0
// by t, fixes both boundary lines pointwise and interpolates linearly in
// |eta|.  The map is piecewise affine with a crease along eta = 0, so its
// Beltrami coefficient is constant on each half of the strip.

#include <cmath>
#include <complex>
#include <stdexcept>

#include "annulab/annulus.hpp"

namespace annulab {

struct SpinParams {
    double t;             // shear amount, radians of core rotation
    AnnulusSpec annulus;

    SpinParams(double t_, const AnnulusSpec& a) : t(t_), annulus(a) {
        if (!std::isfinite(t_)) throw std::domain_error("SpinParams: t must be finite");
    }

    /// sign(eta) * t / log r, the shear slope of the affine piece at eta.
    double slope(double eta) const {
        return (eta >= 0.0 ? 1.0 : -1.0) * t / annulus.log_r();
    }
};

/// Spin_t(zeta) = xi + t (1 - |eta|/log r) + i eta.
inline StripPoint spin_map(const SpinParams& p, const StripPoint& z) {
    const double h = p.annulus.log_r();
    if (std::abs(z.eta) > h) {
        throw std::domain_error("spin_map: |eta| must be <= log r");
    }
    return StripPoint{z.xi + p.t * (1.0 - std::abs(z.eta) / h), z.eta};
}

/// Closed-form Beltrami coefficient of Spin_t at height eta:
///   mu_t = -i s / (2 + i s),  s = sign(eta) * t / log r.
/// The crease eta = 0 and the boundary lines are excluded (the map is not
/// differentiable there).  |mu_t| = |s| / sqrt(4 + s^2) < 1 always.
inline complex spin_beltrami(const SpinParams& p, double eta) {
    const double h = p.annulus.log_r();
    if (eta == 0.0 || !(std::abs(eta) < h)) {
        throw std::domain_error("spin_beltrami: need 0 < |eta| < log r");
    }
    const double s = p.slope(eta);
    return complex(0.0, -s) / complex(2.0, s);
}

/// sup over the strip of |mu_t|, attained everywhere off the crease.
inline double spin_beltrami_sup(const SpinParams& p) {
    const double s = std::abs(p.t) / p.annulus.log_r();
    return s / std::sqrt(4.0 + s * s);
}

/// Finite-difference oracle for spin_beltrami: estimates f_zetabar / f_zeta
/// of f = Spin_t by centered differences with step h_step.  Rejects
/// stencils that straddle the crease or leave the strip; within one affine
/// piece the estimate is exact up to rounding.
inline complex spin_beltrami_fd(const SpinParams& p, const StripPoint& z, double h_step) {
    const double h = p.annulus.log_r();
    if (!(h_step > 0.0)) throw std::domain_error("spin_beltrami_fd: step must be positive");
    if (std::abs(z.eta) <= h_step || std::abs(z.eta) >= h - h_step) {
        throw std::domain_error("spin_beltrami_fd: stencil must stay strictly on one side "
                                "of the crease and inside the strip");
    }
    auto f = [&p](double xi, double eta) {
        const StripPoint w = spin_map(p, StripPoint{xi, eta});
        return complex(w.xi, w.eta);
    };
    const complex fx = (f(z.xi + h_step, z.eta) - f(z.xi - h_step, z.eta)) / (2.0 * h_step);
    const complex fy = (f(z.xi, z.eta + h_step) - f(z.xi, z.eta - h_step)) / (2.0 * h_step);
    const complex i(0.0, 1.0);
    const complex f_zeta = 0.5 * (fx - i * fy);
    const complex f_zetabar = 0.5 * (fx + i * fy);
    return f_zetabar / f_zeta;
}

} // namespace annulab
