#pragma once

// Sampled measured foliations on the fundamental rectangle
// [0, 2pi) x [-log r, +log r] and the two integrals the extremal-length
// arguments need: the Dirichlet integral of one foliation and the wedge
// integral of a pair.
//
// A foliation is stored through its gradient at the grid nodes.  Level
// functions that are single-valued (or multivalued with a constant jump
// across the xi period, like xi itself) can be sampled directly and are
// differentiated with centered stencils, except that every stencil stays
// on one side of the shear crease eta = 0 and one-sided 3-point stencils
// are used at the strip boundaries.  Nodes on the crease carry both
// one-sided limits and the quadrature splits their weight between the
// upper and lower halves.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "annulab/annulus.hpp"
#include "annulab/spin.hpp"

namespace annulab {

class FoliationGrid {
  public:
    /// Sample a level function u(xi, eta).  `xi_jump` is the additive
    /// period of u across xi -> xi + 2pi (0 for single-valued u, 2pi for
    /// u = xi and its shears).
    static FoliationGrid from_levels(const AnnulusSpec& a, int nx, int ny,
                                     const std::function<double(double, double)>& u,
                                     double xi_jump = 0.0) {
        FoliationGrid g(a, nx, ny);
        g.xi_jump_ = xi_jump;
        g.values_.resize(g.size());
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double v = u(g.xi(i), g.eta(j));
                if (!std::isfinite(v)) {
                    throw std::domain_error("FoliationGrid: non-finite level sample");
                }
                g.values_[g.idx(i, j)] = v;
            }
        }
        g.differentiate();
        return g;
    }

    static FoliationGrid from_level_samples(const AnnulusSpec& a, int nx, int ny,
                                            std::vector<double> values,
                                            double xi_jump = 0.0) {
        FoliationGrid g(a, nx, ny);
        if (values.size() != g.size()) {
            throw std::domain_error("FoliationGrid: sample count does not match grid");
        }
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw std::domain_error("FoliationGrid: non-finite level sample");
            }
        }
        g.xi_jump_ = xi_jump;
        g.values_ = std::move(values);
        g.differentiate();
        return g;
    }

    /// Store a gradient field directly (the route for multivalued level
    /// functions).  `side` is +1/-1 and selects the crease limit; it only
    /// matters on the line eta = 0.
    static FoliationGrid from_gradient(
        const AnnulusSpec& a, int nx, int ny,
        const std::function<std::pair<double, double>(double, double, int)>& grad) {
        FoliationGrid g(a, nx, ny);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const auto up = grad(g.xi(i), g.eta(j), +1);
                const auto down = grad(g.xi(i), g.eta(j), -1);
                const std::size_t k = g.idx(i, j);
                g.gx_[k] = 0.5 * (up.first + down.first);
                g.gy_up_[k] = up.second;
                g.gy_down_[k] = down.second;
                if (!std::isfinite(g.gx_[k]) || !std::isfinite(g.gy_up_[k]) ||
                    !std::isfinite(g.gy_down_[k])) {
                    throw std::domain_error("FoliationGrid: non-finite gradient sample");
                }
            }
        }
        return g;
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double log_r() const { return h_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double xi(int i) const { return i * dx_; }
    double eta(int j) const { return -h_ + j * dy_; }
    bool has_values() const { return !values_.empty(); }
    const std::vector<double>& values() const { return values_; }

    double grad_xi(int i, int j) const { return gx_[idx(i, j)]; }
    double grad_eta_up(int i, int j) const { return gy_up_[idx(i, j)]; }
    double grad_eta_down(int i, int j) const { return gy_down_[idx(i, j)]; }

    bool matches(const FoliationGrid& other) const {
        return nx_ == other.nx_ && ny_ == other.ny_ &&
               std::abs(h_ - other.h_) <= 1e-12 * h_;
    }

  private:
    FoliationGrid(const AnnulusSpec& a, int nx, int ny)
        : nx_(nx), ny_(ny), h_(a.log_r()) {
        if (nx < 4 || ny < 5) throw std::domain_error("FoliationGrid: grid too small");
        dx_ = 2.0 * pi / nx;
        dy_ = 2.0 * h_ / (ny - 1);
        gx_.assign(size(), 0.0);
        gy_up_.assign(size(), 0.0);
        gy_down_.assign(size(), 0.0);
    }

    std::size_t size() const {
        return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    }
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i);
    }

    double value_wrapped(int i, int j) const {
        double add = 0.0;
        while (i < 0) { i += nx_; add -= xi_jump_; }
        while (i >= nx_) { i -= nx_; add += xi_jump_; }
        return values_[idx(i, j)] + add;
    }

    void differentiate() {
        for (int j = 0; j < ny_; ++j) {
            const double e = eta(j);
            for (int i = 0; i < nx_; ++i) {
                const std::size_t k = idx(i, j);
                gx_[k] = (value_wrapped(i + 1, j) - value_wrapped(i - 1, j)) / (2.0 * dx_);

                const bool on_crease = e == 0.0;
                const bool straddles = !on_crease && eta(j - 1) < 0.0 && eta(j + 1) > 0.0;
                if (j == 0) {
                    gy_up_[k] = gy_down_[k] = one_sided_up(i, j);
                } else if (j == ny_ - 1) {
                    gy_up_[k] = gy_down_[k] = one_sided_down(i, j);
                } else if (on_crease) {
                    gy_up_[k] = one_sided_up(i, j);
                    gy_down_[k] = one_sided_down(i, j);
                } else if (straddles) {
                    gy_up_[k] = gy_down_[k] = e > 0.0 ? one_sided_up(i, j)
                                                      : one_sided_down(i, j);
                } else {
                    gy_up_[k] = gy_down_[k] =
                        (values_[idx(i, j + 1)] - values_[idx(i, j - 1)]) / (2.0 * dy_);
                }
            }
        }
    }

    // Second-order one-sided stencils in eta.
    double one_sided_up(int i, int j) const {
        return (-3.0 * values_[idx(i, j)] + 4.0 * values_[idx(i, j + 1)] -
                values_[idx(i, j + 2)]) /
               (2.0 * dy_);
    }
    double one_sided_down(int i, int j) const {
        return (3.0 * values_[idx(i, j)] - 4.0 * values_[idx(i, j - 1)] +
                values_[idx(i, j - 2)]) /
               (2.0 * dy_);
    }

    int nx_, ny_;
    double h_, dx_, dy_;
    double xi_jump_{0.0};
    std::vector<double> values_;  // empty for gradient-only foliations
    std::vector<double> gx_, gy_up_, gy_down_;
};

namespace detail {

inline void require_integrable(const FoliationGrid& u, const AnnulusSpec& a) {
    if (u.nx() < 16 || u.ny() < 16) {
        throw std::domain_error("foliation integral: grid resolution must be >= 16x16");
    }
    if (std::abs(u.log_r() - a.log_r()) > 1e-12 * a.log_r()) {
        throw std::domain_error("foliation integral: grid does not match the annulus");
    }
}

/// Trapezoid-in-eta, uniform-in-xi quadrature of a node integrand.  The
/// integrand is evaluated with both crease limits and their mean is used,
/// which reduces to the plain value off the crease and to the half-split
/// on it.
template <typename F>
double quadrature(const FoliationGrid& g, F&& node_integrand) {
    double sum = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        const double wy = (j == 0 || j == g.ny() - 1) ? 0.5 : 1.0;
        double row = 0.0;
        for (int i = 0; i < g.nx(); ++i) {
            row += 0.5 * (node_integrand(i, j, +1) + node_integrand(i, j, -1));
        }
        sum += wy * row;
    }
    return sum * g.dx() * g.dy();
}

} // namespace detail

/// Quadrature of the Dirichlet integral of |du|,
///   integral (u_xi^2 + u_eta^2) dxi deta
/// over the fundamental rectangle.
inline double dirichlet_integral(const FoliationGrid& u, const AnnulusSpec& a) {
    detail::require_integrable(u, a);
    return detail::quadrature(u, [&u](int i, int j, int side) {
        const double ux = u.grad_xi(i, j);
        const double uy = side > 0 ? u.grad_eta_up(i, j) : u.grad_eta_down(i, j);
        return ux * ux + uy * uy;
    });
}

/// Quadrature of the wedge integral integral |du ^ dv| =
/// integral |u_xi v_eta - u_eta v_xi| dxi deta.
inline double wedge_integral(const FoliationGrid& u, const FoliationGrid& v,
                             const AnnulusSpec& a) {
    detail::require_integrable(u, a);
    if (!u.matches(v)) throw std::domain_error("wedge_integral: grids do not match");
    return detail::quadrature(u, [&u, &v](int i, int j, int side) {
        const double ux = u.grad_xi(i, j);
        const double vx = v.grad_xi(i, j);
        const double uy = side > 0 ? u.grad_eta_up(i, j) : u.grad_eta_down(i, j);
        const double vy = side > 0 ? v.grad_eta_up(i, j) : v.grad_eta_down(i, j);
        return std::abs(ux * vy - uy * vx);
    });
}

struct CauchySchwarzReport {
    double wedge;          // integral |du ^ dv|
    double lhs_squared;    // wedge^2
    double rhs;            // Dir(u) * Dir(v)
    bool holds;            // lhs_squared <= rhs within the margin
};

/// Checks (integral |du ^ dv|)^2 <= Dir(u) Dir(v) with a quadrature margin.
/// A violation is reported, not thrown.
inline CauchySchwarzReport cauchy_schwarz_check(const FoliationGrid& u,
                                                const FoliationGrid& v,
                                                const AnnulusSpec& a,
                                                double margin = 0.01) {
    CauchySchwarzReport rep{};
    rep.wedge = wedge_integral(u, v, a);
    rep.lhs_squared = rep.wedge * rep.wedge;
    rep.rhs = dirichlet_integral(u, a) * dirichlet_integral(v, a);
    rep.holds = rep.lhs_squared <= rep.rhs * (1.0 + margin);
    return rep;
}

// Foliations the proof machinery uses.

/// u = eta (horizontal foliation), sampled as a level function.
inline FoliationGrid horizontal_foliation(const AnnulusSpec& a, int nx, int ny) {
    return FoliationGrid::from_levels(a, nx, ny,
                                      [](double, double eta) { return eta; });
}

/// u = xi (vertical foliation); multivalued, stored as the gradient (1, 0).
inline FoliationGrid vertical_foliation(const AnnulusSpec& a, int nx, int ny) {
    return FoliationGrid::from_gradient(
        a, nx, ny, [](double, double, int) { return std::pair<double, double>{1.0, 0.0}; });
}

/// xi o Spin_t^{-1}; multivalued with gradient (1, sign(eta) t / log r).
inline FoliationGrid sheared_xi_foliation(const SpinParams& p, int nx, int ny) {
    const double slope = p.t / p.annulus.log_r();
    return FoliationGrid::from_gradient(
        p.annulus, nx, ny, [slope](double, double eta, int side) {
            const double sgn = eta > 0.0 ? 1.0 : (eta < 0.0 ? -1.0 : static_cast<double>(side));
            return std::pair<double, double>{1.0, sgn * slope};
        });
}

/// eta o Spin_t^{-1} = eta (the shear leaves eta untouched).
inline FoliationGrid sheared_eta_foliation(const SpinParams& p, int nx, int ny) {
    return horizontal_foliation(p.annulus, nx, ny);
}

} // namespace annulab
