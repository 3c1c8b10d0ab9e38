#pragma once

// Cell-centered grid of complex dilatation values over one fundamental
// rectangle [0, 2pi) x [-log r, +log r].  Cell-centered sampling keeps the
// spin field's crease and the strip boundaries off the sample points.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "annulab/annulus.hpp"
#include "annulab/spin.hpp"

namespace annulab {

class BeltramiField {
  public:
    static BeltramiField zero(const AnnulusSpec& a, int nx, int ny) {
        BeltramiField f(a, nx, ny);
        f.is_zero_ = true;
        return f;
    }

    static BeltramiField constant(const AnnulusSpec& a, complex mu, int nx, int ny) {
        return sample(a, nx, ny, [mu](double, double) { return mu; });
    }

    /// The Beltrami coefficient of Spin_t, sampled at cell centers.
    static BeltramiField from_spin(const SpinParams& p, int nx, int ny) {
        return sample(p.annulus, nx, ny, [&p](double, double eta) {
            const double s = p.slope(eta == 0.0 ? 1.0 : eta);
            return complex(0.0, -s) / complex(2.0, s);
        });
    }

    static BeltramiField sample(const AnnulusSpec& a, int nx, int ny,
                                const std::function<complex(double, double)>& mu) {
        BeltramiField f(a, nx, ny);
        f.grid_.resize(static_cast<std::size_t>(nx) * ny);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const complex v = mu(f.cell_xi(i), f.cell_eta(j));
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    throw std::domain_error("BeltramiField: non-finite sample");
                }
                if (!(std::abs(v) < 1.0)) {
                    throw std::domain_error("BeltramiField: |mu| must stay below 1");
                }
                f.grid_[static_cast<std::size_t>(j) * nx + i] = v;
            }
        }
        return f;
    }

    bool is_zero() const { return is_zero_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double log_r() const { return h_; }
    bool periodic_xi() const { return periodic_xi_; }

    double cell_xi(int i) const { return (i + 0.5) * 2.0 * pi / nx_; }
    double cell_eta(int j) const { return -h_ + (j + 0.5) * 2.0 * h_ / ny_; }

    /// Piecewise-constant lookup by containing cell; xi wraps periodically.
    complex value_at(double xi, double eta) const {
        if (is_zero_) return complex(0.0, 0.0);
        double x = std::fmod(xi, 2.0 * pi);
        if (x < 0.0) x += 2.0 * pi;
        int i = static_cast<int>(std::floor(x / (2.0 * pi) * nx_));
        if (i >= nx_) i = nx_ - 1;
        double y = (eta + h_) / (2.0 * h_) * ny_;
        int j = static_cast<int>(std::floor(y));
        if (j < 0) j = 0;
        if (j >= ny_) j = ny_ - 1;
        return grid_[static_cast<std::size_t>(j) * nx_ + i];
    }

    double sup_norm() const {
        if (is_zero_) return 0.0;
        double m = 0.0;
        for (const complex& v : grid_) m = std::max(m, std::abs(v));
        return m;
    }

  private:
    BeltramiField(const AnnulusSpec& a, int nx, int ny) : nx_(nx), ny_(ny), h_(a.log_r()) {
        if (nx < 1 || ny < 1) throw std::domain_error("BeltramiField: empty grid");
    }

    int nx_, ny_;
    double h_;
    bool periodic_xi_{true};
    bool is_zero_{false};
    std::vector<complex> grid_;
};

} // namespace annulab
