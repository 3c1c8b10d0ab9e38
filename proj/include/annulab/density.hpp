#pragma once

// Two-sided numerical bracketing of the Teichmueller density at a point of
// an annulus, through the dual characterizations
//
//   lambda(p) = sup { pi |res_p(phi)| : phi holomorphic on A_r - p with at
//                     most a simple pole at p, ||phi||_L1 <= 1 }
//             = inf { ||dbar V||_inf : V continuous, V = 0 on both boundary
//                     circles, V(p) = 1 }.
//
// The supremum is approached from below over the truncated family
//   phi(z) = a/(z - p) + sum_{k=-N..N} b_k z^k
// (maximizing pi|a| under the L1 constraint is, after normalizing a = 1, a
// convex L1 coefficient fit solved by smoothed IRLS).  The infimum is
// approached from above over a small parametric family of bump fields, so
// every reported pair (lower, upper) brackets lambda up to quadrature
// error.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "annulab/annulus.hpp"
#include "annulab/metrics.hpp"

namespace annulab {

struct ResidueProblem {
    AnnulusSpec annulus;
    complex p{1.0, 0.0};
    int basis_size{10};   // Laurent modes -N..N in addition to the pole term
    int quad_radial{96};
    int quad_angular{192};

    ResidueProblem(const AnnulusSpec& a, int n) : annulus(a), basis_size(n) {
        validate();
    }
    ResidueProblem(const AnnulusSpec& a, complex point, int n)
        : annulus(a), p(point), basis_size(n) {
        validate();
    }

    void validate() const {
        const double ap = std::abs(p);
        if (!(ap > 1.0 / annulus.r()) || !(ap < annulus.r())) {
            throw std::domain_error("ResidueProblem: puncture must be strictly interior");
        }
        if (basis_size < 0) throw std::domain_error("ResidueProblem: basis_size must be >= 0");
        if (quad_radial < 8 || quad_angular < 8) {
            throw std::domain_error("ResidueProblem: quadrature grids too small");
        }
    }
};

namespace detail {

struct QuadNode {
    complex z;
    double w;
};

/// Midpoint nodes on (lo, hi) graded polynomially toward `center`
/// (node density grows like 1/distance^((gamma-1)/gamma) there).
inline void graded_axis(double lo, double hi, double center, int n, double gamma,
                        std::vector<double>& coord, std::vector<double>& weight) {
    coord.resize(static_cast<std::size_t>(n));
    weight.resize(static_cast<std::size_t>(n));
    const double f = (center - lo) / (hi - lo);
    const double ds = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) * ds;
        double c, jac;
        if (s < f) {
            const double xi = (f - s) / f;
            c = center - (center - lo) * std::pow(xi, gamma);
            jac = (center - lo) * gamma * std::pow(xi, gamma - 1.0) / f;
        } else {
            const double xi = (s - f) / (1.0 - f);
            c = center + (hi - center) * std::pow(xi, gamma);
            jac = (hi - center) * gamma * std::pow(xi, gamma - 1.0) / (1.0 - f);
        }
        coord[static_cast<std::size_t>(i)] = c;
        weight[static_cast<std::size_t>(i)] = jac * ds;
    }
}

/// Product quadrature for integral over A_r of f(z) dx dy written in
/// log-polar coordinates, graded toward the puncture.
inline std::vector<QuadNode> annulus_quadrature(const AnnulusSpec& a, const complex& p,
                                                int n_radial, int n_angular,
                                                double gamma = 2.0) {
    const double h = a.log_r();
    const double lam0 = std::log(std::abs(p));
    const double th0 = std::arg(p);
    std::vector<double> lam, wlam, th, wth;
    graded_axis(-h, h, lam0, n_radial, gamma, lam, wlam);
    graded_axis(th0 - pi, th0 + pi, th0, n_angular, gamma, th, wth);
    std::vector<QuadNode> nodes;
    nodes.reserve(lam.size() * th.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const double rho2 = std::exp(2.0 * lam[i]);
        for (std::size_t j = 0; j < th.size(); ++j) {
            QuadNode q;
            q.z = std::exp(complex(lam[i], th[j]));
            q.w = wlam[i] * wth[j] * rho2;  // dx dy = rho^2 dlambda dtheta
            nodes.push_back(q);
        }
    }
    return nodes;
}

/// Hermitian positive definite solve by unpivoted Cholesky (small systems).
inline std::vector<complex> cholesky_solve(std::vector<complex> G, std::vector<complex> rhs) {
    const std::size_t n = rhs.size();
    auto at = [&G, n](std::size_t r, std::size_t c) -> complex& { return G[r * n + c]; };
    for (std::size_t k = 0; k < n; ++k) {
        double d = at(k, k).real();
        for (std::size_t m = 0; m < k; ++m) d -= std::norm(at(k, m));
        if (!(d > 0.0)) d = 1e-300;  // keep the factorization alive on degeneracy
        const double lkk = std::sqrt(d);
        at(k, k) = lkk;
        for (std::size_t r = k + 1; r < n; ++r) {
            complex s = at(r, k);
            for (std::size_t m = 0; m < k; ++m) s -= at(r, m) * std::conj(at(k, m));
            at(r, k) = s / lkk;
        }
    }
    // forward: L y = rhs
    for (std::size_t r = 0; r < n; ++r) {
        complex s = rhs[r];
        for (std::size_t m = 0; m < r; ++m) s -= at(r, m) * rhs[m];
        rhs[r] = s / at(r, r).real();
    }
    // backward: L^H x = y
    for (std::size_t ri = n; ri-- > 0;) {
        complex s = rhs[ri];
        for (std::size_t m = ri + 1; m < n; ++m) s -= std::conj(at(m, ri)) * rhs[m];
        rhs[ri] = s / at(ri, ri).real();
    }
    return rhs;
}

struct L1Fit {
    std::vector<complex> coeffs;
    double objective;  // min over the basis of integral |pole + sum b_k psi_k|
};

/// Smoothed IRLS for min_b sum_i w_i | f_i + (B b)_i |.
inline L1Fit irls_l1(const std::vector<complex>& f, const std::vector<std::vector<complex>>& B,
                     const std::vector<double>& w, std::vector<complex> b0, int max_iters,
                     double eps) {
    const std::size_t m = f.size();
    const std::size_t n = B.size();
    std::vector<complex> b = std::move(b0);
    b.resize(n, complex(0.0, 0.0));
    std::vector<complex> resid(m);

    auto eval_resid = [&]() {
        for (std::size_t i = 0; i < m; ++i) {
            complex s = f[i];
            for (std::size_t k = 0; k < n; ++k) s += B[k][i] * b[k];
            resid[i] = s;
        }
    };
    auto objective = [&]() {
        double o = 0.0;
        for (std::size_t i = 0; i < m; ++i) o += w[i] * std::abs(resid[i]);
        return o;
    };

    eval_resid();
    double prev = objective();
    if (n == 0) return L1Fit{b, prev};

    std::vector<complex> G(n * n), rhs(n);
    for (int it = 0; it < max_iters; ++it) {
        // Weighted normal equations with weights w_i / sqrt(|resid_i|^2 + eps^2).
        for (auto& g : G) g = complex(0.0, 0.0);
        for (auto& r : rhs) r = complex(0.0, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double wi = w[i] / std::sqrt(std::norm(resid[i]) + eps * eps);
            for (std::size_t kcol = 0; kcol < n; ++kcol) {
                const complex bk = B[kcol][i];
                rhs[kcol] -= wi * std::conj(bk) * f[i];
                for (std::size_t kr = kcol; kr < n; ++kr) {
                    G[kr * n + kcol] += wi * std::conj(bk) * B[kr][i];
                }
            }
        }
        // Mirror the lower triangle (we accumulated column-major lower part).
        for (std::size_t rr = 0; rr < n; ++rr) {
            for (std::size_t cc = rr + 1; cc < n; ++cc) {
                G[rr * n + cc] = std::conj(G[cc * n + rr]);
            }
        }
        for (std::size_t k = 0; k < n; ++k) G[k * n + k] += 1e-13;
        b = cholesky_solve(G, rhs);
        eval_resid();
        const double cur = objective();
        if (std::abs(prev - cur) <= 1e-13 * std::max(1.0, cur)) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    return L1Fit{b, prev};
}

} // namespace detail

struct ResidueBound {
    double value;        // certified lower bound for lambda at p (up to quadrature)
    double quad_error;   // Richardson-style quadrature error estimate
    double l1_norm;      // minimized L1 norm of the normalized competitor
    std::vector<complex> coeffs;
};

/// Lower bound pi / min_b || 1/(z-p) + sum b_k z^k ||_L1 over Laurent
/// coefficients b.  Monotone nondecreasing in basis_size for nested bases
/// at fixed quadrature.
inline ResidueBound residue_lower_bound(const ResidueProblem& prob) {
    prob.validate();
    const auto nodes = detail::annulus_quadrature(prob.annulus, prob.p, prob.quad_radial,
                                                  prob.quad_angular);
    const std::size_t m = nodes.size();
    const int N = prob.basis_size;
    // basis_size = 0 is the pole-only competitor (no optimization at all).
    const std::size_t nb = N == 0 ? 0 : static_cast<std::size_t>(2 * N + 1);

    std::vector<complex> f(m);
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
        f[i] = 1.0 / (nodes[i].z - prob.p);
        w[i] = nodes[i].w;
    }
    // Basis z^k scaled by r^{-|k|} so every column is O(1) on the annulus.
    std::vector<std::vector<complex>> B(nb, std::vector<complex>(m));
    const double r = prob.annulus.r();
    if (nb > 0) {
        for (int k = -N; k <= N; ++k) {
            const double scale = std::pow(r, -std::abs(static_cast<double>(k)));
            auto& col = B[static_cast<std::size_t>(k + N)];
            for (std::size_t i = 0; i < m; ++i) {
                col[i] = std::pow(nodes[i].z, static_cast<double>(k)) * scale;
            }
        }
    }

    // IRLS from zero plus one deterministic jittered restart.
    detail::L1Fit best = detail::irls_l1(f, B, w, {}, 200, 1e-10);
    if (nb > 0) {
        std::mt19937_64 rng(20240711u);
        std::uniform_real_distribution<double> jitter(-0.5, 0.5);
        std::vector<complex> b0(nb);
        for (auto& c : b0) {
            c = best.coeffs.empty() ? complex(jitter(rng), jitter(rng))
                                    : complex(jitter(rng), jitter(rng)) * 0.1;
        }
        for (std::size_t k = 0; k < nb && k < best.coeffs.size(); ++k) b0[k] += best.coeffs[k];
        const detail::L1Fit alt = detail::irls_l1(f, B, w, b0, 200, 1e-10);
        if (alt.objective < best.objective) best = alt;
    }

    // Quadrature error estimate: re-evaluate the minimized competitor on a
    // doubled grid and compare.
    const auto fine = detail::annulus_quadrature(prob.annulus, prob.p, 2 * prob.quad_radial,
                                                 2 * prob.quad_angular);
    double f_fine = 0.0;
    for (const auto& q : fine) {
        complex s = 1.0 / (q.z - prob.p);
        if (nb > 0) {
            for (int k = -N; k <= N; ++k) {
                const double scale = std::pow(r, -std::abs(static_cast<double>(k)));
                s += best.coeffs[static_cast<std::size_t>(k + N)] *
                     std::pow(q.z, static_cast<double>(k)) * scale;
            }
        }
        f_fine += q.w * std::abs(s);
    }

    ResidueBound out;
    out.l1_norm = best.objective;
    out.value = pi / best.objective;
    out.quad_error = 2.0 * std::abs(pi / f_fine - out.value);
    out.coeffs = best.coeffs;
    return out;
}

struct VectorFieldFamily {
    double bump_radius_min{0.0};   // 0 -> auto box from the geometry
    double bump_radius_max{0.0};
    int grid_radial{160};
    int grid_angular{256};
    int sweeps{3};
};

struct VectorFieldBound {
    double value;        // smallest sup|dbar V| found: an upper bound for lambda
    double bump_radius;
    double bump_power;
    double cutoff_power;
};

namespace detail {

struct VfParams {
    double a_rad, m, k;
};

/// sup |dbar V| over the support for
///   V(z) = (1 - (|z-p|/a)^2)^m * (1 - (log|z|/h)^2)^k / normalizer.
/// The derivative is evaluated in closed form on a polar grid around p.
inline double vf_sup_dbar(const AnnulusSpec& ann, const complex& p, const VfParams& prm,
                          int n_s, int n_psi) {
    const double h = ann.log_r();
    const double yp = std::log(std::abs(p)) / h;
    const double cutoff_p = std::pow(1.0 - yp * yp, prm.k);
    if (!(cutoff_p > 0.0)) {
        throw std::domain_error("vectorfield_upper_bound: degenerate family, V(p) = 0 "
                                "after normalization");
    }
    const double inv_norm = 1.0 / cutoff_p;
    double sup = 0.0;
    for (int i = 0; i < n_s; ++i) {
        const double s = (i + 0.5) / n_s * prm.a_rad;
        for (int j = 0; j < n_psi; ++j) {
            const double psi = 2.0 * pi * j / n_psi;
            const complex z = p + s * complex(std::cos(psi), std::sin(psi));
            const double az = std::abs(z);
            if (!(az > 1.0 / ann.r()) || !(az < ann.r())) continue;  // outside A_r
            const double y = std::log(az) / h;
            const double d2 = s * s / (prm.a_rad * prm.a_rad);
            const double bump = std::pow(1.0 - d2, prm.m);
            const double dbump = -prm.m * std::pow(1.0 - d2, prm.m - 1.0) /
                                 (prm.a_rad * prm.a_rad);
            const double cut = std::pow(1.0 - y * y, prm.k);
            const double dcut = -2.0 * prm.k * y * std::pow(1.0 - y * y, prm.k - 1.0) / h;
            // dbar(|z-p|^2) = z - p (p real is not assumed; use conj form),
            // dbar(log|z|) = 1 / (2 conj(z)).
            const complex dbar_d2 = z - p;
            const complex dbar_y = 1.0 / (2.0 * std::conj(z));
            const complex dbar_v = (dbump * dbar_d2 * cut + bump * dcut * dbar_y) * inv_norm;
            sup = std::max(sup, std::abs(dbar_v));
        }
    }
    return sup;
}

} // namespace detail

/// Minimizes sup|dbar V| over the bump family by coordinate descent and
/// returns the smallest admissible value found.
inline VectorFieldBound vectorfield_upper_bound(const AnnulusSpec& a, const complex& p,
                                                const VectorFieldFamily& fam = {}) {
    const double ap = std::abs(p);
    if (!(ap > 1.0 / a.r()) || !(ap < a.r())) {
        throw std::domain_error("vectorfield_upper_bound: p must be strictly interior");
    }
    const double dm = std::min(a.r() - ap, ap - 1.0 / a.r());
    double lo = fam.bump_radius_min > 0.0 ? fam.bump_radius_min : 0.3 * dm;
    double hi = fam.bump_radius_max > 0.0 ? fam.bump_radius_max : 4.0 * dm;

    detail::VfParams prm{0.5 * (lo + hi), 2.0, 1.0};
    auto eval = [&](const detail::VfParams& q) {
        return detail::vf_sup_dbar(a, p, q, fam.grid_radial, fam.grid_angular);
    };

    auto golden = [&](auto&& setter, double qlo, double qhi) {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = qhi - gr * (qhi - qlo);
        double x2 = qlo + gr * (qhi - qlo);
        detail::VfParams p1 = prm, p2 = prm;
        setter(p1, x1);
        setter(p2, x2);
        double f1 = eval(p1), f2 = eval(p2);
        for (int it = 0; it < 24; ++it) {
            if (f1 <= f2) {
                qhi = x2;
                x2 = x1;
                f2 = f1;
                x1 = qhi - gr * (qhi - qlo);
                p1 = prm;
                setter(p1, x1);
                f1 = eval(p1);
            } else {
                qlo = x1;
                x1 = x2;
                f1 = f2;
                x2 = qlo + gr * (qhi - qlo);
                p2 = prm;
                setter(p2, x2);
                f2 = eval(p2);
            }
        }
        const double xbest = f1 <= f2 ? x1 : x2;
        setter(prm, xbest);
    };

    for (int sweep = 0; sweep < fam.sweeps; ++sweep) {
        golden([](detail::VfParams& q, double v) { q.a_rad = v; }, lo, hi);
        golden([](detail::VfParams& q, double v) { q.m = v; }, 1.5, 4.0);
        golden([](detail::VfParams& q, double v) { q.k = v; }, 0.75, 3.0);
    }

    VectorFieldBound out;
    out.value = eval(prm);
    out.bump_radius = prm.a_rad;
    out.bump_power = prm.m;
    out.cutoff_power = prm.k;
    return out;
}

struct DensityBracket {
    double lower;
    double upper;
    double rho;          // Kobayashi/Poincare density at p, |dz| coordinate
    double quad_error;
    bool passed;
    std::string failure;
};

struct SandwichConfig {
    int basis_size{10};
    int quad_radial{96};
    int quad_angular{192};
    VectorFieldFamily family{};
    double tol{1e-3};
};

/// Assembles the two dual bounds and the Poincare density and checks the
/// sandwich inequalities at tolerance cfg.tol.  Violations are reported in
/// the bracket, not thrown.
inline DensityBracket sandwich_report(const AnnulusSpec& a, const complex& p,
                                      const SandwichConfig& cfg = {}) {
    ResidueProblem rp(a, p, cfg.basis_size);
    rp.quad_radial = cfg.quad_radial;
    rp.quad_angular = cfg.quad_angular;
    const ResidueBound lower = residue_lower_bound(rp);
    const VectorFieldBound upper = vectorfield_upper_bound(a, p, cfg.family);

    const StripPoint sp = strip_point(p);
    const double rho_dzeta = kobayashi_annulus(a, sp, complex(1.0, 0.0));
    const double rho = density_to_dz(rho_dzeta, p);

    DensityBracket br{};
    br.lower = lower.value;
    br.upper = upper.value;
    br.rho = rho;
    br.quad_error = lower.quad_error;
    br.passed = true;
    if (!(br.lower <= br.upper)) {
        br.passed = false;
        br.failure = "lower exceeds upper";
    } else if (!(br.lower <= rho * (1.0 + cfg.tol))) {
        br.passed = false;
        br.failure = "lower exceeds rho";
    } else if (!(br.upper >= 0.5 * rho * (1.0 - cfg.tol))) {
        br.passed = false;
        br.failure = "upper below rho/2";
    }
    return br;
}

} // namespace annulab
