#pragma once

// Brute-force conformal-modulus oracle: minimizes the discrete Dirichlet
// energy of the conductivity tensor induced by a Beltrami structure over
// the strip rectangle, with P1 elements on a fixed structured
// triangulation and a Jacobi-preconditioned conjugate gradient solve.
//
// Two boundary regimes:
//   FreeAnnulus  - u = 0 / u = 1 on the boundary rows, periodic in xi;
//                  modulus = 1 / E[u*], the plain conformal modulus in
//                  units where the flat A_r gives log r / pi.
//   PinnedShear  - the transversal gluing is sheared by a horizontal
//                  displacement s and the reported modulus is the
//                  extremal length of the glued crossing class, computed
//                  as the minimized energy of the unit-winding potential
//                  (after straightening the gluing by an affine change of
//                  variables).  For mu = 0 on the flat c x H cylinder this
//                  reproduces (H^2 + s^2) / (c H); at s = 0 it agrees with
//                  the free modulus.
//
// The tensor is A_mu = (1/(1-|mu|^2)) [ |1-mu|^2, -2 Im mu ;
//                                       -2 Im mu, |1+mu|^2 ], det = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "annulab/annulus.hpp"
#include "annulab/beltrami_field.hpp"
#include "annulab/bounds.hpp"

namespace annulab {

enum class BcMode { FreeAnnulus, PinnedShear };

struct SolverProblem {
    AnnulusSpec annulus;
    BeltramiField mu;
    BcMode bc_mode{BcMode::FreeAnnulus};
    double shear{0.0};      // horizontal displacement s (pinned-shear mode)
    int nx{64};
    int ny{65};
    double tol{1e-10};      // relative residual target for the CG solve
    int max_iters{20000};
    double mu_cap{0.95};    // conditioning cap on sup|mu|, hard max 0.999
    bool record_energy{false};

    SolverProblem(const AnnulusSpec& a, BeltramiField field)
        : annulus(a), mu(std::move(field)) {}
};

struct SolverResult {
    double modulus{0.0};
    double energy{0.0};
    int iterations{0};
    double residual{0.0};
    bool converged{false};
    std::vector<std::pair<double, double>> grid_sequence;  // (h, modulus)
    std::vector<double> energy_trace;                      // optional per-iteration energy
    std::vector<double> solution;                          // full grid function, row-major
};

/// Modulus of a flat cylinder, height / circumference.
inline double modulus_flat(double circumference, double height) {
    if (!(circumference > 0.0) || !(height > 0.0)) {
        throw std::domain_error("modulus_flat: both dimensions must be positive");
    }
    return height / circumference;
}

namespace detail {

struct Tensor2 {
    double a11, a12, a22;
};

inline Tensor2 conductivity(const complex& mu) {
    const double m1 = mu.real(), m2 = mu.imag();
    const double n2 = m1 * m1 + m2 * m2;
    const double d = 1.0 - n2;
    const double one_minus = (1.0 - m1) * (1.0 - m1) + m2 * m2;
    const double one_plus = (1.0 + m1) * (1.0 + m1) + m2 * m2;
    return Tensor2{one_minus / d, -2.0 * m2 / d, one_plus / d};
}

/// Mt A M for the shear straightening M = [[1, 0], [-alpha, 1]].
inline Tensor2 straightened(const Tensor2& a, double alpha) {
    // (M^T A M) with M acting on (u_x, u_eta).
    const double a11 = a.a11 - 2.0 * alpha * a.a12 + alpha * alpha * a.a22;
    const double a12 = a.a12 - alpha * a.a22;
    return Tensor2{a11, a12, a.a22};
}

// Sparse symmetric operator in CSR form with deterministic assembly.
struct Csr {
    std::vector<std::size_t> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const std::size_t n = row_ptr.size() - 1;
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0.0;
            for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
                s += val[k] * x[static_cast<std::size_t>(col[k])];
            }
            y[r] = s;
        }
    }
};

struct CooBuilder {
    explicit CooBuilder(int n) : rows(static_cast<std::size_t>(n)) {}

    void add(int r, int c, double v) {
        rows[static_cast<std::size_t>(r)].push_back({c, v});
    }

    Csr compress() const {
        Csr m;
        m.row_ptr.assign(rows.size() + 1, 0);
        std::vector<std::pair<int, double>> merged;
        // Merge duplicates per row keeping ascending column order.
        for (std::size_t r = 0; r < rows.size(); ++r) {
            merged.clear();
            for (const auto& e : rows[r]) {
                bool found = false;
                for (auto& me : merged) {
                    if (me.first == e.first) {
                        me.second += e.second;
                        found = true;
                        break;
                    }
                }
                if (!found) merged.push_back(e);
            }
            std::sort(merged.begin(), merged.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& me : merged) {
                m.col.push_back(me.first);
                m.val.push_back(me.second);
            }
            m.row_ptr[r + 1] = m.col.size();
        }
        return m;
    }

    std::vector<std::vector<std::pair<int, double>>> rows;
};

struct CgOutcome {
    int iterations;
    double residual;
    bool converged;
};

/// Jacobi-preconditioned CG; monotone in the quadratic objective.
/// When `record` is set, `objective_cb` receives f(x_k) = 1/2 x^T K x - b^T x
/// once per iteration.
template <typename Callback>
CgOutcome conjugate_gradient(const Csr& K, const std::vector<double>& b,
                             std::vector<double>& x, double tol, int max_iters,
                             bool record, Callback&& objective_cb) {
    const std::size_t n = b.size();
    std::vector<double> diag(n, 1.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = K.row_ptr[r]; k < K.row_ptr[r + 1]; ++k) {
            if (static_cast<std::size_t>(K.col[k]) == r && K.val[k] > 0.0) {
                diag[r] = K.val[k];
            }
        }
    }
    std::vector<double> r(n), z(n), p(n), q(n);
    K.apply(x, q);
    double bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - q[i];
        bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    const double stop = tol * (bnorm > 0.0 ? bnorm : 1.0);

    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = r[i] / diag[i];
        rz += r[i] * z[i];
        p[i] = z[i];
    }
    double rnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) rnorm += r[i] * r[i];
    rnorm = std::sqrt(rnorm);

    auto report_objective = [&]() {
        if (!record) return;
        double xb = 0.0, xr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xb += x[i] * b[i];
            xr += x[i] * r[i];
        }
        objective_cb(-0.5 * (xb + xr));
    };
    report_objective();

    int it = 0;
    while (it < max_iters && rnorm > stop) {
        ++it;
        K.apply(p, q);
        double pq = 0.0;
        for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
        if (!(pq > 0.0)) break;  // singular direction; stop at current iterate
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        double rz_new = 0.0;
        rnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = r[i] / diag[i];
            rz_new += r[i] * z[i];
            rnorm += r[i] * r[i];
        }
        rnorm = std::sqrt(rnorm);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        report_objective();
    }
    return CgOutcome{it, rnorm / (bnorm > 0.0 ? bnorm : 1.0), rnorm <= stop};
}

} // namespace detail

/// Minimizes the discrete energy for the given problem.  See the header
/// comment for the two boundary regimes and the modulus normalization.
inline SolverResult solve_modulus(const SolverProblem& p) {
    const double h = p.annulus.log_r();
    const int nx = p.nx, ny = p.ny;
    if (nx < 16 || ny < 16) throw std::domain_error("solve_modulus: nx, ny must be >= 16");
    if (!(p.tol > 0.0)) throw std::domain_error("solve_modulus: tol must be positive");
    if (p.mu_cap > 0.999) throw std::domain_error("solve_modulus: mu_cap must be <= 0.999");
    const double sup = p.mu.sup_norm();
    if (sup > p.mu_cap) {
        throw std::domain_error("solve_modulus: sup|mu| = " + std::to_string(sup) +
                                " exceeds the conditioning cap " + std::to_string(p.mu_cap));
    }

    const bool pinned = p.bc_mode == BcMode::PinnedShear;
    const double dx = 2.0 * pi / nx;
    const double dy = pinned ? 2.0 * h / ny : 2.0 * h / (ny - 1);
    const double alpha = pinned ? p.shear / (2.0 * h) : 0.0;
    const int rows = ny;                    // node rows stored
    const int cell_rows = pinned ? ny : ny - 1;

    auto node = [nx](int i, int j) { return j * nx + ((i % nx) + nx) % nx; };
    auto eta_of = [&](int j) { return -h + j * dy; };

    // In pinned mode the vertical index wraps (torus); in free mode the
    // top cell row touches the fixed boundary row.
    auto node_wrapped = [&](int i, int j) {
        if (pinned) j = (j % ny + ny) % ny;
        return node(i, j);
    };

    const int n_nodes = nx * rows;
    // Unknown numbering: free mode excludes the two Dirichlet rows.
    std::vector<int> unknown_of(static_cast<std::size_t>(n_nodes), -1);
    int n_unknown = 0;
    for (int j = 0; j < rows; ++j) {
        if (!pinned && (j == 0 || j == ny - 1)) continue;
        for (int i = 0; i < nx; ++i) unknown_of[static_cast<std::size_t>(node(i, j))] = n_unknown++;
    }

    // Dirichlet lift: 0 on the bottom row, 1 on the top row (free mode).
    std::vector<double> lift(static_cast<std::size_t>(n_nodes), 0.0);
    if (!pinned) {
        for (int i = 0; i < nx; ++i) lift[static_cast<std::size_t>(node(i, ny - 1))] = 1.0;
    }

    // Constant gradient of the affine winding part x / (2 pi) (pinned mode).
    const double cx = pinned ? 1.0 / (2.0 * pi) : 0.0;

    detail::CooBuilder builder(n_unknown);
    std::vector<double> b(static_cast<std::size_t>(n_unknown), 0.0);
    double lift_energy = 0.0;  // energy of the lift/affine part alone

    // Fixed triangulation: each cell split along the (i,j)-(i+1,j+1)
    // diagonal.  Hat gradients on the two right triangles are closed-form.
    const double inv_dx = 1.0 / dx, inv_dy = 1.0 / dy;
    const double tri_area = 0.5 * dx * dy;

    for (int j = 0; j < cell_rows; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double eta_c = eta_of(j) + 0.5 * dy;
            for (int t = 0; t < 2; ++t) {
                // t = 0: lower triangle (i,j), (i+1,j), (i+1,j+1)
                // t = 1: upper triangle (i,j), (i+1,j+1), (i,j+1)
                std::array<int, 3> nd;
                std::array<double, 3> gxh, gyh;
                double cen_eta;
                if (t == 0) {
                    nd = {node_wrapped(i, j), node_wrapped(i + 1, j), node_wrapped(i + 1, j + 1)};
                    gxh = {-inv_dx, inv_dx, 0.0};
                    gyh = {0.0, -inv_dy, inv_dy};
                    cen_eta = eta_of(j) + dy / 3.0;
                } else {
                    nd = {node_wrapped(i, j), node_wrapped(i + 1, j + 1), node_wrapped(i, j + 1)};
                    gxh = {0.0, inv_dx, 0.0 - inv_dx};
                    gyh = {-inv_dy, 0.0, inv_dy};
                    cen_eta = eta_of(j) + 2.0 * dy / 3.0;
                }
                const double cen_xi_straight = (i + (t == 0 ? 2.0 / 3.0 : 1.0 / 3.0)) * dx;
                const double sample_xi =
                    pinned ? cen_xi_straight + alpha * (cen_eta + h) : cen_xi_straight;
                detail::Tensor2 A = detail::conductivity(p.mu.value_at(sample_xi, cen_eta));
                if (pinned) A = detail::straightened(A, alpha);

                // Element stiffness entries and load from the affine part.
                std::array<double, 3> flux_x, flux_y;
                for (int a = 0; a < 3; ++a) {
                    flux_x[a] = A.a11 * gxh[a] + A.a12 * gyh[a];
                    flux_y[a] = A.a12 * gxh[a] + A.a22 * gyh[a];
                }
                const double fx0 = A.a11 * cx;  // flux of the constant field (cx, 0)
                const double fy0 = A.a12 * cx;
                lift_energy += tri_area * A.a11 * cx * cx;

                for (int a = 0; a < 3; ++a) {
                    const int ga = nd[a];
                    const int ua = unknown_of[static_cast<std::size_t>(ga)];
                    const double load = tri_area * (fx0 * gxh[a] + fy0 * gyh[a]);
                    if (ua >= 0) b[static_cast<std::size_t>(ua)] -= load;
                    for (int bidx = 0; bidx < 3; ++bidx) {
                        const int gb = nd[bidx];
                        const double k_ab =
                            tri_area * (gxh[a] * flux_x[bidx] + gyh[a] * flux_y[bidx]);
                        if (ua >= 0) {
                            const int ub = unknown_of[static_cast<std::size_t>(gb)];
                            if (ub >= 0) {
                                builder.add(ua, ub, k_ab);
                            } else {
                                b[static_cast<std::size_t>(ua)] -=
                                    k_ab * lift[static_cast<std::size_t>(gb)];
                            }
                        }
                    }
                }
            }
        }
    }

    const detail::Csr K = builder.compress();

    // Initial guess: the flat-cylinder profile in free mode, zero otherwise.
    std::vector<double> x(static_cast<std::size_t>(n_unknown), 0.0);
    if (!pinned) {
        for (int j = 1; j < ny - 1; ++j) {
            const double v = (eta_of(j) + h) / (2.0 * h);
            for (int i = 0; i < nx; ++i) {
                x[static_cast<std::size_t>(unknown_of[static_cast<std::size_t>(node(i, j))])] = v;
            }
        }
    }

    SolverResult res;
    std::vector<double>* trace = p.record_energy ? &res.energy_trace : nullptr;

    // Energy of the full field: E = 2 f(x) + E_const, where f is the CG
    // objective and E_const collects the lift / affine contributions.
    double e_const = lift_energy;
    if (!pinned) {
        // Lift energy: sum over triangles of <A grad(lift), grad(lift)>.
        // The lift is nonzero only on the top row; fold it in through the
        // same quadratic form: E_lift = lift^T K_full lift.  Recompute by a
        // sweep over the top cell row (the only cells touching it).
        double e_lift = 0.0;
        const int j = ny - 2;
        for (int i = 0; i < nx; ++i) {
            for (int t = 0; t < 2; ++t) {
                std::array<double, 3> gxh, gyh, uval;
                double cen_eta;
                if (t == 0) {
                    gxh = {-inv_dx, inv_dx, 0.0};
                    gyh = {0.0, -inv_dy, inv_dy};
                    uval = {0.0, 0.0, 1.0};
                    cen_eta = eta_of(j) + dy / 3.0;
                } else {
                    gxh = {0.0, inv_dx, -inv_dx};
                    gyh = {-inv_dy, 0.0, inv_dy};
                    uval = {0.0, 1.0, 1.0};
                    cen_eta = eta_of(j) + 2.0 * dy / 3.0;
                }
                const double cen_xi = (i + (t == 0 ? 2.0 / 3.0 : 1.0 / 3.0)) * dx;
                const detail::Tensor2 A = detail::conductivity(p.mu.value_at(cen_xi, cen_eta));
                double gx = 0.0, gy = 0.0;
                for (int a = 0; a < 3; ++a) {
                    gx += uval[a] * gxh[a];
                    gy += uval[a] * gyh[a];
                }
                e_lift += tri_area * (A.a11 * gx * gx + 2.0 * A.a12 * gx * gy + A.a22 * gy * gy);
            }
        }
        e_const = e_lift;
    }

    auto objective_cb = [&](double f) {
        if (trace) trace->push_back(2.0 * f + e_const);
    };
    const detail::CgOutcome out = detail::conjugate_gradient(
        K, b, x, p.tol, p.max_iters, p.record_energy, objective_cb);

    // Final energy from the last objective value (recompute exactly).
    {
        std::vector<double> kx(x.size());
        K.apply(x, kx);
        double xkx = 0.0, xb = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            xkx += x[i] * kx[i];
            xb += x[i] * b[i];
        }
        res.energy = xkx - 2.0 * xb + e_const;
    }

    res.iterations = out.iterations;
    res.residual = out.residual;
    res.converged = out.converged;
    res.modulus = pinned ? res.energy : 1.0 / res.energy;

    // Assemble the full grid function for inspection.
    res.solution.assign(static_cast<std::size_t>(n_nodes), 0.0);
    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int g = node(i, j);
            const int u = unknown_of[static_cast<std::size_t>(g)];
            res.solution[static_cast<std::size_t>(g)] =
                u >= 0 ? x[static_cast<std::size_t>(u)] : lift[static_cast<std::size_t>(g)];
        }
    }
    return res;
}

struct ConvergenceRow {
    double step;     // eta grid spacing
    double modulus;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double observed_order;     // Richardson estimate from the last triple
    double extrapolated;       // Richardson limit from the last triple
};

/// Runs solve_modulus on dyadically refined grids (nx, ny doubled per
/// level, keeping the boundary rows in free mode).
inline ConvergenceStudy convergence_study(const SolverProblem& base, int levels) {
    if (levels < 3) throw std::domain_error("convergence_study: levels must be >= 3");
    ConvergenceStudy study{};
    for (int L = 0; L < levels; ++L) {
        SolverProblem p = base;
        const int f = 1 << L;
        p.nx = base.nx * f;
        p.ny = base.bc_mode == BcMode::PinnedShear ? base.ny * f : (base.ny - 1) * f + 1;
        const SolverResult r = solve_modulus(p);
        const double dy = base.bc_mode == BcMode::PinnedShear
                              ? 2.0 * base.annulus.log_r() / p.ny
                              : 2.0 * base.annulus.log_r() / (p.ny - 1);
        study.rows.push_back(ConvergenceRow{dy, r.modulus});
    }
    const std::size_t n = study.rows.size();
    const double m0 = study.rows[n - 3].modulus;
    const double m1 = study.rows[n - 2].modulus;
    const double m2 = study.rows[n - 1].modulus;
    const double d0 = m0 - m1, d1 = m1 - m2;
    if (d1 != 0.0 && d0 / d1 > 0.0) {
        study.observed_order = std::log2(std::abs(d0 / d1));
        study.extrapolated = m2 + d1 / (std::pow(2.0, study.observed_order) - 1.0);
    } else {
        // Differences at rounding level: the sequence has already converged.
        study.observed_order = std::numeric_limits<double>::infinity();
        study.extrapolated = m2;
    }
    return study;
}

enum class BracketPosition { Below, Inside, Above };

struct PaperBoundAudit {
    double t;
    double r;
    double ratio_free;      // solver modulus ratio, free-annulus mode
    double ratio_pinned;    // solver modulus ratio, pinned-shear mode
    double lower;
    double refined_lower;
    double upper;
    BracketPosition free_position;
    BracketPosition pinned_position;
};

/// Diagnostic only: solves the Spin_t structure in both regimes, converts
/// each modulus to a log r(.) / log r ratio and reports where the ratios
/// fall relative to the closed-form bracket.  Nothing is asserted; which
/// regime (if either) realizes the bracketed quantity is an open question
/// recorded with the artifact.
inline PaperBoundAudit paper_bound_audit(double t, const AnnulusSpec& a, int nx, int ny) {
    if (!(t > 2.0 * pi)) throw std::domain_error("paper_bound_audit: t must exceed 2*pi");
    const SpinParams sp(t, a);
    if (spin_beltrami_sup(sp) > 0.999) {
        throw std::domain_error("paper_bound_audit: sup|mu_t| exceeds the hard ellipticity "
                                "cap 0.999; reduce t / log r");
    }
    const BeltramiField field = BeltramiField::from_spin(sp, nx, ny);

    SolverProblem free_p(a, field);
    free_p.nx = nx;
    free_p.ny = ny + 1;
    free_p.mu_cap = 0.999;
    const SolverResult free_r = solve_modulus(free_p);

    SolverProblem pin_p(a, field);
    pin_p.bc_mode = BcMode::PinnedShear;
    pin_p.shear = t;
    pin_p.nx = nx;
    pin_p.ny = ny;
    pin_p.mu_cap = 0.999;
    const SolverResult pin_r = solve_modulus(pin_p);

    PaperBoundAudit audit{};
    audit.t = t;
    audit.r = a.r();
    audit.ratio_free = free_r.modulus / a.modulus();
    audit.ratio_pinned = pin_r.modulus / a.modulus();
    audit.lower = rt_lower_bound(sp);
    audit.refined_lower = rt_lower_bound_refined(sp);
    audit.upper = rt_upper_bound(sp);
    auto place = [&](double ratio) {
        if (ratio < audit.lower) return BracketPosition::Below;
        if (ratio > audit.upper) return BracketPosition::Above;
        return BracketPosition::Inside;
    };
    audit.free_position = place(audit.ratio_free);
    audit.pinned_position = place(audit.ratio_pinned);
    return audit;
}

} // namespace annulab
