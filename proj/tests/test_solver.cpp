#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "annulab/modulus_solver.hpp"

using namespace annulab;
using Catch::Approx;

namespace {
const AnnulusSpec A_e(std::exp(1.0));
const AnnulusSpec A_2(2.0);

BeltramiField smooth_field(const AnnulusSpec& a, int nx, int ny, double amp) {
    const double h = a.log_r();
    return BeltramiField::sample(a, nx, ny, [amp, h](double xi, double eta) {
        return amp * std::polar(std::cos(pi * eta / (2.0 * h)), xi);
    });
}

// Independent oracle for the pinned-shear closed form: plain forward
// difference energy on the sheared torus gluing, minimized by exact
// coordinate descent.  The shear is an integer number of cells so the
// gluing needs no interpolation.  The unknown u is the periodic part of a
// discrete potential whose period is 1 around every horizontal loop
// (each horizontal edge carries slope 1/(2 pi)) and 0 around the glued
// crossing loop (the seam edge carries the compensating -s/(2 pi)).
double brute_force_pinned_modulus(double h, int nx, int ny, int shear_cells, int sweeps) {
    const double dx = 2.0 * pi / nx, dy = 2.0 * h / ny;
    const double s = shear_cells * dx;
    std::vector<double> u(static_cast<std::size_t>(nx) * ny, 0.0);
    auto idx = [&](int i, int j) {
        i = ((i % nx) + nx) % nx;
        j = ((j % ny) + ny) % ny;
        return static_cast<std::size_t>(j) * nx + i;
    };
    auto dxw = [&](int i, int j) {
        return (u[idx(i + 1, j)] - u[idx(i, j)]) / dx + 1.0 / (2.0 * pi);
    };
    auto dyw = [&](int i, int j) {
        if (j + 1 == ny) {
            return (u[idx(i - shear_cells, 0)] - u[idx(i, j)] - s / (2.0 * pi)) / dy;
        }
        return (u[idx(i, j + 1)] - u[idx(i, j)]) / dy;
    };
    auto energy = [&]() {
        double e = 0.0;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double gx = dxw(i, j), gy = dyw(i, j);
                e += (gx * gx + gy * gy) * dx * dy;
            }
        }
        return e;
    };
    // Energy terms touching u(i,j): two horizontal, two vertical.
    auto local = [&](int i, int j) {
        const int dn_i = j == 0 ? i + shear_cells : i;
        const int dn_j = j == 0 ? ny - 1 : j - 1;
        const double a = dxw(i, j), b = dxw(i - 1, j), c = dyw(i, j), d = dyw(dn_i, dn_j);
        return a * a + b * b + c * c + d * d;
    };
    // The local energy is quadratic in u(i,j), so one symmetric-difference
    // Newton step per visit is the exact 1D minimizer.
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = idx(i, j);
                const double e0 = local(i, j);
                u[k] += 1.0;
                const double ep = local(i, j);
                u[k] -= 2.0;
                const double em = local(i, j);
                u[k] += 1.0;
                const double grad = 0.5 * (ep - em);
                const double curv = ep + em - 2.0 * e0;
                if (curv > 0.0) u[k] -= grad / curv;
            }
        }
    }
    return energy();
}
} // namespace

TEST_CASE("flat cylinder modulus") {
    CHECK(modulus_flat(2.0 * pi, 2.0 * A_e.log_r()) == Approx(1.0 / pi).epsilon(1e-15));
    CHECK(modulus_flat(3.7, 3.7) == 1.0);
    CHECK(modulus_flat(2.0 * pi, 2.0) == Approx(1.0 / pi).epsilon(1e-15));
    CHECK_THROWS_AS(modulus_flat(0.0, 1.0), std::domain_error);
}

TEST_CASE("free-annulus solve reproduces log r / pi") {
    for (double r : {std::exp(1.0), 2.0, 10.0}) {
        const AnnulusSpec a(r);
        SolverProblem p(a, BeltramiField::zero(a, 16, 16));
        p.nx = 128;
        p.ny = 129;
        const SolverResult res = solve_modulus(p);
        CHECK(res.converged);
        CHECK(res.modulus == Approx(a.modulus()).epsilon(5e-3));
        // The linear profile is the exact discrete minimizer here.
        CHECK(res.modulus == Approx(a.modulus()).epsilon(1e-9));
    }
}

TEST_CASE("doubling log r doubles the flat modulus") {
    const AnnulusSpec a1(std::exp(1.0)), a2(std::exp(2.0));
    SolverProblem p1(a1, BeltramiField::zero(a1, 8, 8));
    SolverProblem p2(a2, BeltramiField::zero(a2, 8, 8));
    p1.nx = p2.nx = 64;
    p1.ny = p2.ny = 65;
    const double m1 = solve_modulus(p1).modulus;
    const double m2 = solve_modulus(p2).modulus;
    CHECK(m2 == Approx(2.0 * m1).epsilon(5e-3));
}

TEST_CASE("pinned-shear flat closed form") {
    const double h = A_e.log_r();     // cylinder height H = 2h
    const double H = 2.0 * h;

    SECTION("brute-force confirmation on a coarse grid") {
        const int nx = 16, ny = 16;
        const int shear_cells = 6;
        const double s = shear_cells * 2.0 * pi / nx;
        const double closed = (H * H + s * s) / (2.0 * pi * H);
        const double brute = brute_force_pinned_modulus(h, nx, ny, shear_cells, 4000);
        CHECK(brute == Approx(closed).epsilon(0.02));

        SolverProblem p(A_e, BeltramiField::zero(A_e, nx, ny));
        p.bc_mode = BcMode::PinnedShear;
        p.shear = s;
        p.nx = nx;
        p.ny = ny;
        CHECK(solve_modulus(p).modulus == Approx(closed).epsilon(0.01));
    }
    SECTION("closed form at 256^2 for generic shear") {
        for (double s : {1.0, 4.0, 4.0 * pi}) {
            SolverProblem p(A_e, BeltramiField::zero(A_e, 16, 16));
            p.bc_mode = BcMode::PinnedShear;
            p.shear = s;
            p.nx = 256;
            p.ny = 256;
            const double closed = (H * H + s * s) / (2.0 * pi * H);
            CHECK(solve_modulus(p).modulus == Approx(closed).epsilon(0.01));
        }
    }
    SECTION("zero shear agrees with the free mode") {
        SolverProblem pinned(A_2, BeltramiField::zero(A_2, 16, 16));
        pinned.bc_mode = BcMode::PinnedShear;
        pinned.shear = 0.0;
        pinned.nx = 64;
        pinned.ny = 64;
        SolverProblem free_p(A_2, BeltramiField::zero(A_2, 16, 16));
        free_p.nx = 64;
        free_p.ny = 65;
        CHECK(solve_modulus(pinned).modulus ==
              Approx(solve_modulus(free_p).modulus).epsilon(1e-6));
    }
}

TEST_CASE("constant beltrami field maps to the affine image modulus") {
    const complex mu(0.3, 0.2);
    const AnnulusSpec a = A_e;
    SolverProblem p(a, BeltramiField::constant(a, mu, 8, 8));
    p.nx = 96;
    p.ny = 97;
    const double expected =
        a.log_r() / pi * (1.0 - std::norm(mu)) / std::norm(complex(1.0, 0.0) + mu);
    CHECK(solve_modulus(p).modulus == Approx(expected).epsilon(0.01));
    CHECK(solve_modulus(p).modulus == Approx(expected).epsilon(1e-8));
}

TEST_CASE("spin structure leaves the free modulus invariant") {
    const SpinParams sp(4.0, A_e);   // sup|mu| = 4/sqrt(20) ~ 0.894
    SolverProblem p(A_e, BeltramiField::from_spin(sp, 64, 64));
    p.nx = 64;
    p.ny = 65;
    const SolverResult res = solve_modulus(p);
    CHECK(res.converged);
    CHECK(res.modulus == Approx(A_e.modulus()).epsilon(1e-8));
}

TEST_CASE("modulus is symmetric under t -> -t") {
    SECTION("free mode") {
        SolverProblem pp(A_e, BeltramiField::from_spin(SpinParams(3.0, A_e), 48, 48));
        SolverProblem pm(A_e, BeltramiField::from_spin(SpinParams(-3.0, A_e), 48, 48));
        pp.nx = pm.nx = 48;
        pp.ny = pm.ny = 49;
        CHECK(solve_modulus(pp).modulus == Approx(solve_modulus(pm).modulus).epsilon(1e-10));
    }
    SECTION("pinned mode with mirrored shear") {
        SolverProblem pp(A_e, BeltramiField::from_spin(SpinParams(3.0, A_e), 48, 48));
        SolverProblem pm(A_e, BeltramiField::from_spin(SpinParams(-3.0, A_e), 48, 48));
        pp.bc_mode = pm.bc_mode = BcMode::PinnedShear;
        pp.shear = 3.0;
        pm.shear = -3.0;
        pp.nx = pm.nx = 48;
        pp.ny = pm.ny = 48;
        CHECK(solve_modulus(pp).modulus == Approx(solve_modulus(pm).modulus).epsilon(1e-8));
    }
}

TEST_CASE("discrete maximum principle on the solved cases") {
    auto in_unit_range = [](const SolverResult& res) {
        for (double v : res.solution) {
            if (v < -1e-10 || v > 1.0 + 1e-10) return false;
        }
        return true;
    };
    SolverProblem p0(A_e, BeltramiField::zero(A_e, 8, 8));
    p0.nx = 48;
    p0.ny = 49;
    CHECK(in_unit_range(solve_modulus(p0)));

    SolverProblem pt(A_e, BeltramiField::from_spin(SpinParams(4.0, A_e), 48, 48));
    pt.nx = 48;
    pt.ny = 49;
    CHECK(in_unit_range(solve_modulus(pt)));

    SolverProblem pc(A_e, BeltramiField::constant(A_e, complex(0.25, -0.3), 8, 8));
    pc.nx = 48;
    pc.ny = 49;
    CHECK(in_unit_range(solve_modulus(pc)));
}

TEST_CASE("energy decreases monotonically and the residual target is met") {
    SolverProblem p(A_e, smooth_field(A_e, 64, 64, 0.4));
    p.nx = 64;
    p.ny = 65;
    p.record_energy = true;
    const SolverResult res = solve_modulus(p);
    CHECK(res.converged);
    CHECK(res.residual <= p.tol);
    REQUIRE(res.energy_trace.size() > 2);
    const double slack = 1e-10 * std::abs(res.energy_trace.front());
    for (std::size_t k = 1; k < res.energy_trace.size(); ++k) {
        CHECK(res.energy_trace[k] <= res.energy_trace[k - 1] + slack);
    }
    CHECK(res.energy_trace.back() == Approx(res.energy).epsilon(1e-9));
}

TEST_CASE("solver guards") {
    SECTION("iteration starvation is flagged, not thrown") {
        SolverProblem p(A_e, smooth_field(A_e, 32, 32, 0.5));
        p.nx = 32;
        p.ny = 33;
        p.max_iters = 2;
        const SolverResult res = solve_modulus(p);
        CHECK_FALSE(res.converged);
        CHECK(res.iterations == 2);
        CHECK(res.modulus > 0.0);
    }
    SECTION("conditioning cap") {
        SolverProblem p(A_e, BeltramiField::constant(A_e, complex(0.97, 0.0), 8, 8));
        p.nx = 32;
        p.ny = 33;
        CHECK_THROWS_AS(solve_modulus(p), std::domain_error);
        p.mu_cap = 0.99;
        CHECK_NOTHROW(solve_modulus(p));
        p.mu_cap = 0.9999;
        CHECK_THROWS_AS(solve_modulus(p), std::domain_error);
    }
    SECTION("grid and tolerance validation") {
        SolverProblem p(A_e, BeltramiField::zero(A_e, 8, 8));
        p.nx = 8;
        CHECK_THROWS_AS(solve_modulus(p), std::domain_error);
        p.nx = 32;
        p.tol = 0.0;
        CHECK_THROWS_AS(solve_modulus(p), std::domain_error);
    }
}

TEST_CASE("convergence study") {
    SECTION("flat structure is exact on every level") {
        SolverProblem p(A_e, BeltramiField::zero(A_e, 8, 8));
        p.nx = 16;
        p.ny = 17;
        const ConvergenceStudy st = convergence_study(p, 3);
        REQUIRE(st.rows.size() == 3);
        CHECK(std::abs(st.extrapolated - A_e.modulus()) <= 1e-4);
        for (const auto& row : st.rows) {
            CHECK(row.modulus == Approx(A_e.modulus()).epsilon(1e-8));
        }
    }
    SECTION("smooth field converges at second order") {
        SolverProblem p(A_e, smooth_field(A_e, 256, 256, 0.4));
        p.nx = 16;
        p.ny = 17;
        const ConvergenceStudy st = convergence_study(p, 4);
        CHECK(st.observed_order >= 1.8);
    }
    SECTION("crease-limited order for the spin structure, pinned and misaligned") {
        const double t = 3.0;
        const double h = A_e.log_r();
        const double exact = (4.0 * h * h + t * t) / (4.0 * pi * h);
        double prev_err = -1.0, prev_dy = 0.0;
        std::vector<double> orders;
        for (int ny : {17, 35, 71}) {
            SolverProblem p(A_e, BeltramiField::from_spin(SpinParams(t, A_e), 256, 1024));
            p.bc_mode = BcMode::PinnedShear;
            p.shear = t;
            p.nx = 2 * ny - 2;
            p.ny = ny;
            const double err = std::abs(solve_modulus(p).modulus - exact);
            const double dy = 2.0 * h / ny;
            if (prev_err > 0.0) {
                orders.push_back(std::log(prev_err / err) / std::log(prev_dy / dy));
            }
            prev_err = err;
            prev_dy = dy;
        }
        REQUIRE(orders.size() == 2);
        CHECK(orders.back() >= 0.9);
    }
    SECTION("level validation") {
        SolverProblem p(A_e, BeltramiField::zero(A_e, 8, 8));
        CHECK_THROWS_AS(convergence_study(p, 2), std::domain_error);
    }
}

TEST_CASE("paper bound audit reports both regimes") {
    const PaperBoundAudit audit = paper_bound_audit(4.0 * pi, A_e, 48, 48);
    CHECK(audit.t == Approx(4.0 * pi));
    CHECK(audit.r == Approx(std::exp(1.0)));
    // The spin structure descends to the unmarked annulus, so the free
    // modulus cannot move: this is the diagnostic motivating the pinned mode.
    CHECK(audit.ratio_free == Approx(1.0).epsilon(1e-4));
    CHECK(audit.lower == Approx(3.211).epsilon(1e-3));
    CHECK(audit.upper == Approx(12.606).epsilon(1e-3));
    CHECK(std::isfinite(audit.ratio_pinned));
    CHECK(audit.ratio_pinned > 1.0);
    CHECK_THROWS_AS(paper_bound_audit(pi, A_e, 32, 32), std::domain_error);
}
