#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "annulab/foliation.hpp"

using namespace annulab;
using Catch::Approx;

namespace {
const AnnulusSpec A_e(std::exp(1.0));
const AnnulusSpec A_2(2.0);

FoliationGrid random_smooth(const AnnulusSpec& a, int nx, int ny, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * pi);
    const double h = a.log_r();
    struct Mode {
        double a, phi;
        int k, m;
    };
    std::vector<Mode> modes;
    for (int k = 0; k <= 3; ++k) {
        for (int m = 1; m <= 3; ++m) {
            modes.push_back(Mode{amp(rng), phase(rng), k, m});
        }
    }
    return FoliationGrid::from_levels(a, nx, ny, [modes, h](double xi, double eta) {
        double v = 0.0;
        for (const auto& md : modes) {
            v += md.a * std::cos(md.k * xi + md.phi) * std::sin(md.m * pi * eta / (2.0 * h));
        }
        return v;
    });
}
} // namespace

TEST_CASE("dirichlet integral of the basic foliations") {
    const double h = A_e.log_r();
    SECTION("u = eta sampled as a level function") {
        const FoliationGrid u = horizontal_foliation(A_e, 128, 128);
        CHECK(dirichlet_integral(u, A_e) == Approx(4.0 * pi * h).epsilon(5e-3));
    }
    SECTION("u = xi through its gradient field") {
        const FoliationGrid u = vertical_foliation(A_e, 128, 128);
        CHECK(dirichlet_integral(u, A_e) == Approx(4.0 * pi * h).epsilon(1e-12));
    }
    SECTION("u = xi through levels with the 2*pi jump") {
        const FoliationGrid u = FoliationGrid::from_levels(
            A_e, 64, 65, [](double xi, double) { return xi; }, 2.0 * pi);
        CHECK(dirichlet_integral(u, A_e) == Approx(4.0 * pi * h).epsilon(1e-12));
    }
}

TEST_CASE("dirichlet integral of the sheared vertical foliation") {
    const double h = A_e.log_r();
    for (double t : {3.0 * pi, 4.0 * pi, 10.0 * pi}) {
        const SpinParams p(t, A_e);
        const double expected = 4.0 * pi * h * (1.0 + t * t / (h * h));

        const FoliationGrid grad = sheared_xi_foliation(p, 256, 256);
        CHECK(dirichlet_integral(grad, A_e) == Approx(expected).epsilon(1e-2));

        // Same foliation sampled as a level function (kink at the crease).
        const FoliationGrid lev = FoliationGrid::from_levels(
            A_e, 256, 256,
            [t, h](double xi, double eta) { return xi - t * (1.0 - std::abs(eta) / h); },
            2.0 * pi);
        CHECK(dirichlet_integral(lev, A_e) == Approx(expected).epsilon(1e-2));
    }
}

TEST_CASE("wedge integrals") {
    const double h = A_2.log_r();
    const FoliationGrid xi_f = vertical_foliation(A_2, 96, 97);
    const FoliationGrid eta_f = horizontal_foliation(A_2, 96, 97);
    SECTION("unit jacobian pair") {
        CHECK(wedge_integral(xi_f, eta_f, A_2) == Approx(4.0 * pi * h).epsilon(1e-10));
    }
    SECTION("wedge of a foliation with itself vanishes") {
        CHECK(wedge_integral(xi_f, xi_f, A_2) == Approx(0.0).margin(1e-12));
        CHECK(wedge_integral(eta_f, eta_f, A_2) == Approx(0.0).margin(1e-12));
    }
    SECTION("shear preserves the wedge (jacobian 1)") {
        const SpinParams p(4.0 * pi, A_2);
        const FoliationGrid su = sheared_xi_foliation(p, 256, 256);
        const FoliationGrid sv = sheared_eta_foliation(p, 256, 256);
        CHECK(wedge_integral(su, sv, A_2) == Approx(4.0 * pi * h).epsilon(1e-2));
    }
}

TEST_CASE("cauchy-schwarz inequality for foliation pairs") {
    SECTION("orthogonal unit foliations saturate") {
        const FoliationGrid u = vertical_foliation(A_e, 64, 65);
        const FoliationGrid v = horizontal_foliation(A_e, 64, 65);
        const auto rep = cauchy_schwarz_check(u, v, A_e);
        CHECK(rep.holds);
        CHECK(rep.lhs_squared == Approx(rep.rhs).epsilon(1e-10));
        CHECK(rep.lhs_squared == Approx(std::pow(4.0 * pi, 2)).epsilon(1e-10));
    }
    SECTION("sheared pair holds strictly") {
        const SpinParams p(4.0 * pi, A_e);
        const auto rep = cauchy_schwarz_check(sheared_xi_foliation(p, 128, 128),
                                              sheared_eta_foliation(p, 128, 128), A_e);
        CHECK(rep.holds);
        CHECK(rep.lhs_squared < rep.rhs * 0.5);
    }
    SECTION("random smooth pairs") {
        std::mt19937_64 rng(5150u);
        for (int k = 0; k < 20; ++k) {
            const FoliationGrid u = random_smooth(A_e, 64, 65, rng);
            const FoliationGrid v = random_smooth(A_e, 64, 65, rng);
            CHECK(cauchy_schwarz_check(u, v, A_e).holds);
        }
    }
}

TEST_CASE("quadrature converges at second order on smooth data") {
    const double h = A_e.log_r();
    const double beta = pi / (2.0 * h);
    auto u = [beta](double xi, double eta) { return std::sin(xi) * std::cos(beta * eta); };
    // Exact Dirichlet integral: pi h (1 + beta^2).
    const double exact = pi * h * (1.0 + beta * beta);
    double prev_err = -1.0;
    for (int n : {33, 65, 129}) {
        const FoliationGrid g = FoliationGrid::from_levels(A_e, n - 1, n, u);
        const double err = std::abs(dirichlet_integral(g, A_e) - exact);
        if (prev_err > 0.0) CHECK(prev_err / err >= 3.5);
        prev_err = err;
    }
}

TEST_CASE("foliation grid validation") {
    CHECK_THROWS_AS(FoliationGrid::from_levels(
                        A_e, 32, 33,
                        [](double xi, double eta) {
                            return xi > 3.0 && eta > 0.5 ? std::nan("") : 0.0;
                        }),
                    std::domain_error);
    const FoliationGrid small = horizontal_foliation(A_e, 8, 9);
    CHECK_THROWS_AS(dirichlet_integral(small, A_e), std::domain_error);
    const FoliationGrid u = horizontal_foliation(A_e, 32, 33);
    const FoliationGrid v = horizontal_foliation(A_e, 48, 33);
    CHECK_THROWS_AS(wedge_integral(u, v, A_e), std::domain_error);
    const FoliationGrid w = horizontal_foliation(A_2, 32, 33);
    CHECK_THROWS_AS(dirichlet_integral(w, A_e), std::domain_error);
}
