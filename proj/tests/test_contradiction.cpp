#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "annulab/contradiction.hpp"

using namespace annulab;
using Catch::Approx;

namespace {
const AnnulusSpec A_e(std::exp(1.0));
}

TEST_CASE("ledger rows match hand-computed arithmetic") {
    const double e = std::exp(1.0);
    const auto rows = ledger(A_e, 6);
    REQUIRE(rows.size() == 6);
    for (int n = 1; n <= 6; ++n) {
        const LedgerRow& row = rows[static_cast<std::size_t>(n - 1)];
        CHECK(row.n == n);
        CHECK(row.lower_201 == Approx(n * pi / 4.0).epsilon(1e-14));
        CHECK(row.lower_above == Approx(n / 2.0).epsilon(1e-14));
        CHECK(row.upper_M == Approx(e / (e - 1.0)).epsilon(1e-14));
        CHECK(row.hyp_core_length == Approx(pi * pi).epsilon(1e-14));
    }
    // n = 4 is the first row with lower_above beyond the constant.
    CHECK(rows[3].lower_above > rows[3].upper_M);
    CHECK(rows[2].lower_above < rows[2].upper_M);
}

TEST_CASE("ledger rows are exactly reproducible") {
    const auto a = ledger(A_e, 10);
    const auto b = ledger(A_e, 10);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].lower_201 == b[k].lower_201);
        CHECK(a[k].lower_above == b[k].lower_above);
        CHECK(a[k].upper_M == b[k].upper_M);
        CHECK(a[k].hyp_core_length == b[k].hyp_core_length);
    }
}

TEST_CASE("both lower bounds grow affinely while the upper constant stays") {
    const AnnulusSpec a(3.0);
    const auto rows = ledger(a, 20);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k].lower_201 > rows[k - 1].lower_201);
        CHECK(rows[k].lower_above > rows[k - 1].lower_above);
        CHECK(rows[k].upper_M == rows[k - 1].upper_M);
    }
}

TEST_CASE("crossing indices") {
    CHECK(crossing_index(A_e, LowerBoundKind::Above) == 4);
    CHECK(crossing_index(A_e, LowerBoundKind::Eq201) == 3);

    SECTION("the 201 slope crosses first or simultaneously (pi/4 > 1/2)") {
        for (double r : {1.2, 1.7, 2.0, 5.0, 12.0, 100.0}) {
            const AnnulusSpec a(r);
            CHECK(crossing_index(a, LowerBoundKind::Eq201) <=
                  crossing_index(a, LowerBoundKind::Above));
        }
    }
    SECTION("crossing is strict and minimal") {
        for (double r : {1.3, 2.0, std::exp(1.0), 7.0}) {
            const AnnulusSpec a(r);
            for (auto kind : {LowerBoundKind::Eq201, LowerBoundKind::Above}) {
                const auto n = crossing_index(a, kind);
                const double slope =
                    kind == LowerBoundKind::Eq201 ? pi / (4.0 * a.log_r()) : 0.5 / a.log_r();
                const double M = a.r() / (a.r() - 1.0);
                CHECK(static_cast<double>(n) * slope > M);
                if (n > 1) CHECK(static_cast<double>(n - 1) * slope <= M);
            }
        }
    }
    SECTION("index grows without bound as r -> 1") {
        const auto n1 = crossing_index(AnnulusSpec(1.1), LowerBoundKind::Above);
        const auto n2 = crossing_index(AnnulusSpec(1.01), LowerBoundKind::Above);
        const auto n3 = crossing_index(AnnulusSpec(1.001), LowerBoundKind::Above);
        CHECK(n1 < n2);
        CHECK(n2 < n3);
        CHECK(n3 > 1000);
    }
    SECTION("guard against absurd indices") {
        CHECK_THROWS_AS(crossing_index(AnnulusSpec(1.0 + 1e-12), LowerBoundKind::Above),
                        std::domain_error);
    }
}
