#pragma once

// Arithmetic engine of the proof by contradiction: the two growing lower
// bounds for the densified lengths of the waist curves of A_{r^n}, the
// n-independent upper constant M = r/(r-1), and the crossing index where
// a lower bound first exceeds M.
//
// The row also carries the hyperbolic core length of A_{r^n} computed
// independently from the explicit Kobayashi density (which comes out
// n-independent); the ledger reports both normalizations side by side and
// deliberately does not reconcile them.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "annulab/annulus.hpp"

namespace annulab {

struct LedgerRow {
    int n;
    double lower_201;        // n * pi / (4 log r)
    double lower_above;      // n / (2 log r)
    double upper_M;          // r / (r - 1), constant in n
    double hyp_core_length;  // 2 pi n * pi / (2 n log r) = pi^2 / log r
};

inline LedgerRow ledger_row(const AnnulusSpec& a, int n) {
    if (n < 1) throw std::domain_error("ledger_row: n must be >= 1");
    const double h = a.log_r();
    LedgerRow row{};
    row.n = n;
    row.lower_201 = n * pi / (4.0 * h);
    row.lower_above = n / (2.0 * h);
    row.upper_M = a.r() / (a.r() - 1.0);
    row.hyp_core_length = 2.0 * pi * n * (pi / (2.0 * n * h));
    return row;
}

inline std::vector<LedgerRow> ledger(const AnnulusSpec& a, int n_max) {
    if (n_max < 1) throw std::domain_error("ledger: n_max must be >= 1");
    std::vector<LedgerRow> rows;
    rows.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) rows.push_back(ledger_row(a, n));
    return rows;
}

enum class LowerBoundKind { Eq201, Above };

/// Least n with the selected lower bound strictly exceeding M = r/(r-1).
inline std::int64_t crossing_index(const AnnulusSpec& a, LowerBoundKind which) {
    const double h = a.log_r();
    const double slope = which == LowerBoundKind::Eq201 ? pi / (4.0 * h) : 0.5 / h;
    const double M = a.r() / (a.r() - 1.0);
    const double x = M / slope;
    if (!(x < 1e9)) {
        throw std::domain_error("crossing_index: index exceeds the 1e9 guard");
    }
    std::int64_t n = static_cast<std::int64_t>(std::floor(x)) + 1;
    if (n < 1) n = 1;
    // floor arithmetic near an exact integer boundary: enforce strictness.
    while (static_cast<double>(n) * slope <= M) ++n;
    while (n > 1 && static_cast<double>(n - 1) * slope > M) --n;
    return n;
}

} // namespace annulab
