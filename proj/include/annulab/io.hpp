#pragma once

// CSV and JSON serialization for the library's tables and reports.
// Numbers are written with 17 significant digits through std::to_chars,
// so output is locale-independent and byte-reproducible.

#include <charconv>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "annulab/bounds.hpp"
#include "annulab/contradiction.hpp"
#include "annulab/density.hpp"
#include "annulab/foliation.hpp"
#include "annulab/metrics.hpp"
#include "annulab/modulus_solver.hpp"

namespace annulab {

using json = nlohmann::json;

/// Shortest-then-17-significant-digit decimal form of a double; "." is the
/// decimal separator regardless of locale.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    if (res.ec != std::errc()) return "nan";
    return std::string(buf, res.ptr);
}

inline void write_ratio_curve_csv(std::ostream& os, const std::vector<RatioSample>& rows) {
    os << "r,caratheodory,kobayashi,ratio\n";
    for (const auto& s : rows) {
        os << format_double(s.r) << ',' << format_double(s.caratheodory) << ','
           << format_double(s.kobayashi) << ',' << format_double(s.ratio) << '\n';
    }
}

inline json ratio_curve_json(const std::vector<RatioSample>& rows) {
    json arr = json::array();
    for (const auto& s : rows) {
        arr.push_back({{"r", s.r},
                       {"caratheodory", s.caratheodory},
                       {"kobayashi", s.kobayashi},
                       {"ratio", s.ratio}});
    }
    return arr;
}

inline void write_bound_table_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
    os << "t,r,lower,refined_lower,upper\n";
    for (const auto& b : rows) {
        os << format_double(b.t) << ',' << format_double(b.r) << ',' << format_double(b.lower)
           << ',' << format_double(b.refined_lower) << ',' << format_double(b.upper) << '\n';
    }
}

inline json bound_table_json(const std::vector<BoundRow>& rows) {
    json arr = json::array();
    for (const auto& b : rows) {
        arr.push_back({{"t", b.t},
                       {"r", b.r},
                       {"lower", b.lower},
                       {"refined_lower", b.refined_lower},
                       {"upper", b.upper}});
    }
    return arr;
}

inline void write_ledger_csv(std::ostream& os, const std::vector<LedgerRow>& rows) {
    os << "n,lower_201,lower_above,upper_M,hyp_core_length\n";
    for (const auto& l : rows) {
        os << l.n << ',' << format_double(l.lower_201) << ',' << format_double(l.lower_above)
           << ',' << format_double(l.upper_M) << ',' << format_double(l.hyp_core_length)
           << '\n';
    }
}

inline json ledger_json(const std::vector<LedgerRow>& rows) {
    json arr = json::array();
    for (const auto& l : rows) {
        arr.push_back({{"n", l.n},
                       {"lower_201", l.lower_201},
                       {"lower_above", l.lower_above},
                       {"upper_M", l.upper_M},
                       {"hyp_core_length", l.hyp_core_length}});
    }
    return arr;
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceStudy& study) {
    os << "h,modulus\n";
    for (const auto& row : study.rows) {
        os << format_double(row.step) << ',' << format_double(row.modulus) << '\n';
    }
}

inline json solver_report_json(const SolverResult& res, const SolverProblem& p, double t) {
    return json{{"modulus", res.modulus},
                {"energy", res.energy},
                {"iterations", res.iterations},
                {"residual", res.residual},
                {"converged", res.converged},
                {"grid", {p.nx, p.ny}},
                {"mode", p.bc_mode == BcMode::FreeAnnulus ? "free-annulus" : "pinned-shear"},
                {"t", t},
                {"r", p.annulus.r()}};
}

inline json density_report_json(const DensityBracket& br, const AnnulusSpec& a,
                                const complex& p, int basis_size) {
    return json{{"r", a.r()},
                {"p", {p.real(), p.imag()}},
                {"N", basis_size},
                {"lower", br.lower},
                {"upper", br.upper},
                {"rho", br.rho},
                {"quad_error", br.quad_error},
                {"passed", br.passed}};
}

/// Row-major grid snapshot: one metadata line (nx, ny, r, t), then one
/// comma-separated line per grid row.
inline void write_grid_csv(std::ostream& os, const FoliationGrid& g, double r, double t) {
    os << "nx,ny,r,t\n"
       << g.nx() << ',' << g.ny() << ',' << format_double(r) << ',' << format_double(t)
       << '\n';
    if (g.has_values()) {
        const auto& v = g.values();
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                os << format_double(v[static_cast<std::size_t>(j) * g.nx() + i])
                   << (i + 1 == g.nx() ? '\n' : ',');
            }
        }
    } else {
        // Gradient-backed foliation: two blocks, d/dxi then d/deta.
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                os << format_double(g.grad_xi(i, j)) << (i + 1 == g.nx() ? '\n' : ',');
            }
        }
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                os << format_double(0.5 * (g.grad_eta_up(i, j) + g.grad_eta_down(i, j)))
                   << (i + 1 == g.nx() ? '\n' : ',');
            }
        }
    }
}

} // namespace annulab
