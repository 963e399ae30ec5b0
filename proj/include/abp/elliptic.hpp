// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "abp/field.hpp"

namespace abp {

struct SolveDiagnostics {
    int sweeps = 0;
    double residual_inf = 0;
    double tolerance = 0;
    std::string scheme;
};

struct SolveOptions {
    double tol_factor = 1e-8;  // residual target = tol_factor * max(1, ||f||_inf)
    int max_sweeps = 500000;
    double omega = 0;  // 0 = auto; 1 = Gauss-Seidel
    int check_interval = 8;
};

struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& msg, SolveDiagnostics d)
        : std::runtime_error(msg), diagnostics(std::move(d)) {}
    SolveDiagnostics diagnostics;
};

namespace detail {

/// Red-black SOR for -lap_h u = f with u = g on boundary cells. Sweep order
/// is fixed (red cells in interior-id order, then black), so the result is
/// deterministic for fixed inputs and options.
inline std::pair<ScalarField, SolveDiagnostics> rb_sor(std::shared_ptr<const GridDomain> dom_ptr,
                                                       const std::vector<double>& f,
                                                       const std::vector<double>& g,
                                                       SolveOptions opt, double init_value) {
    const GridDomain& dom = *dom_ptr;
    const int n = dom.dim();
    const double h2 = dom.spacing() * dom.spacing();
    const auto& icells = dom.interior_cells();
    const std::size_t N = icells.size();
    if (f.size() != N) throw std::invalid_argument("solve_dirichlet: f size mismatch");
    if (g.size() != dom.n_boundary())
        throw std::invalid_argument("solve_dirichlet: boundary data size mismatch");

    // Per-cell neighbor table: interior ids >= 0, boundary encoded as
    // -(boundary_id + 2). Built once; sweeps then touch flat arrays only.
    std::vector<int> nbr(N * 2 * n);
    std::vector<int> red, black;
    int max_extent = 0;
    {
        int mn[3] = {1 << 30, 1 << 30, 1 << 30}, mx[3] = {-(1 << 30), -(1 << 30), -(1 << 30)};
        for (std::size_t c = 0; c < N; ++c) {
            const GridIndex gi = icells[c];
            int v[3] = {gi.i, gi.j, gi.k};
            for (int d = 0; d < 3; ++d) {
                mn[d] = std::min(mn[d], v[d]);
                mx[d] = std::max(mx[d], v[d]);
            }
            for (int d = 0; d < n; ++d)
                for (int s : {-1, +1}) {
                    GridIndex nb = GridDomain::shifted(gi, d, s);
                    int slot = static_cast<int>(c) * 2 * n + 2 * d + (s + 1) / 2;
                    if (dom.cell_class(nb) == CellClass::interior)
                        nbr[slot] = dom.cell_id(nb);
                    else
                        nbr[slot] = -(dom.cell_id(nb) + 2);
                }
            (((gi.i + gi.j + gi.k) & 1) == 0 ? red : black).push_back(static_cast<int>(c));
        }
        for (int d = 0; d < n; ++d) max_extent = std::max(max_extent, mx[d] - mn[d] + 1);
    }

    double omega = opt.omega;
    if (omega <= 0) omega = 2.0 / (1.0 + std::sin(kPi / (max_extent + 1)));

    double f_inf = 0;
    for (double v : f) f_inf = std::max(f_inf, std::abs(v));
    const double tol = opt.tol_factor * std::max(1.0, f_inf);

    std::vector<double> u(N, init_value);
    auto value = [&](int code) { return code >= 0 ? u[code] : g[-code - 2]; };

    auto sweep_half = [&](const std::vector<int>& cells) {
        for (int c : cells) {
            double acc = h2 * f[c];
            const int* nb = &nbr[std::size_t(c) * 2 * n];
            for (int d = 0; d < 2 * n; ++d) acc += value(nb[d]);
            double unew = acc / (2.0 * n);
            u[c] += omega * (unew - u[c]);
        }
    };
    auto residual_inf = [&]() {
        double r = 0;
        for (std::size_t c = 0; c < N; ++c) {
            double acc = 2.0 * n * u[c];
            const int* nb = &nbr[c * 2 * n];
            for (int d = 0; d < 2 * n; ++d) acc -= value(nb[d]);
            r = std::max(r, std::abs(f[c] - acc / h2));
        }
        return r;
    };

    SolveDiagnostics diag;
    diag.tolerance = tol;
    diag.scheme = omega == 1.0 ? "red-black Gauss-Seidel"
                               : "red-black SOR(omega=" + std::to_string(omega) + ")";
    while (diag.sweeps < opt.max_sweeps) {
        sweep_half(red);
        sweep_half(black);
        ++diag.sweeps;
        if (diag.sweeps % opt.check_interval == 0 || diag.sweeps == opt.max_sweeps) {
            diag.residual_inf = residual_inf();
            if (diag.residual_inf <= tol) {
                ScalarField out(dom_ptr);
                out.interior_values() = std::move(u);
                out.boundary_values() = g;
                return {std::move(out), diag};
            }
        }
    }
    throw NonConvergence("solve_dirichlet: no convergence after " +
                             std::to_string(diag.sweeps) + " sweeps (residual " +
                             std::to_string(diag.residual_inf) + ", tol " +
                             std::to_string(tol) + ")",
                         diag);
}

}  // namespace detail

/// Solve -lap_h u = f (interior) with u = g on boundary cells.
inline std::pair<ScalarField, SolveDiagnostics> solve_dirichlet(
    std::shared_ptr<const GridDomain> dom, const std::vector<double>& f,
    const std::vector<double>& g, SolveOptions opt = {}) {
    double g_mid = 0;
    if (!g.empty()) {
        auto [mn, mx] = std::minmax_element(g.begin(), g.end());
        g_mid = 0.5 * (*mn + *mx);
    }
    return detail::rb_sor(std::move(dom), f, g, opt, g_mid);
}

inline std::pair<ScalarField, SolveDiagnostics> solve_dirichlet(const ScalarField& f,
                                                                const std::vector<double>& g,
                                                                SolveOptions opt = {}) {
    return solve_dirichlet(f.domain_ptr(), f.interior_values(), g, opt);
}

/// Harmonic extension of boundary data: solve_dirichlet with f = 0, run with
/// omega = 1 and hull-midpoint start. Plain averaging keeps every iterate
/// inside [min g, max g], so the discrete maximum principle holds exactly
/// for the returned field.
inline ScalarField harmonic_extension(std::shared_ptr<const GridDomain> dom,
                                      const std::vector<double>& g, SolveOptions opt = {}) {
    opt.omega = 1.0;
    std::vector<double> zero(dom->n_interior(), 0.0);
    double g_mid = 0;
    if (!g.empty()) {
        auto [mn, mx] = std::minmax_element(g.begin(), g.end());
        g_mid = 0.5 * (*mn + *mx);
    }
    return detail::rb_sor(std::move(dom), zero, g, opt, g_mid).first;
}

}  // namespace abp
