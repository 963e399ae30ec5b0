// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "abp/field.hpp"
#include "abp/norms.hpp"

namespace abp {

// ---------------------------------------------------------------------------
// Exponential integral E1
// ---------------------------------------------------------------------------

/// E1(a) = int_a^inf e^{-y}/y dy for a > 0. Series below 1, continued
/// fraction (modified Lentz) above; relative error well under 1e-10 in both
/// regimes.
inline double exp_integral_e1(double a) {
    if (!(a > 0)) throw std::invalid_argument("exp_integral_e1: a must be > 0");
    constexpr double euler_gamma = 0.57721566490153286060651209008240243;
    if (a < 1.0) {
        // E1(a) = -gamma - ln a + sum_{k>=1} (-1)^{k+1} a^k / (k k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 60; ++k) {
            term *= -a / k;
            double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        }
        return -euler_gamma - std::log(a) + sum;
    }
    if (a > 700.0) return 0.0;  // below double underflow of e^{-a}
    // E1(a) = e^{-a} / (a + 1 - 1/(a + 3 - 4/(a + 5 - 9/(...))))
    const double tiny = 1e-300;
    double b = a + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        double an = -double(i) * double(i);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-a);
}

// ---------------------------------------------------------------------------
// Technical lemma: int_0^t (c1/s) exp(-r^2/(c2 s)) ds vs its log bound
// ---------------------------------------------------------------------------

struct LemmaBound {
    double a;      // r^2 / (c2 t)
    double lhs;    // c1 * E1(a), the time integral in closed form
    double rhs;    // (1 + max(0, -log a)) * exp(-a)
    double ratio;  // lhs / rhs
};

inline LemmaBound lemma_bound_check(double t, double r, double c1, double c2) {
    if (!(t > 0 && r > 0 && c1 > 0 && c2 > 0))
        throw std::invalid_argument("lemma_bound_check: all arguments must be > 0");
    LemmaBound out;
    out.a = r * r / (c2 * t);
    out.lhs = c1 * exp_integral_e1(out.a);
    out.rhs = (1.0 + std::max(0.0, -std::log(out.a))) * std::exp(-out.a);
    out.ratio = out.lhs / out.rhs;
    return out;
}

// ---------------------------------------------------------------------------
// Heat kernel time integrals, convention p(s,x,y) = (4 pi s)^{-n/2} e^{-r^2/4s}
// ---------------------------------------------------------------------------

/// int_0^t (4 pi s)^{-n/2} exp(-r^2/(4s)) ds.
/// n = 2: E1(r^2/(4t)) / (4 pi), divergent for t = inf.
/// n = 3: erfc(r/(2 sqrt(t))) / (4 pi r); t = inf gives the Newtonian 1/(4 pi r).
inline double heat_kernel_time_integral(double r, double t, int n) {
    if (!(r > 0)) throw std::invalid_argument("heat_kernel_time_integral: r must be > 0");
    if (!(t > 0)) throw std::invalid_argument("heat_kernel_time_integral: t must be > 0");
    if (n == 2) {
        if (std::isinf(t))
            throw std::invalid_argument("heat_kernel_time_integral: divergent for n=2, t=inf");
        return exp_integral_e1(r * r / (4.0 * t)) / (4.0 * kPi);
    }
    if (n == 3) {
        if (std::isinf(t)) return 1.0 / (4.0 * kPi * r);
        return std::erfc(r / (2.0 * std::sqrt(t))) / (4.0 * kPi * r);
    }
    throw std::invalid_argument("heat_kernel_time_integral: n must be 2 or 3");
}

// ---------------------------------------------------------------------------
// Grid kernel functionals
// ---------------------------------------------------------------------------

struct KernelFunctionalResult {
    double max_value = 0;
    Vec argmax;
    /// Functional value per evaluation point (interior ids, or the
    /// restricted list order); retained on request.
    std::optional<std::vector<double>> per_point_values;
};

struct KernelEvalOptions {
    bool keep_per_point = false;
    /// Restrict evaluation to these interior ids (empty = every interior
    /// cell). Used for top-k candidate evaluation on large grids.
    std::vector<int> eval_interior_ids;
};

namespace detail {

struct KernelSource {
    std::vector<Vec> pos;
    std::vector<double> weight;  // |g| * h^n, zero cells skipped
};

inline KernelSource gather_sources(const ScalarField& g) {
    const GridDomain& dom = g.domain();
    const double cell = std::pow(dom.spacing(), dom.dim());
    KernelSource src;
    const auto& icells = dom.interior_cells();
    for (std::size_t c = 0; c < icells.size(); ++c) {
        double w = std::abs(g.interior_values()[c]);
        if (w == 0.0) continue;
        src.pos.push_back(dom.cell_center(icells[c]));
        src.weight.push_back(w * cell);
    }
    return src;
}

template <class Kernel>
KernelFunctionalResult eval_functional(const GridDomain& dom, const ScalarField& g,
                                       const KernelEvalOptions& opt, Kernel kernel) {
    KernelSource src = gather_sources(g);
    std::vector<int> points = opt.eval_interior_ids;
    if (points.empty()) {
        points.resize(dom.n_interior());
        for (std::size_t i = 0; i < points.size(); ++i) points[i] = static_cast<int>(i);
    }
    std::vector<double> vals(points.size(), 0.0);
    const auto& icells = dom.interior_cells();
    parallel_for(points.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
            Vec x = dom.cell_center(icells[points[q]]);
            double acc = 0;  // fixed source order: value independent of partition
            for (std::size_t s = 0; s < src.pos.size(); ++s)
                acc += kernel(dist2(x, src.pos[s])) * src.weight[s];
            vals[q] = acc;
        }
    });
    KernelFunctionalResult out;
    std::size_t arg = 0;
    for (std::size_t q = 0; q < vals.size(); ++q)
        if (vals[q] > out.max_value) {
            out.max_value = vals[q];
            arg = q;
        }
    if (!vals.empty()) out.argmax = dom.cell_center(icells[points[arg]]);
    if (opt.keep_per_point) out.per_point_values = std::move(vals);
    return out;
}

}  // namespace detail

/// F(x) = sum_y max(1, log(scale/|x-y|^2)) |g(y)| h^2 over interior cells,
/// self-cell regularized by |x-y| -> h/2. Planar only.
inline KernelFunctionalResult log_kernel_functional(const GridDomain& dom, const ScalarField& g,
                                                    double scale,
                                                    const KernelEvalOptions& opt = {}) {
    if (dom.dim() != 2)
        throw std::invalid_argument("log_kernel_functional: requires a planar domain");
    if (!(scale > 0)) throw std::invalid_argument("log_kernel_functional: scale must be > 0");
    const double r2min = dom.spacing() * dom.spacing() / 4.0;
    return detail::eval_functional(dom, g, opt, [scale, r2min](double r2) {
        return std::max(1.0, std::log(scale / std::max(r2, r2min)));
    });
}

/// F(x) = sum_y |x-y|^{-1} |g(y)| h^3, the Newtonian-potential bound in 3D;
/// self-cell regularized by |x-y| -> h/2.
inline KernelFunctionalResult riesz_functional(const GridDomain& dom, const ScalarField& g,
                                               const KernelEvalOptions& opt = {}) {
    if (dom.dim() != 3) throw std::invalid_argument("riesz_functional: requires a 3D domain");
    const double r2min = dom.spacing() * dom.spacing() / 4.0;
    return detail::eval_functional(dom, g, opt, [r2min](double r2) {
        return 1.0 / std::sqrt(std::max(r2, r2min));
    });
}

}  // namespace abp
