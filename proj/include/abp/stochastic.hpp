// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "abp/geometry.hpp"
#include "abp/rng.hpp"

namespace abp {

/// Brownian increments have variance 2*dt per coordinate, so the free
/// transition density is (4 pi t)^{-n/2} exp(-r^2/(4t)) and the path
/// generator is the full Laplacian. (The 1/2-Laplacian convention would halve
/// the variance and is not used anywhere in this library.)
struct McConfig {
    std::uint64_t seed = 1;
    std::int64_t n_paths = 100000;
    double dt = 1e-4;
    double horizon = 1.0;
    std::int64_t substream_width = 4096;

    static McConfig from_json(const nlohmann::json& j) {
        McConfig c;
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("n_paths")) c.n_paths = j.at("n_paths").get<std::int64_t>();
        if (j.contains("dt")) c.dt = j.at("dt").get<double>();
        if (j.contains("horizon")) c.horizon = j.at("horizon").get<double>();
        if (j.contains("substream_width"))
            c.substream_width = j.at("substream_width").get<std::int64_t>();
        return c;
    }
    nlohmann::json to_json() const {
        return {{"seed", seed},
                {"n_paths", n_paths},
                {"dt", dt},
                {"horizon", horizon},
                {"substream_width", substream_width}};
    }
};

struct PathStats {
    std::int64_t n_paths = 0;
    double exit_fraction = 0, exit_fraction_stderr = 0;
    double mean_terminal_u = 0, terminal_stderr = 0;
    double mean_occupation_integral = 0, occupation_stderr = 0;
    /// Feynman-Kac estimate of u(x0): E[u(end)] - E[int lap_u ds].
    double estimate = 0, estimate_stderr = 0;
};

struct McEstimate {
    double value = 0;
    double stderr = 0;
};

struct ExitHistogram {
    double t_max = 0;
    std::vector<std::int64_t> counts;  // refined exit times binned over [0, t_max)
};

namespace detail {

struct PathAccum {
    double exit = 0, exit2 = 0;
    double term = 0, term2 = 0;
    double occ = 0, occ2 = 0;
    double est = 0, est2 = 0;
};

struct PathOutcome {
    bool absorbed = false;
    double exit_time = 0;
    Vec end;            // exit point if absorbed, else position at horizon
    double occupation = 0;
};

/// One path of the sticky-boundary walk. Detects exit on the first step
/// whose endpoint leaves the open shape and bisects the step segment for the
/// crossing point (spatial tolerance 1e-3 sqrt(dt)). Note the O(sqrt(dt))
/// systematic late-exit bias of endpoint monitoring; no bridge correction is
/// applied here.
template <class Inside>
PathOutcome run_path(const Inside& inside, int dim, Vec x0, double dt, double horizon,
                     const std::function<double(Vec)>* lap_u, PathRng& rng) {
    PathOutcome out;
    const std::int64_t n_steps = static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-12));
    const double bisect_tol = 1e-3 * std::sqrt(dt);
    Vec x = x0;
    double t = 0;
    for (std::int64_t k = 0; k < n_steps; ++k) {
        const double step_dt = std::min(dt, horizon - t);
        const double sigma = std::sqrt(2.0 * step_dt);
        Vec d{sigma * rng.normal(), sigma * rng.normal(),
              dim == 3 ? sigma * rng.normal() : 0.0};
        Vec xn = x + d;
        if (!inside(xn)) {
            double lo = 0.0, hi = 1.0;
            const double len = d.norm();
            while ((hi - lo) * len > bisect_tol) {
                double mid = 0.5 * (lo + hi);
                (inside(x + mid * d) ? lo : hi) = mid;
            }
            if (lap_u) out.occupation += (*lap_u)(x)*hi * step_dt;
            out.absorbed = true;
            out.exit_time = t + hi * step_dt;
            out.end = x + hi * d;
            return out;
        }
        if (lap_u) out.occupation += (*lap_u)(x)*step_dt;
        x = xn;
        t += step_dt;
    }
    out.end = x;
    out.exit_time = horizon;
    return out;
}

template <class Inside>
PathStats run_ensemble(const Inside& inside, int dim, Vec x0, const McConfig& cfg,
                       const std::function<double(Vec)>* lap_u,
                       const std::function<double(Vec)>* u_boundary,
                       const std::function<double(Vec)>* eval_u, ExitHistogram* hist) {
    if (!inside(x0)) throw std::invalid_argument("paths: x0 is not inside the shape");
    if (!(cfg.dt > 0)) throw std::invalid_argument("paths: dt must be > 0");
    if (!(cfg.horizon > 0)) throw std::invalid_argument("paths: horizon must be > 0");
    if (cfg.dt >= cfg.horizon) throw std::invalid_argument("paths: need dt < horizon");
    if (cfg.n_paths <= 0) throw std::invalid_argument("paths: n_paths must be > 0");
    const std::int64_t width = std::max<std::int64_t>(1, cfg.substream_width);
    const std::int64_t n_sub = (cfg.n_paths + width - 1) / width;

    std::vector<PathAccum> acc(n_sub);
    std::vector<std::vector<std::int64_t>> hists;
    if (hist) hists.assign(n_sub, std::vector<std::int64_t>(hist->counts.size(), 0));

    parallel_for(static_cast<std::size_t>(n_sub), [&](std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) {
            PathAccum& a = acc[s];
            const std::int64_t p0 = static_cast<std::int64_t>(s) * width;
            const std::int64_t p1 = std::min(cfg.n_paths, p0 + width);
            for (std::int64_t p = p0; p < p1; ++p) {
                PathRng rng(cfg.seed, static_cast<std::uint64_t>(p));
                PathOutcome o = run_path(inside, dim, x0, cfg.dt, cfg.horizon, lap_u, rng);
                double ex = o.absorbed ? 1.0 : 0.0;
                double term = 0.0;
                if (o.absorbed && u_boundary) term = (*u_boundary)(o.end);
                if (!o.absorbed && eval_u) term = (*eval_u)(o.end);
                double est = term - o.occupation;
                a.exit += ex;
                a.exit2 += ex * ex;
                a.term += term;
                a.term2 += term * term;
                a.occ += o.occupation;
                a.occ2 += o.occupation * o.occupation;
                a.est += est;
                a.est2 += est * est;
                if (hist && o.absorbed) {
                    auto& hc = hists[s];
                    double f = o.exit_time / hist->t_max;
                    auto bin = static_cast<std::int64_t>(f * double(hc.size()));
                    if (bin >= 0 && bin < static_cast<std::int64_t>(hc.size())) ++hc[bin];
                }
            }
        }
    });

    PathAccum tot;  // reduce in substream order: result independent of threading
    for (const auto& a : acc) {
        tot.exit += a.exit;
        tot.exit2 += a.exit2;
        tot.term += a.term;
        tot.term2 += a.term2;
        tot.occ += a.occ;
        tot.occ2 += a.occ2;
        tot.est += a.est;
        tot.est2 += a.est2;
    }
    if (hist)
        for (const auto& hc : hists)
            for (std::size_t b = 0; b < hc.size(); ++b) hist->counts[b] += hc[b];

    const double N = static_cast<double>(cfg.n_paths);
    auto finish = [N](double sum, double sum2, double& mean, double& se) {
        mean = sum / N;
        double var = N > 1 ? std::max(0.0, (sum2 - sum * sum / N) / (N - 1)) : 0.0;
        se = std::sqrt(var / N);
    };
    PathStats st;
    st.n_paths = cfg.n_paths;
    finish(tot.exit, tot.exit2, st.exit_fraction, st.exit_fraction_stderr);
    finish(tot.term, tot.term2, st.mean_terminal_u, st.terminal_stderr);
    finish(tot.occ, tot.occ2, st.mean_occupation_integral, st.occupation_stderr);
    finish(tot.est, tot.est2, st.estimate, st.estimate_stderr);
    return st;
}

inline auto shape_inside(const Shape& s) {
    return [&s](Vec p) { return s.contains(p); };
}

}  // namespace detail

/// Feynman-Kac sampler on an analytic shape: sticky Brownian paths from x0,
/// occupation integral of lap_u by the left-endpoint rule, terminal value
/// u_boundary at the bisected exit point (eval_u, if given, values paths
/// still alive at the horizon).
inline PathStats simulate(const Shape& shape, Vec x0, const std::function<double(Vec)>& u_boundary,
                          const std::function<double(Vec)>& lap_u, const McConfig& cfg,
                          const std::function<double(Vec)>& eval_u = {}) {
    return detail::run_ensemble(detail::shape_inside(shape), shape.dim(), x0, cfg, &lap_u,
                                &u_boundary, eval_u ? &eval_u : nullptr, nullptr);
}

/// Same walk driven by the grid mask of a domain (cells of the nearest
/// lattice point decide membership).
inline PathStats simulate(const GridDomain& dom, Vec x0,
                          const std::function<double(Vec)>& u_boundary,
                          const std::function<double(Vec)>& lap_u, const McConfig& cfg,
                          const std::function<double(Vec)>& eval_u = {}) {
    Vec o = dom.cell_center({0, 0, 0});
    double h = dom.spacing();
    auto inside = [&dom, o, h](Vec p) {
        GridIndex gi{static_cast<int>(std::lround((p.x - o.x) / h)),
                     static_cast<int>(std::lround((p.y - o.y) / h)),
                     dom.dim() == 3 ? static_cast<int>(std::lround((p.z - o.z) / h)) : 0};
        return dom.cell_class(gi) == CellClass::interior;
    };
    return detail::run_ensemble(inside, dom.dim(), x0, cfg, &lap_u, &u_boundary,
                                eval_u ? &eval_u : nullptr, nullptr);
}

/// P(exists s <= t: path leaves the shape), by discrete monitoring with
/// bisection-refined crossing times. `hist`, if given, receives the refined
/// exit times binned over [0, hist->t_max).
inline McEstimate exit_probability(const Shape& shape, Vec x0, double t, McConfig cfg,
                                   ExitHistogram* hist = nullptr) {
    cfg.horizon = t;
    PathStats st =
        detail::run_ensemble(detail::shape_inside(shape), shape.dim(), x0, cfg, nullptr,
                             nullptr, nullptr, hist);
    return {st.exit_fraction, st.exit_fraction_stderr};
}

enum class TerminalMode { mc, exact_ball };

/// P(free Brownian position at time t lies outside the shape). mc mode draws
/// the terminal Gaussian directly (exact in distribution, no path error);
/// exact_ball gives the closed form exp(-R^2/(4t)) and requires a disk
/// centered at x0.
inline McEstimate free_terminal_exterior_probability(const Shape& shape, Vec x0, double t,
                                                     TerminalMode mode, const McConfig& cfg = {}) {
    if (!(t > 0)) throw std::invalid_argument("free_terminal: t must be > 0");
    if (mode == TerminalMode::exact_ball) {
        if (shape.kind() != Shape::Kind::disk)
            throw std::invalid_argument("free_terminal: exact_ball requires a disk");
        Vec c = shape.representative_interior_point();
        if (dist(c, x0) > 1e-12 * shape.diameter())
            throw std::invalid_argument("free_terminal: exact_ball requires x0 at the disk center");
        double R = shape.diameter() / 2;
        return {std::exp(-R * R / (4.0 * t)), 0.0};
    }
    if (!shape.contains(x0)) throw std::invalid_argument("free_terminal: x0 not inside shape");
    if (cfg.n_paths <= 0) throw std::invalid_argument("free_terminal: n_paths must be > 0");
    const int dim = shape.dim();
    const double sigma = std::sqrt(2.0 * t);
    const std::int64_t width = std::max<std::int64_t>(1, cfg.substream_width);
    const std::int64_t n_sub = (cfg.n_paths + width - 1) / width;
    std::vector<double> outside(n_sub, 0.0);
    parallel_for(static_cast<std::size_t>(n_sub), [&](std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) {
            const std::int64_t p0 = static_cast<std::int64_t>(s) * width;
            const std::int64_t p1 = std::min(cfg.n_paths, p0 + width);
            double cnt = 0;
            for (std::int64_t p = p0; p < p1; ++p) {
                PathRng rng(cfg.seed, static_cast<std::uint64_t>(p));
                Vec z{sigma * rng.normal(), sigma * rng.normal(),
                      dim == 3 ? sigma * rng.normal() : 0.0};
                if (!shape.contains(x0 + z)) cnt += 1.0;
            }
            outside[s] = cnt;
        }
    });
    double k = 0;
    for (double c : outside) k += c;
    const double N = static_cast<double>(cfg.n_paths);
    double p = k / N;
    double var = N > 1 ? std::max(0.0, (k - k * k / N) / (N - 1)) : 0.0;  // 0/1 samples
    return {p, std::sqrt(var / N)};
}

/// Exit probability by time c_geo * inrad(shape)^2, the inradius time scale.
/// cfg.dt == 0 selects the default step 1e-4 * inrad^2.
inline McEstimate inradius_exit_check(const Shape& shape, Vec x0, double c_geo, McConfig cfg,
                                      ExitHistogram* hist = nullptr) {
    if (!shape.simply_connected())
        throw std::invalid_argument("inradius_exit_check: shape must be simply connected");
    if (!(c_geo > 0)) throw std::invalid_argument("inradius_exit_check: c_geo must be > 0");
    const double rho = shape.inradius();
    if (cfg.dt == 0) cfg.dt = 1e-4 * rho * rho;
    return exit_probability(shape, x0, c_geo * rho * rho, cfg, hist);
}

}  // namespace abp
