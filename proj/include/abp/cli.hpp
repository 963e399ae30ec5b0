// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abp/elliptic.hpp"
#include "abp/io.hpp"
#include "abp/stochastic.hpp"
#include "abp/verify.hpp"

namespace abp::cli {

using nlohmann::json;

/// Exit codes: 0 = all asserted inequalities/tolerances passed,
/// 1 = an assertion failed, 2 = configuration error.
enum Status { kOk = 0, kAssertionFailed = 1, kConfigError = 2 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Shape shape_by_name(const std::string& name) {
    if (name == "disk") return Shape::disk({0, 0, 0}, 1.0);
    if (name == "square") return Shape::rectangle({0, 0, 0}, {1, 1, 0});
    if (name == "annulus") return Shape::annulus({0, 0, 0}, 0.5, 1.0);
    if (name == "l_shape") return Shape::l_shape({0, 0, 0}, 1.0);
    if (name == "thin_rect") return Shape::rectangle({0, 0, 0}, {10, 0.5, 0});
    if (name == "ball3d") return Shape::ball3d({0, 0, 0}, 1.0);
    if (name == "box3d") return Shape::box3d({0, 0, 0}, {1, 1, 1});
    throw ConfigError("unknown domain '" + name +
                      "' (use disk|square|annulus|l_shape|thin_rect|ball3d|box3d)");
}

inline Shape shape_from_cfg(const json& d) {
    try {
        if (d.is_string()) return shape_by_name(d.get<std::string>());
        if (d.is_object()) return Shape::from_json(d);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad domain descriptor: ") + e.what());
    }
    throw ConfigError("domain must be a shape name or a shape JSON object");
}

inline TestFunction function_from_cfg(const std::string& name, const Shape& shape, double eps) {
    const int n = shape.dim();
    const Vec c = shape.representative_interior_point();
    const double rin = shape.inradius();
    if (name == "constant") return testfn::constant(1.0);
    if (name == "quadratic") return testfn::quadratic_bump(c, shape.diameter() / 2, n);
    if (name == "harmonic") return testfn::harmonic_poly();
    if (name == "bump") return testfn::smooth_bump(c + Vec{0.3 * rin, 0, 0}, 0.6 * rin, 1.0, n);
    if (name == "harmonic_bump") return testfn::harmonic_plus_bump(c, 0.6 * rin, 1.0, n);
    if (name == "concentrated_bump") return testfn::smooth_bump(c, 0.3 * rin, 1.0, n);
    if (name == "sinsin") return testfn::sin_product();
    if (name == "u_eps") {
        if (!(eps > 0 && eps < 1)) throw ConfigError("u_eps requires eps in (0,1)");
        return sharpness_family(eps);
    }
    throw ConfigError("unknown function '" + name +
                      "' (use constant|quadratic|harmonic|bump|harmonic_bump|"
                      "concentrated_bump|sinsin|u_eps)");
}

inline Vec parse_point(const std::string& s) {
    Vec v;
    double* slot[3] = {&v.x, &v.y, &v.z};
    std::stringstream ss(s);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i >= 3) throw ConfigError("point '" + s + "' has more than 3 coordinates");
        *slot[i++] = std::stod(item);
    }
    if (i < 2) throw ConfigError("point '" + s + "' needs at least 2 coordinates");
    return v;
}

inline std::filesystem::path prepare_out_dir(const json& cfg) {
    std::filesystem::path out = cfg.at("out").get<std::string>();
    std::filesystem::create_directories(out);
    return out;
}

inline void write_manifest(const std::filesystem::path& out, const json& cfg) {
    write_text_file(out / "manifest.json", cfg.dump(2) + "\n");
}

inline McConfig mc_config(const json& cfg, double horizon) {
    McConfig mc;
    mc.seed = cfg.at("seed").get<std::uint64_t>();
    mc.n_paths = cfg.at("paths").get<std::int64_t>();
    mc.dt = cfg.at("dt").get<double>();
    mc.horizon = horizon;
    if (cfg.contains("substream_width"))
        mc.substream_width = cfg.at("substream_width").get<std::int64_t>();
    return mc;
}

inline bool is_centered_disk(const Shape& s, Vec x0) {
    return s.kind() == Shape::Kind::disk &&
           dist(s.representative_interior_point(), x0) <= 1e-12 * s.diameter();
}

// ------------------------------------------------------------------ verify
inline int exec_verify(const json& cfg) {
    const std::string theorem = cfg.at("theorem").get<std::string>();
    Shape shape = shape_from_cfg(cfg.at("domain"));
    const double h = cfg.at("h").get<double>();
    TestFunction f = function_from_cfg(cfg.at("function").get<std::string>(), shape,
                                       cfg.value("eps", 0.0));
    VerifyOptions vopt;
    vopt.top_k = cfg.value("top_k", 0);

    if (theorem == "thm1" && shape.dim() != 2 + 1)
        throw ConfigError("thm1 requires a 3D domain (ball3d or box3d)");
    if ((theorem == "thm2" || theorem == "corollary") && shape.dim() != 2)
        throw ConfigError(theorem + " requires a planar domain");

    InequalityReport rep;
    try {
        auto dom = build_domain(shape, h);
        if (theorem == "classical") rep = verify_classical(dom, f, cfg.value("s", 2.0));
        else if (theorem == "thm1") rep = verify_theorem1(dom, f, vopt);
        else if (theorem == "thm2") rep = verify_theorem2(dom, f, vopt);
        else if (theorem == "corollary") rep = verify_corollary(dom, f, vopt);
        else throw ConfigError("unknown theorem '" + theorem + "'");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    auto out = prepare_out_dir(cfg);
    write_manifest(out, cfg);
    write_text_file(out / "report.json", rep.to_json().dump(2) + "\n");
    write_csv_file(out / "report.csv", [&](std::ostream& os) { write_reports_csv({rep}, os); });

    const bool flagged = rep.lhs_interior_sup - rep.boundary_sup > 1e3 * rep.functional_value;
    std::printf("%-10s %-10s %-18s h=%-10g\n", rep.theorem_tag.c_str(),
                rep.domain_descriptor.at("shape").get<std::string>().c_str(), f.name.c_str(), h);
    std::printf("  lhs_interior_sup = %-12g boundary_sup = %-12g\n", rep.lhs_interior_sup,
                rep.boundary_sup);
    std::printf("  functional       = %-12g implied_constant = %g\n", rep.functional_value,
                rep.implied_constant);
    if (std::isfinite(rep.riesz_at_argmax))
        std::printf("  riesz_at_argmax  = %-12g lhs/riesz = %-10g riesz/lorentz = %g\n",
                    rep.riesz_at_argmax, rep.lhs_over_riesz, rep.riesz_over_lorentz);
    if (std::isfinite(rep.theorem2_functional))
        std::printf("  theorem2_functional = %-9g pointwise_le = %s\n", rep.theorem2_functional,
                    rep.kernel_pointwise_le ? "yes" : "no");
    std::printf("  status: %s\n", flagged ? "FLAGGED (lhs - boundary > 1e3 * functional)" : "ok");
    return flagged ? kAssertionFailed : kOk;
}

// ------------------------------------------------------------------ sweep
inline int exec_sweep(const json& cfg) {
    std::vector<SweepEntry> suite;
    std::string version;
    if (cfg.contains("entries")) {
        version = "custom";
        for (const auto& e : cfg.at("entries")) {
            Shape shape = shape_from_cfg(e.at("domain"));
            SweepEntry se{shape, e.at("h").get<double>(),
                          function_from_cfg(e.at("function").get<std::string>(), shape,
                                            e.value("eps", 0.0)),
                          e.at("theorem").get<std::string>(), e.value("s", 2.0)};
            suite.push_back(std::move(se));
        }
        if (suite.empty()) throw ConfigError("sweep: empty entries list");
    } else {
        version = default_suite_version();
        suite = default_suite();
    }
    VerifyOptions vopt;
    vopt.top_k = cfg.value("top_k", 0);
    SweepResult res = constant_sweep(suite, vopt, version);

    auto out = prepare_out_dir(cfg);
    write_manifest(out, cfg);
    json jr;
    jr["manifest"] = suite_manifest(suite, version);
    jr["manifest_hash"] = res.manifest_hash;
    jr["max_constant"] = res.max_constant;
    jr["rows"] = json::array();
    std::vector<InequalityReport> reports;
    int n_err = 0, n_flagged = 0;
    for (const auto& row : res.rows) {
        json r;
        if (row.ok) {
            r = row.report.to_json();
            r["manifest_hash"] = res.manifest_hash;
            r["flagged"] = row.flagged;
            reports.push_back(row.report);
            n_flagged += row.flagged;
        } else {
            r["error"] = row.error;
            ++n_err;
        }
        jr["rows"].push_back(std::move(r));
    }
    write_text_file(out / "sweep.json", jr.dump(2) + "\n");
    write_csv_file(out / "sweep.csv", [&](std::ostream& os) { write_reports_csv(reports, os); });

    std::printf("sweep '%s' (%zu rows, hash %s)\n", version.c_str(), suite.size(),
                res.manifest_hash.c_str());
    for (const auto& [tag, c] : res.max_constant)
        std::printf("  max implied constant [%-9s] = %g\n", tag.c_str(), c);
    std::printf("  rows: %zu ok, %d errors, %d flagged\n", suite.size() - n_err, n_err, n_flagged);
    return (n_err || n_flagged) ? kAssertionFailed : kOk;
}

// ------------------------------------------------------------------ sharpness
inline int exec_sharpness(const json& cfg) {
    const double h = cfg.at("h").get<double>();
    std::vector<double> eps_list = cfg.at("eps_list").get<std::vector<double>>();
    if (eps_list.empty()) throw ConfigError("sharpness: empty eps list");
    for (double e : eps_list)
        if (!(e > 0 && e < 1)) throw ConfigError("sharpness: eps must lie in (0,1)");

    auto dom = build_domain(Shape::disk({0, 0, 0}, 1.0), h);
    std::vector<SharpnessRecord> recs;
    for (double e : eps_list) recs.push_back(sharpness_record(dom, e));

    bool increasing = true, in_band = true;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (i && recs[i].epsilon < recs[i - 1].epsilon && recs[i].ratio_l1 <= recs[i - 1].ratio_l1)
            increasing = false;
        if (recs[i].ratio_kernel < 0.05 || recs[i].ratio_kernel > 0.12) in_band = false;
    }

    auto out = prepare_out_dir(cfg);
    write_manifest(out, cfg);
    write_csv_file(out / "sharpness.csv",
                   [&](std::ostream& os) { write_sharpness_csv(recs, os); });
    json jr;
    jr["h"] = h;
    jr["records"] = json::array();
    std::printf("%-8s %-10s %-10s %-12s %-10s %-12s %s\n", "eps", "sup_u", "l1_lap", "log_kernel",
                "ratio_l1", "ratio_kernel", "closed_form");
    for (const auto& r : recs) {
        double cf = sharpness_kernel_closed_form(r.epsilon, dom->measure());
        jr["records"].push_back({{"epsilon", r.epsilon},
                                 {"sup_u", r.sup_u},
                                 {"l1_lap", r.l1_lap},
                                 {"log_kernel", r.log_kernel},
                                 {"ratio_l1", r.ratio_l1},
                                 {"ratio_kernel", r.ratio_kernel},
                                 {"kernel_closed_form", cf}});
        std::printf("%-8g %-10.6g %-10.6g %-12.6g %-10.6g %-12.6g %.6g\n", r.epsilon, r.sup_u,
                    r.l1_lap, r.log_kernel, r.ratio_l1, r.ratio_kernel, cf);
    }
    jr["ratio_l1_strictly_increasing"] = increasing;
    jr["ratio_kernel_in_band"] = in_band;
    write_text_file(out / "sharpness.json", jr.dump(2) + "\n");
    std::printf("  ratio_l1 strictly increasing: %s; ratio_kernel in [0.05, 0.12]: %s\n",
                increasing ? "yes" : "NO", in_band ? "yes" : "NO");
    return (increasing && in_band) ? kOk : kAssertionFailed;
}

// ------------------------------------------------------------------ lemma
inline int exec_lemma(const json& cfg) {
    const double c1 = cfg.value("c1", 1.0), c2 = cfg.value("c2", 1.0);
    if (!(c1 > 0 && c2 > 0)) throw ConfigError("lemma: c1, c2 must be > 0");
    std::vector<double> base;
    for (int k = -4; k <= 4; ++k)
        for (double m : {1.0, 2.0, 5.0}) base.push_back(m * std::pow(10.0, k));
    std::sort(base.begin(), base.end());
    auto eval_grid = [&](const std::vector<double>& grid) {
        std::vector<LemmaBound> rows;
        for (double a : grid) rows.push_back(lemma_bound_check(1.0, std::sqrt(a * c2), c1, c2));
        return rows;
    };
    std::vector<LemmaBound> rows = eval_grid(base);
    // 10x refinement: log-uniform over the same range, endpoints included
    std::vector<double> fine;
    const int n_fine = static_cast<int>(base.size()) * 10;
    const double la = std::log(base.front()), lb = std::log(base.back());
    for (int i = 0; i < n_fine; ++i)
        fine.push_back(std::exp(la + (lb - la) * i / double(n_fine - 1)));
    std::vector<LemmaBound> fine_rows = eval_grid(fine);

    auto cemp = [](const std::vector<LemmaBound>& rs) {
        double c = 0;
        for (const auto& r : rs) c = std::max(c, r.ratio);
        return c;
    };
    const double c_base = cemp(rows), c_fine = cemp(fine_rows);
    const bool bounded = c_base <= 2.0;
    const bool stable = std::abs(c_fine - c_base) <= 0.01 * c_base;

    auto out = prepare_out_dir(cfg);
    write_manifest(out, cfg);
    write_csv_file(out / "lemma.csv", [&](std::ostream& os) { write_lemma_csv(rows, os); });
    write_csv_file(out / "lemma_refined.csv",
                   [&](std::ostream& os) { write_lemma_csv(fine_rows, os); });
    json jr{{"c1", c1},          {"c2", c2},           {"C_emp", c_base},
            {"C_emp_refined", c_fine}, {"bounded_by_2", bounded}, {"stable_1pct", stable}};
    write_text_file(out / "lemma.json", jr.dump(2) + "\n");

    std::printf("lemma sweep: a in [%g, %g], %zu points\n", base.front(), base.back(),
                base.size());
    std::printf("  C_emp = %.6f (refined %.6f); bounded by 2: %s; stable +-1%%: %s\n", c_base,
                c_fine, bounded ? "yes" : "NO", stable ? "yes" : "NO");
    return (bounded && stable) ? kOk : kAssertionFailed;
}

// ------------------------------------------------------------------ exitprob
inline int exec_exitprob(const json& cfg) {
    Shape shape = shape_from_cfg(cfg.at("domain"));
    Vec x0 = cfg.contains("x0") ? parse_point(cfg.at("x0").get<std::string>())
                                : shape.representative_interior_point();
    if (!shape.contains(x0)) throw ConfigError("exitprob: x0 is not inside the shape");
    const std::string mode = cfg.at("mode").get<std::string>();
    const double c_geo = cfg.value("c_geo", 4.0);
    const double rho = shape.inradius();

    double t;
    bool t_is_omega8 = false;
    if (mode == "inradius") {
        t = c_geo * rho * rho;
    } else {
        const auto& jt = cfg.at("t");
        if (jt.is_string()) {
            if (jt.get<std::string>() != "omega-over-8")
                throw ConfigError("exitprob: t must be a number or 'omega-over-8'");
            t = shape.measure() / 8.0;
            t_is_omega8 = true;
        } else {
            t = jt.get<double>();
            t_is_omega8 = std::abs(t - shape.measure() / 8.0) <= 1e-12 * t;
        }
        if (!(t > 0)) throw ConfigError("exitprob: t must be > 0");
    }

    json jr{{"mode", mode}, {"t", t}, {"shape", shape.to_json()}, {"x0", {x0.x, x0.y, x0.z}}};
    const double hl_bound = std::exp(-2.0 / kPi);
    bool pass = true;
    auto out = prepare_out_dir(cfg);
    write_manifest(out, cfg);

    if (mode == "free") {
        McConfig mc = mc_config(cfg, t);  // horizon unused by the single jump
        McEstimate est = free_terminal_exterior_probability(shape, x0, t, TerminalMode::mc, mc);
        jr["estimate"] = est.value;
        jr["stderr"] = est.stderr;
        std::printf("free terminal exterior probability: %.6f +- %.6f (t = %g)\n", est.value,
                    est.stderr, t);
        if (is_centered_disk(shape, x0)) {
            McEstimate exact =
                free_terminal_exterior_probability(shape, x0, t, TerminalMode::exact_ball);
            jr["exact_ball"] = exact.value;
            pass = std::abs(est.value - exact.value) <= 3 * est.stderr;
            std::printf("  exact_ball = %.9f; |mc - exact| = %.6f (3 stderr = %.6f): %s\n",
                        exact.value, std::abs(est.value - exact.value), 3 * est.stderr,
                        pass ? "ok" : "FAIL");
        } else if (t_is_omega8) {
            // ball minimizes the exterior mass among equal-measure shapes
            pass = est.value >= hl_bound - 3 * est.stderr;
            jr["rearrangement_lower_bound"] = hl_bound;
            std::printf("  lower bound e^(-2/pi) = %.6f: %s\n", hl_bound, pass ? "ok" : "FAIL");
        }
    } else if (mode == "path" || mode == "inradius") {
        McConfig mc = mc_config(cfg, t);
        if (mc.dt <= 0) mc.dt = 1e-4 * rho * rho;
        ExitHistogram hist;
        hist.t_max = t;
        hist.counts.assign(cfg.value("bins", 50), 0);
        McEstimate est;
        if (mode == "inradius") {
            est = inradius_exit_check(shape, x0, c_geo, mc, &hist);
            jr["c_geo"] = c_geo;
            pass = est.value - 3 * est.stderr >= 0.01;
        } else {
            est = exit_probability(shape, x0, t, mc, &hist);
            if (t_is_omega8) pass = est.value - 3 * est.stderr >= 0.5;
        }
        jr["estimate"] = est.value;
        jr["stderr"] = est.stderr;
        jr["dt"] = mc.dt;
        write_csv_file(out / "exit_histogram.csv",
                       [&](std::ostream& os) { write_histogram_csv(hist, os); });
        std::printf("%s exit probability: %.6f +- %.6f (t = %g, dt = %g)\n", mode.c_str(),
                    est.value, est.stderr, t, mc.dt);
        if (mode == "inradius")
            std::printf("  threshold 1/100 with 3-stderr margin: %s\n", pass ? "ok" : "FAIL");
        else if (t_is_omega8)
            std::printf("  threshold 1/2 with 3-stderr margin: %s\n", pass ? "ok" : "FAIL");
    } else {
        throw ConfigError("exitprob: mode must be free|path|inradius");
    }
    jr["pass"] = pass;
    write_text_file(out / "exitprob.json", jr.dump(2) + "\n");
    return pass ? kOk : kAssertionFailed;
}

// ------------------------------------------------------------------ feynman-kac
inline int exec_feynman_kac(const json& cfg) {
    Shape shape = shape_from_cfg(cfg.at("domain"));
    Vec x0 = cfg.contains("x0") ? parse_point(cfg.at("x0").get<std::string>())
                                : shape.representative_interior_point();
    if (!shape.contains(x0)) throw ConfigError("feynman-kac: x0 is not inside the shape");
    TestFunction f = function_from_cfg(cfg.at("function").get<std::string>(), shape,
                                       cfg.value("eps", 0.0));
    double t = cfg.contains("t") ? cfg.at("t").get<double>() : shape.measure();
    McConfig mc = mc_config(cfg, t);
    if (mc.dt <= 0) mc.dt = 1e-4 * shape.inradius() * shape.inradius();

    PathStats st = simulate(shape, x0, f.u, f.lap_u, mc, f.u);
    const double truth = f.u(x0);
    // allowance for the O(sqrt(dt)) discrete-exit bias of endpoint monitoring
    const double allowance = 2.0 * std::sqrt(mc.dt);
    const bool pass = std::abs(st.estimate - truth) <= 3 * st.estimate_stderr + allowance;

    auto out = prepare_out_dir(cfg);
    write_manifest(out, cfg);
    json jr{{"shape", shape.to_json()},
            {"function", {{"name", f.name}, {"params", f.params}}},
            {"x0", {x0.x, x0.y, x0.z}},
            {"t", t},
            {"dt", mc.dt},
            {"paths", mc.n_paths},
            {"estimate", st.estimate},
            {"estimate_stderr", st.estimate_stderr},
            {"mean_terminal_u", st.mean_terminal_u},
            {"terminal_stderr", st.terminal_stderr},
            {"mean_occupation_integral", st.mean_occupation_integral},
            {"occupation_stderr", st.occupation_stderr},
            {"exit_fraction", st.exit_fraction},
            {"closed_form", truth},
            {"bias_allowance", allowance},
            {"pass", pass}};
    write_text_file(out / "feynman_kac.json", jr.dump(2) + "\n");
    std::printf("feynman-kac on %s, %s, t = %g, dt = %g, %lld paths\n", shape.tag().c_str(),
                f.name.c_str(), t, mc.dt, static_cast<long long>(mc.n_paths));
    std::printf("  estimate = %.6f +- %.6f, closed form = %.6f, exit fraction = %.4f\n",
                st.estimate, st.estimate_stderr, truth, st.exit_fraction);
    std::printf("  |err| = %.6f vs 3 stderr + %.6f allowance: %s\n",
                std::abs(st.estimate - truth), allowance, pass ? "ok" : "FAIL");
    return pass ? kOk : kAssertionFailed;
}

// ------------------------------------------------------------------ solve
inline int exec_solve(const json& cfg) {
    Shape shape = shape_from_cfg(cfg.at("domain"));
    if (shape.dim() != 2 && shape.dim() != 3) throw ConfigError("solve: bad domain");
    const double h = cfg.at("h").get<double>();
    TestFunction f = function_from_cfg(cfg.at("function").get<std::string>(), shape,
                                       cfg.value("eps", 0.0));
    auto dom = build_domain(shape, h);
    SampledFunction sf = sample(dom, f);
    std::vector<double> rhs(dom->n_interior());
    for (std::size_t c = 0; c < rhs.size(); ++c) rhs[c] = -sf.lap.interior_values()[c];

    auto out = prepare_out_dir(cfg);
    write_manifest(out, cfg);
    try {
        auto [u, diag] = solve_dirichlet(dom, rhs, sf.u.boundary_values());
        double err = 0;
        for (std::size_t c = 0; c < u.interior_values().size(); ++c)
            err = std::max(err,
                           std::abs(u.interior_values()[c] - sf.u.interior_values()[c]));
        write_csv_file(out / "solution.csv", [&](std::ostream& os) { write_field_csv(u, os); });
        json jr{{"shape", shape.to_json()},
                {"function", f.name},
                {"h", h},
                {"scheme", diag.scheme},
                {"sweeps", diag.sweeps},
                {"residual_inf", diag.residual_inf},
                {"tolerance", diag.tolerance},
                {"max_error_vs_closed_form", err}};
        write_text_file(out / "solve.json", jr.dump(2) + "\n");
        std::printf("solve -lap u = f on %s, h = %g: %s, %d sweeps, residual %.3g (tol %.3g)\n",
                    shape.tag().c_str(), h, diag.scheme.c_str(), diag.sweeps, diag.residual_inf,
                    diag.tolerance);
        std::printf("  max |u_h - u| = %.6g\n", err);
        return kOk;
    } catch (const NonConvergence& e) {
        json jr{{"error", e.what()},
                {"sweeps", e.diagnostics.sweeps},
                {"residual_inf", e.diagnostics.residual_inf},
                {"tolerance", e.diagnostics.tolerance}};
        write_text_file(out / "solve.json", jr.dump(2) + "\n");
        std::fprintf(stderr, "solve: %s\n", e.what());
        return kAssertionFailed;
    }
}

}  // namespace detail

/// Build the resolved config for a subcommand: defaults, then the --config
/// file, then explicit flags.
inline int run(const std::vector<std::string>& args) {
    CLI::App app{"abplab: numerical laboratory for endpoint maximum-principle estimates"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // frees -h; --h is the grid spacing
    app.footer("Environment: ABP_LAB_WORKERS caps the number of parallel workers.");

    struct Common {
        std::string config, out = "out", x0;
        double h = 0, dt = -1, s = 2.0, eps = 0.01, c1 = 1.0, c2 = 1.0, c_geo = 4.0, t = -1;
        std::uint64_t seed = 1;
        std::int64_t paths = 0;
        int top_k = 0, bins = 50;
        std::string theorem, domain, function, mode, t_str, eps_list;
    } o;

    auto add_common = [&o](CLI::App* c) {
        c->set_help_flag("--help", "print help");
        c->add_option("--config", o.config, "JSON config file; flags override its fields");
        c->add_option("--out", o.out, "output directory");
        c->add_option("--seed", o.seed, "RNG seed");
        c->add_option("--h", o.h, "grid spacing");
    };

    auto* verify = app.add_subcommand("verify", "verify one inequality on one test case");
    add_common(verify);
    verify->add_option("--theorem", o.theorem, "classical|thm1|thm2|corollary");
    verify->add_option("--domain", o.domain, "shape name");
    verify->add_option("--function", o.function, "test function name");
    verify->add_option("--eps", o.eps, "epsilon for u_eps");
    verify->add_option("--s", o.s, "L^s exponent for classical");
    verify->add_option("--top-k", o.top_k, "restrict kernel evaluation points");

    auto* sweep = app.add_subcommand("sweep", "run the suite of verifiers, report constants");
    add_common(sweep);
    sweep->add_option("--top-k", o.top_k, "restrict kernel evaluation points");

    auto* sharp = app.add_subcommand("sharpness", "sharpness family sweep on the unit disk");
    add_common(sharp);
    sharp->add_option("--eps-list", o.eps_list, "comma-separated epsilons");

    auto* lemma = app.add_subcommand("lemma", "technical lemma ratio sweep");
    add_common(lemma);
    lemma->add_option("--c1", o.c1, "lemma constant c1");
    lemma->add_option("--c2", o.c2, "lemma constant c2");

    auto* exitp = app.add_subcommand("exitprob", "exit/exterior probability estimates");
    add_common(exitp);
    exitp->add_option("--shape", o.domain, "shape name");
    exitp->add_option("--x0", o.x0, "start point 'x,y[,z]'");
    exitp->add_option("--t", o.t_str, "time, or 'omega-over-8'");
    exitp->add_option("--mode", o.mode, "free|path|inradius");
    exitp->add_option("--paths", o.paths, "number of paths");
    exitp->add_option("--dt", o.dt, "time step (path modes)");
    exitp->add_option("--c-geo", o.c_geo, "inradius-time multiple");
    exitp->add_option("--bins", o.bins, "exit-time histogram bins");

    auto* fk = app.add_subcommand("feynman-kac", "path estimate of u(x0) vs closed form");
    add_common(fk);
    fk->add_option("--shape", o.domain, "shape name");
    fk->add_option("--function", o.function, "test function name");
    fk->add_option("--eps", o.eps, "epsilon for u_eps");
    fk->add_option("--x0", o.x0, "start point 'x,y[,z]'");
    fk->add_option("--t", o.t, "horizon (default measure of the shape)");
    fk->add_option("--paths", o.paths, "number of paths");
    fk->add_option("--dt", o.dt, "time step");

    auto* solve = app.add_subcommand("solve", "Dirichlet Poisson solve vs closed form");
    add_common(solve);
    solve->add_option("--domain", o.domain, "shape name");
    solve->add_option("--function", o.function, "test function name");
    solve->add_option("--eps", o.eps, "epsilon for u_eps");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        json cfg;
        if (!o.config.empty()) {
            std::ifstream is(o.config);
            if (!is) throw ConfigError("cannot read config file '" + o.config + "'");
            try {
                cfg = json::parse(is);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("config parse error: ") + e.what());
            }
            if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
        }
        auto set_if = [&cfg](CLI::App* c, const std::string& flag, const char* key, auto value) {
            if (c->count(flag) || !cfg.contains(key)) cfg[key] = value;
        };
        CLI::App* sub = app.get_subcommands().front();
        const std::string cmd = sub->get_name();
        cfg["command"] = cmd;
        set_if(sub, "--out", "out", o.out);
        set_if(sub, "--seed", "seed", o.seed);

        if (cmd == "verify") {
            set_if(sub, "--theorem", "theorem", o.theorem);
            set_if(sub, "--domain", "domain", o.domain.empty() ? "disk" : o.domain);
            set_if(sub, "--function", "function", o.function.empty() ? "quadratic" : o.function);
            set_if(sub, "--eps", "eps", o.eps);
            set_if(sub, "--s", "s", o.s);
            set_if(sub, "--top-k", "top_k", o.top_k);
            if (!cfg.contains("theorem")) throw ConfigError("verify: --theorem is required");
            Shape shape = detail::shape_from_cfg(cfg.at("domain"));
            set_if(sub, "--h", "h", o.h > 0 ? o.h : (shape.dim() == 3 ? 1.0 / 32 : 1.0 / 128));
            return detail::exec_verify(cfg);
        }
        if (cmd == "sweep") {
            set_if(sub, "--top-k", "top_k", o.top_k);
            return detail::exec_sweep(cfg);
        }
        if (cmd == "sharpness") {
            set_if(sub, "--h", "h", o.h > 0 ? o.h : 1.0 / 256);
            if (sub->count("--eps-list") || !cfg.contains("eps_list")) {
                std::vector<double> eps;
                if (o.eps_list.empty()) eps = {0.2, 0.1, 0.05, 0.02, 0.01};
                else {
                    std::stringstream ss(o.eps_list);
                    std::string item;
                    while (std::getline(ss, item, ',')) eps.push_back(std::stod(item));
                }
                cfg["eps_list"] = eps;
            }
            return detail::exec_sharpness(cfg);
        }
        if (cmd == "lemma") {
            set_if(sub, "--c1", "c1", o.c1);
            set_if(sub, "--c2", "c2", o.c2);
            return detail::exec_lemma(cfg);
        }
        if (cmd == "exitprob") {
            set_if(sub, "--shape", "domain", o.domain.empty() ? "disk" : o.domain);
            set_if(sub, "--mode", "mode", o.mode.empty() ? "free" : o.mode);
            set_if(sub, "--paths", "paths", o.paths > 0 ? o.paths : 1000000);
            set_if(sub, "--dt", "dt", o.dt);
            set_if(sub, "--bins", "bins", o.bins);
            set_if(sub, "--c-geo", "c_geo", o.c_geo);
            if (sub->count("--x0")) cfg["x0"] = o.x0;
            if (sub->count("--t") || !cfg.contains("t")) {
                if (o.t_str.empty() || o.t_str == "omega-over-8") cfg["t"] = "omega-over-8";
                else cfg["t"] = std::stod(o.t_str);
            }
            return detail::exec_exitprob(cfg);
        }
        if (cmd == "feynman-kac") {
            set_if(sub, "--shape", "domain", o.domain.empty() ? "disk" : o.domain);
            set_if(sub, "--function", "function", o.function.empty() ? "quadratic" : o.function);
            set_if(sub, "--eps", "eps", o.eps);
            set_if(sub, "--paths", "paths", o.paths > 0 ? o.paths : 100000);
            set_if(sub, "--dt", "dt", o.dt);
            if (sub->count("--x0")) cfg["x0"] = o.x0;
            if (sub->count("--t")) cfg["t"] = o.t;
            return detail::exec_feynman_kac(cfg);
        }
        if (cmd == "solve") {
            set_if(sub, "--domain", "domain", o.domain.empty() ? "square" : o.domain);
            set_if(sub, "--function", "function", o.function.empty() ? "sinsin" : o.function);
            set_if(sub, "--eps", "eps", o.eps);
            set_if(sub, "--h", "h", o.h > 0 ? o.h : 1.0 / 64);
            return detail::exec_solve(cfg);
        }
        throw ConfigError("unknown command '" + cmd + "'");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kAssertionFailed;
    }
}

}  // namespace abp::cli
