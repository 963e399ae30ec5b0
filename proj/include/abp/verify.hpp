// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "abp/field.hpp"
#include "abp/kernels.hpp"
#include "abp/norms.hpp"
#include "abp/test_functions.hpp"

namespace abp {

// ---------------------------------------------------------------------------
// Sharpness family on the unit disk
// ---------------------------------------------------------------------------

/// Radial profile with logarithmic blow-up and Laplacian concentrated on
/// r < eps:
///   u(r) = 1/2 - log(eps) - r^2/(2 eps^2)   for r <= eps
///        = -log(r)                          for r >= eps
/// C^1 across r = eps, boundary trace 0 on the unit circle, and
/// lap u = -2/eps^2 on r < eps, 0 elsewhere.
inline TestFunction sharpness_family(double eps) {
    if (!(eps > 0 && eps < 1))
        throw std::invalid_argument("sharpness_family: eps must lie in (0,1)");
    return {"u_eps",
            {{"eps", eps}},
            [eps](Vec p) {
                double r = std::sqrt(p.x * p.x + p.y * p.y);
                if (r <= eps) return 0.5 - std::log(eps) - r * r / (2 * eps * eps);
                return -std::log(r);
            },
            [eps](Vec p) {
                double r2 = p.x * p.x + p.y * p.y;
                return r2 < eps * eps ? -2.0 / (eps * eps) : 0.0;
            }};
}

/// Closed form of the log-kernel functional of the family at the origin:
/// int_{B(0,eps)} log(scale/r^2) (2/eps^2) dy, valid while eps^2 <= scale/e.
inline double sharpness_kernel_closed_form(double eps, double scale) {
    return 4 * kPi * std::log(1.0 / eps) + 2 * kPi * (1.0 + std::log(scale));
}

// ---------------------------------------------------------------------------
// Inequality reports
// ---------------------------------------------------------------------------

inline const std::map<std::string, std::string>& convention_notes() {
    static const std::map<std::string, std::string> c = {
        {"lorentz", "Lpq-unnormalized"},
        {"heat_kernel", "(4*pi*s)^(-n/2)*exp(-r^2/(4*s))"},
        {"self_cell", "clamp |x-y| to h/2"},
        {"increments", "variance 2*dt per coordinate"}};
    return c;
}

struct InequalityReport {
    std::string theorem_tag;  // classical | thm1 | thm2 | corollary
    double lhs_interior_sup = 0;
    double boundary_sup = 0;
    double functional_value = 0;
    double implied_constant = 0;
    nlohmann::json domain_descriptor;
    nlohmann::json function_descriptor;
    double h = 0;
    int restricted_top_k = 0;  // 0 = exhaustive evaluation points

    double s_exponent = std::numeric_limits<double>::quiet_NaN();        // classical
    double riesz_at_argmax = std::numeric_limits<double>::quiet_NaN();   // thm1
    double lhs_over_riesz = std::numeric_limits<double>::quiet_NaN();    // thm1
    double riesz_over_lorentz = std::numeric_limits<double>::quiet_NaN();  // thm1
    double theorem2_functional = std::numeric_limits<double>::quiet_NaN();  // corollary
    bool kernel_pointwise_le = true;  // corollary functional <= thm2 functional per point

    nlohmann::json to_json() const {
        nlohmann::json j{{"theorem_tag", theorem_tag},
                         {"lhs_interior_sup", lhs_interior_sup},
                         {"boundary_sup", boundary_sup},
                         {"functional_value", functional_value},
                         {"implied_constant", implied_constant},
                         {"domain", domain_descriptor},
                         {"function", function_descriptor},
                         {"h", h},
                         {"conventions", convention_notes()}};
        if (restricted_top_k > 0) j["restricted_top_k"] = restricted_top_k;
        if (std::isfinite(s_exponent)) j["s"] = s_exponent;
        if (std::isfinite(riesz_at_argmax)) {
            j["riesz_at_argmax"] = riesz_at_argmax;
            j["lhs_over_riesz"] = lhs_over_riesz;
            j["riesz_over_lorentz"] = riesz_over_lorentz;
        }
        if (std::isfinite(theorem2_functional)) {
            j["theorem2_functional"] = theorem2_functional;
            j["kernel_pointwise_le"] = kernel_pointwise_le;
        }
        return j;
    }
};

struct VerifyOptions {
    /// Restrict kernel-functional evaluation points to the k cells with the
    /// largest |u| (0 = every interior cell). Flagged in the report.
    int top_k = 0;
};

namespace detail {

inline double implied(double lhs, double bdy, double functional) {
    if (functional > 0) return std::max(0.0, lhs - bdy) / functional;
    return 0.0;
}

inline std::vector<int> top_k_by_abs_u(const ScalarField& u, int k) {
    std::vector<int> ids(u.interior_values().size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    if (k <= 0 || k >= static_cast<int>(ids.size())) return {};
    std::partial_sort(ids.begin(), ids.begin() + k, ids.end(), [&u](int a, int b) {
        return std::abs(u.interior_values()[a]) > std::abs(u.interior_values()[b]);
    });
    ids.resize(k);
    return ids;
}

inline InequalityReport base_report(const GridDomain& dom, const TestFunction& f,
                                    const std::string& tag, const Extrema& ex) {
    InequalityReport r;
    r.theorem_tag = tag;
    r.lhs_interior_sup = ex.interior_sup;
    r.boundary_sup = ex.boundary_sup;
    r.domain_descriptor = dom.shape().to_json();
    r.domain_descriptor["h"] = dom.spacing();
    r.function_descriptor = {{"name", f.name}, {"params", f.params}};
    r.h = dom.spacing();
    return r;
}

}  // namespace detail

/// Classical bound: functional = diam^{2-n/s} ||lap u||_{L^s}; needs s > n/2.
inline InequalityReport verify_classical(std::shared_ptr<const GridDomain> dom,
                                         const TestFunction& f, double s) {
    const int n = dom->dim();
    if (!(s > n / 2.0))
        throw std::invalid_argument("verify_classical: requires s > n/2 (fails at the endpoint)");
    SampledFunction sf = sample(dom, f);
    Extrema ex = extrema(sf.u);
    InequalityReport r = detail::base_report(*dom, f, "classical", ex);
    r.s_exponent = s;
    r.functional_value = std::pow(dom->diameter(), 2.0 - n / s) * lp_norm(sf.lap, s);
    r.implied_constant = detail::implied(ex.interior_sup, ex.boundary_sup, r.functional_value);
    return r;
}

/// Lorentz endpoint in 3D: functional = ||lap u||_{L^{3/2,1}}. Also records
/// the pointwise Newtonian bound at the argmax of |u| and the two empirical
/// constants of the chain lhs - boundary <= c * riesz <= c' * lorentz.
inline InequalityReport verify_theorem1(std::shared_ptr<const GridDomain> dom,
                                        const TestFunction& f, const VerifyOptions& opt = {}) {
    if (dom->dim() != 3)
        throw std::invalid_argument("verify_theorem1: requires n = 3 (n = 2 is the failure case)");
    SampledFunction sf = sample(dom, f);
    Extrema ex = extrema(sf.u);
    InequalityReport r = detail::base_report(*dom, f, "thm1", ex);
    r.functional_value = lorentz_norm(sf.lap, 1.5, 1.0);
    int argmax_id = 0;
    for (std::size_t c = 0; c < sf.u.interior_values().size(); ++c)
        if (std::abs(sf.u.interior_values()[c]) >
            std::abs(sf.u.interior_values()[argmax_id]))
            argmax_id = static_cast<int>(c);
    KernelEvalOptions ko;
    ko.eval_interior_ids = {argmax_id};
    r.riesz_at_argmax = riesz_functional(*dom, sf.lap, ko).max_value;
    r.restricted_top_k = opt.top_k;
    double excess = std::max(0.0, ex.interior_sup - ex.boundary_sup);
    r.lhs_over_riesz = r.riesz_at_argmax > 0 ? excess / r.riesz_at_argmax : 0.0;
    r.riesz_over_lorentz =
        r.functional_value > 0 ? r.riesz_at_argmax / r.functional_value : 0.0;
    r.implied_constant = detail::implied(ex.interior_sup, ex.boundary_sup, r.functional_value);
    return r;
}

/// Planar endpoint: functional = max_x sum_y max(1, log(|Omega|/|x-y|^2)) |lap u| h^2.
inline InequalityReport verify_theorem2(std::shared_ptr<const GridDomain> dom,
                                        const TestFunction& f, const VerifyOptions& opt = {}) {
    if (dom->dim() != 2) throw std::invalid_argument("verify_theorem2: requires n = 2");
    SampledFunction sf = sample(dom, f);
    Extrema ex = extrema(sf.u);
    InequalityReport r = detail::base_report(*dom, f, "thm2", ex);
    KernelEvalOptions ko;
    ko.eval_interior_ids = detail::top_k_by_abs_u(sf.u, opt.top_k);
    r.restricted_top_k = ko.eval_interior_ids.empty() ? 0 : opt.top_k;
    r.functional_value = log_kernel_functional(*dom, sf.lap, dom->measure(), ko).max_value;
    r.implied_constant = detail::implied(ex.interior_sup, ex.boundary_sup, r.functional_value);
    return r;
}

/// Inradius refinement for simply connected planar domains: the log kernel
/// scale becomes inrad^2. Records the pointwise comparison against the
/// |Omega|-scaled functional (<= holds cell-by-cell when inrad^2 <= |Omega|).
inline InequalityReport verify_corollary(std::shared_ptr<const GridDomain> dom,
                                         const TestFunction& f, const VerifyOptions& opt = {}) {
    if (dom->dim() != 2) throw std::invalid_argument("verify_corollary: requires n = 2");
    if (!dom->shape().simply_connected())
        throw std::invalid_argument("verify_corollary: shape must be simply connected");
    SampledFunction sf = sample(dom, f);
    Extrema ex = extrema(sf.u);
    InequalityReport r = detail::base_report(*dom, f, "corollary", ex);
    const double rho = dom->inradius();
    KernelEvalOptions ko;
    ko.keep_per_point = true;
    ko.eval_interior_ids = detail::top_k_by_abs_u(sf.u, opt.top_k);
    r.restricted_top_k = ko.eval_interior_ids.empty() ? 0 : opt.top_k;
    KernelFunctionalResult cor = log_kernel_functional(*dom, sf.lap, rho * rho, ko);
    KernelFunctionalResult thm2 = log_kernel_functional(*dom, sf.lap, dom->measure(), ko);
    r.functional_value = cor.max_value;
    r.theorem2_functional = thm2.max_value;
    r.kernel_pointwise_le = true;
    for (std::size_t q = 0; q < cor.per_point_values->size(); ++q)
        if ((*cor.per_point_values)[q] > (*thm2.per_point_values)[q]) {
            r.kernel_pointwise_le = false;
            break;
        }
    r.implied_constant = detail::implied(ex.interior_sup, ex.boundary_sup, r.functional_value);
    return r;
}

// ---------------------------------------------------------------------------
// Sharpness records
// ---------------------------------------------------------------------------

struct SharpnessRecord {
    double epsilon = 0;
    double sup_u = 0;       // 1/2 + log(1/eps), closed form
    double l1_lap = 0;      // 2*pi, closed form
    double log_kernel = 0;  // grid functional, scale = measure(domain)
    double ratio_l1 = 0;
    double ratio_kernel = 0;
};

/// Record for one member of the family on a unit-disk domain at the origin.
inline SharpnessRecord sharpness_record(std::shared_ptr<const GridDomain> dom, double eps) {
    const Shape& s = dom->shape();
    if (s.kind() != Shape::Kind::disk || std::abs(s.diameter() - 2.0) > 1e-12 ||
        s.representative_interior_point().norm() > 1e-12)
        throw std::invalid_argument("sharpness_record: needs the unit disk at the origin");
    TestFunction f = sharpness_family(eps);
    SampledFunction sf = sample(dom, f);
    SharpnessRecord rec;
    rec.epsilon = eps;
    rec.sup_u = 0.5 + std::log(1.0 / eps);
    rec.l1_lap = 2.0 * kPi;
    rec.log_kernel = log_kernel_functional(*dom, sf.lap, dom->measure()).max_value;
    rec.ratio_l1 = rec.sup_u / rec.l1_lap;
    rec.ratio_kernel = rec.sup_u / rec.log_kernel;
    return rec;
}

// ---------------------------------------------------------------------------
// Constant sweeps over a suite manifest
// ---------------------------------------------------------------------------

struct SweepEntry {
    Shape shape;
    double h;
    TestFunction f;
    std::string theorem;  // classical | thm1 | thm2 | corollary
    double s = 2.0;       // classical exponent

    nlohmann::json to_json() const {
        nlohmann::json j{{"shape", shape.to_json()},
                         {"h", h},
                         {"function", {{"name", f.name}, {"params", f.params}}},
                         {"theorem", theorem}};
        if (theorem == "classical") j["s"] = s;
        return j;
    }
};

struct SweepRow {
    bool ok = false;
    std::string error;
    bool flagged = false;  // lhs - boundary > 1e3 * functional: suspected bug
    InequalityReport report;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::map<std::string, double> max_constant;  // per theorem tag
    std::string manifest_hash;
};

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline nlohmann::json suite_manifest(const std::vector<SweepEntry>& suite,
                                     const std::string& version) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : suite) entries.push_back(e.to_json());
    return {{"version", version}, {"entries", entries}};
}

inline SweepResult constant_sweep(const std::vector<SweepEntry>& suite,
                                  const VerifyOptions& opt = {},
                                  const std::string& version = "adhoc") {
    if (suite.empty()) throw std::invalid_argument("constant_sweep: empty suite");
    SweepResult out;
    out.manifest_hash = fnv1a_hex(suite_manifest(suite, version).dump());
    std::map<std::string, std::shared_ptr<const GridDomain>> cache;
    for (const auto& e : suite) {
        SweepRow row;
        try {
            std::string key = e.shape.to_json().dump() + "@" + std::to_string(e.h);
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, build_domain(e.shape, e.h)).first;
            const auto& dom = it->second;
            if (e.theorem == "classical") row.report = verify_classical(dom, e.f, e.s);
            else if (e.theorem == "thm1") row.report = verify_theorem1(dom, e.f, opt);
            else if (e.theorem == "thm2") row.report = verify_theorem2(dom, e.f, opt);
            else if (e.theorem == "corollary") row.report = verify_corollary(dom, e.f, opt);
            else throw std::invalid_argument("unknown theorem tag '" + e.theorem + "'");
            row.ok = true;
            double excess = row.report.lhs_interior_sup - row.report.boundary_sup;
            row.flagged = excess > 1e3 * row.report.functional_value;
            auto& mx = out.max_constant[row.report.theorem_tag];
            mx = std::max(mx, row.report.implied_constant);
        } catch (const std::exception& ex) {
            row.ok = false;
            row.error = ex.what();
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// The fixed default suite ("abplab-suite-v1"): the five planar shapes and
/// the two 3D shapes crossed with the quadratic profile, a harmonic
/// polynomial, an off-center bump, and (on the disk) the sharpness family.
inline std::vector<SweepEntry> default_suite() {
    std::vector<SweepEntry> suite;
    struct S2 {
        Shape shape;
        double h;
    };
    const std::vector<S2> planar = {{Shape::disk({0, 0, 0}, 1.0), 1.0 / 64},
                                    {Shape::rectangle({0, 0, 0}, {1, 1, 0}), 1.0 / 64},
                                    {Shape::annulus({0, 0, 0}, 0.5, 1.0), 1.0 / 64},
                                    {Shape::l_shape({0, 0, 0}, 1.0), 1.0 / 64},
                                    {Shape::rectangle({0, 0, 0}, {10, 0.5, 0}), 1.0 / 64}};
    for (const auto& [shape, h] : planar) {
        Vec c = shape.representative_interior_point();
        double rin = shape.inradius();
        std::vector<TestFunction> fns = {
            testfn::quadratic_bump(c, shape.diameter() / 2, 2),
            testfn::harmonic_poly(),
            testfn::smooth_bump(c + Vec{0.3 * rin, 0, 0}, 0.6 * rin, 1.0, 2)};
        for (const auto& f : fns) {
            suite.push_back({shape, h, f, "classical", 2.0});
            suite.push_back({shape, h, f, "thm2"});
            if (shape.simply_connected()) suite.push_back({shape, h, f, "corollary"});
        }
    }
    Shape disk = Shape::disk({0, 0, 0}, 1.0);
    for (double eps : {0.1, 0.01}) {
        suite.push_back({disk, 1.0 / 64, sharpness_family(eps), "classical", 2.0});
        suite.push_back({disk, 1.0 / 64, sharpness_family(eps), "thm2"});
        suite.push_back({disk, 1.0 / 64, sharpness_family(eps), "corollary"});
    }
    const std::vector<S2> solid = {{Shape::ball3d({0, 0, 0}, 1.0), 1.0 / 16},
                                   {Shape::box3d({0, 0, 0}, {1, 1, 1}), 1.0 / 16}};
    for (const auto& [shape, h] : solid) {
        Vec c = shape.representative_interior_point();
        double rin = shape.inradius();
        std::vector<TestFunction> fns = {
            testfn::quadratic_bump(c, shape.diameter() / 2, 3),
            testfn::harmonic_plus_bump(c, 0.6 * rin, 1.0, 3),
            testfn::smooth_bump(c, 0.15 * rin * 2, 1.0, 3)};
        for (const auto& f : fns) {
            suite.push_back({shape, h, f, "classical", 2.0});
            suite.push_back({shape, h, f, "thm1"});
        }
    }
    return suite;
}

inline const char* default_suite_version() { return "abplab-suite-v1"; }

}  // namespace abp
