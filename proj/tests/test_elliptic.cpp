// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "abp/elliptic.hpp"
#include "abp/rng.hpp"
#include "abp/test_functions.hpp"

using namespace abp;
using Catch::Approx;

namespace {

double max_error_vs(const ScalarField& u, const ScalarField& ref) {
    double e = 0;
    for (std::size_t c = 0; c < u.interior_values().size(); ++c)
        e = std::max(e, std::abs(u.interior_values()[c] - ref.interior_values()[c]));
    return e;
}

std::vector<double> random_boundary(const GridDomain& dom, std::uint64_t seed) {
    PathRng rng(seed, 0);
    std::vector<double> g(dom.n_boundary());
    for (double& v : g) v = 10.0 * rng.uniform() - 5.0;
    return g;
}

}  // namespace

TEST_CASE("poisson solve recovers the sin-product pair") {
    auto dom = build_domain(Shape::rectangle({0, 0, 0}, {1, 1, 0}), 1.0 / 32);
    SampledFunction sf = sample(dom, testfn::sin_product());
    std::vector<double> f(dom->n_interior());
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = -sf.lap.interior_values()[c];
    auto [u, diag] = solve_dirichlet(dom, f, sf.u.boundary_values());
    CHECK(diag.residual_inf <= diag.tolerance);
    CHECK(max_error_vs(u, sf.u) <= 2e-3);  // O(h^2)
    CHECK(extrema(u).interior_sup == Approx(1.0).margin(5e-3));
}

TEST_CASE("solver convergence is second order on the analytic pair") {
    std::vector<double> errs;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        auto dom = build_domain(Shape::rectangle({0, 0, 0}, {1, 1, 0}), h);
        SampledFunction sf = sample(dom, testfn::sin_product());
        std::vector<double> f(dom->n_interior());
        for (std::size_t c = 0; c < f.size(); ++c) f[c] = -sf.lap.interior_values()[c];
        auto [u, diag] = solve_dirichlet(dom, f, sf.u.boundary_values());
        errs.push_back(max_error_vs(u, sf.u));
    }
    CHECK(errs[0] / errs[1] >= 3.0);
    CHECK(errs[0] / errs[1] <= 5.0);
    CHECK(errs[1] / errs[2] >= 3.0);
    CHECK(errs[1] / errs[2] <= 5.0);
}

TEST_CASE("constants are discrete harmonic") {
    auto dom = build_domain(Shape::disk({0, 0, 0}, 1.0), 1.0 / 24);
    std::vector<double> f(dom->n_interior(), 0.0), g(dom->n_boundary(), 5.0);
    auto [u, diag] = solve_dirichlet(dom, f, g);
    for (double v : u.interior_values()) CHECK(v == Approx(5.0).margin(1e-9));
}

TEST_CASE("disk poisson with first-order boundary error") {
    const double h = 1.0 / 64;
    auto dom = build_domain(Shape::disk({0, 0, 0}, 1.0), h);
    SampledFunction sf = sample(dom, testfn::quadratic_bump({0, 0, 0}, 1.0, 2));
    std::vector<double> f(dom->n_interior(), 4.0);  // -lap(1 - r^2) = 4
    std::vector<double> g(dom->n_boundary(), 0.0);
    auto [u, diag] = solve_dirichlet(dom, f, g);
    CHECK(max_error_vs(u, sf.u) <= 4 * h);
}

TEST_CASE("harmonic extension reproduces discrete-harmonic functions") {
    auto dom = build_domain(Shape::rectangle({0, 0, 0}, {1, 1, 0}), 1.0 / 32);

    std::vector<double> gc(dom->n_boundary(), -2.5);
    ScalarField phi_c = harmonic_extension(dom, gc);
    for (double v : phi_c.interior_values()) CHECK(v == Approx(-2.5).margin(1e-9));

    // affine functions and x^2 - y^2 are in the kernel of the 5-point stencil
    for (const TestFunction& f : {testfn::affine(2, 1, 0, -0.5), testfn::harmonic_poly()}) {
        INFO(f.name);
        SampledFunction sf = sample(dom, f);
        ScalarField phi = harmonic_extension(dom, sf.u.boundary_values());
        CHECK(max_error_vs(phi, sf.u) <= 1e-6);
    }
}

TEST_CASE("discrete maximum principle holds exactly") {
    auto dom = build_domain(Shape::disk({0, 0, 0}, 1.0), 1.0 / 24);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<double> g = random_boundary(*dom, seed);
        ScalarField phi = harmonic_extension(dom, g);
        double gmin = *std::min_element(g.begin(), g.end());
        double gmax = *std::max_element(g.begin(), g.end());
        for (double v : phi.interior_values()) {
            CHECK(v <= gmax);
            CHECK(v >= gmin);
        }
    }
}

TEST_CASE("maximum-principle reduction bound") {
    // max |u| <= max_boundary |u| + max |u - phi|, phi = harmonic extension of the trace
    auto dom = build_domain(Shape::l_shape({0, 0, 0}, 1.0), 1.0 / 32);
    for (const TestFunction& f :
         {testfn::quadratic_bump({0.25, 0.25, 0}, 0.7, 2), testfn::sin_product(),
          testfn::smooth_bump({0.3, 0.3, 0}, 0.2, 2.0, 2)}) {
        INFO(f.name);
        SampledFunction sf = sample(dom, f);
        ScalarField phi = harmonic_extension(dom, sf.u.boundary_values());
        Extrema ex = extrema(sf.u);
        double diff = 0;
        for (std::size_t c = 0; c < phi.interior_values().size(); ++c)
            diff = std::max(diff, std::abs(sf.u.interior_values()[c] -
                                           phi.interior_values()[c]));
        CHECK(ex.interior_sup <= ex.boundary_sup + diff + 1e-9);
    }
}

TEST_CASE("solver is deterministic") {
    auto dom = build_domain(Shape::disk({0, 0, 0}, 1.0), 1.0 / 24);
    std::vector<double> f(dom->n_interior(), 1.0);
    std::vector<double> g = random_boundary(*dom, 7);
    auto [u1, d1] = solve_dirichlet(dom, f, g);
    auto [u2, d2] = solve_dirichlet(dom, f, g);
    CHECK(d1.sweeps == d2.sweeps);
    for (std::size_t c = 0; c < u1.interior_values().size(); ++c)
        CHECK(u1.interior_values()[c] == u2.interior_values()[c]);
}

TEST_CASE("non-convergence carries diagnostics") {
    auto dom = build_domain(Shape::rectangle({0, 0, 0}, {1, 1, 0}), 1.0 / 32);
    std::vector<double> f(dom->n_interior(), 1.0), g(dom->n_boundary(), 0.0);
    SolveOptions opt;
    opt.max_sweeps = 2;
    opt.tol_factor = 1e-14;
    try {
        solve_dirichlet(dom, f, g, opt);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.diagnostics.sweeps == 2);
        CHECK(e.diagnostics.residual_inf > e.diagnostics.tolerance);
        CHECK_FALSE(e.diagnostics.scheme.empty());
    }
}
