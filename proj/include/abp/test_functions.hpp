// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "abp/field.hpp"

namespace abp::testfn {

inline TestFunction constant(double c) {
    return {"constant", {{"c", c}}, [c](Vec) { return c; }, [](Vec) { return 0.0; }};
}

inline TestFunction affine(double ax, double ay, double az, double b) {
    return {"affine",
            {{"ax", ax}, {"ay", ay}, {"az", az}, {"b", b}},
            [=](Vec p) { return ax * p.x + ay * p.y + az * p.z + b; },
            [](Vec) { return 0.0; }};
}

/// u = 1 - |x - c|^2 / R^2, the "1 - r^2" profile on arbitrary domains.
inline TestFunction quadratic_bump(Vec center, double R, int dim) {
    const double lap = -2.0 * dim / (R * R);
    return {"quadratic_bump",
            {{"R", R}, {"dim", double(dim)}},
            [center, R](Vec p) { return 1.0 - dist2(p, center) / (R * R); },
            [lap](Vec) { return lap; }};
}

/// Harmonic polynomial x^2 - y^2 (harmonic in 2D and 3D).
inline TestFunction harmonic_poly() {
    return {"harmonic_poly", {}, [](Vec p) { return p.x * p.x - p.y * p.y; },
            [](Vec) { return 0.0; }};
}

/// sin(pi x) sin(pi y) on the unit square; the classic analytic Poisson pair.
inline TestFunction sin_product() {
    return {"sin_product", {},
            [](Vec p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); },
            [](Vec p) { return -2.0 * kPi * kPi * std::sin(kPi * p.x) * std::sin(kPi * p.y); }};
}

/// C^2 compactly supported bump A*(1-s)^4 with s = |x-c|^2/rho^2.
/// lap u = A * [48 s (1-s)^2 - 8 n (1-s)^3] / rho^2 on the support.
inline TestFunction smooth_bump(Vec center, double rho, double amp, int dim) {
    return {"smooth_bump",
            {{"rho", rho}, {"amp", amp}, {"dim", double(dim)}},
            [=](Vec p) {
                double s = dist2(p, center) / (rho * rho);
                if (s >= 1.0) return 0.0;
                double t = 1.0 - s;
                return amp * t * t * t * t;
            },
            [=](Vec p) {
                double s = dist2(p, center) / (rho * rho);
                if (s >= 1.0) return 0.0;
                double t = 1.0 - s;
                return amp * (48.0 * s * t * t - 8.0 * dim * t * t * t) / (rho * rho);
            }};
}

/// harmonic_poly plus a smooth bump; nontrivial boundary data and source.
inline TestFunction harmonic_plus_bump(Vec center, double rho, double amp, int dim) {
    TestFunction b = smooth_bump(center, rho, amp, dim);
    return {"harmonic_plus_bump", b.params,
            [b](Vec p) { return p.x * p.x - p.y * p.y + b.u(p); },
            [b](Vec p) { return b.lap_u(p); }};
}

inline TestFunction scaled(const TestFunction& f, double lambda) {
    TestFunction g = f;
    g.name = f.name + "_scaled";
    g.params["lambda"] = lambda;
    g.u = [lambda, u = f.u](Vec p) { return lambda * u(p); };
    g.lap_u = [lambda, l = f.lap_u](Vec p) { return lambda * l(p); };
    return g;
}

}  // namespace abp::testfn
