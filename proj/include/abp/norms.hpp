// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "abp/field.hpp"

namespace abp {

/// Decreasing rearrangement of a grid field: plateaus of (value, measure)
/// with strictly decreasing values. Values below 1e-15 * max|f| count as
/// zero and are dropped.
struct StepFunction {
    struct Plateau {
        double value;
        double measure;
    };
    std::vector<Plateau> plateaus;

    double total_measure() const {
        double m = 0;
        for (const auto& p : plateaus) m += p.measure;
        return m;
    }
};

inline StepFunction decreasing_rearrangement(const ScalarField& f) {
    const double cell = std::pow(f.domain().spacing(), f.domain().dim());
    std::vector<double> v;
    v.reserve(f.interior_values().size());
    double vmax = 0;
    for (double x : f.interior_values()) {
        double a = std::abs(x);
        v.push_back(a);
        vmax = std::max(vmax, a);
    }
    const double cutoff = 1e-15 * vmax;
    std::sort(v.begin(), v.end(), std::greater<>());
    StepFunction sf;
    for (std::size_t i = 0; i < v.size();) {
        if (v[i] <= cutoff) break;
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        sf.plateaus.push_back({v[i], double(j - i) * cell});
        i = j;
    }
    return sf;
}

inline double lp_norm(const StepFunction& sf, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    double acc = 0;
    for (const auto& pl : sf.plateaus) acc += std::pow(pl.value, p) * pl.measure;
    return std::pow(acc, 1.0 / p);
}

inline double lp_norm(const ScalarField& f, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const double cell = std::pow(f.domain().spacing(), f.domain().dim());
    double acc = 0;
    for (double x : f.interior_values()) acc += std::pow(std::abs(x), p) * cell;
    return std::pow(acc, 1.0 / p);
}

/// Lorentz norm, convention ||f||_{p,q} = (int_0^inf [t^{1/p} f*(t)]^q dt/t)^{1/q}
/// ("Lpq-unnormalized"; no p^{1/q} factor). The rearrangement of a grid field
/// is a step function, so each plateau integrates in closed form:
///   int_{T0}^{T1} t^{q/p - 1} v^q dt = v^q (p/q) (T1^{q/p} - T0^{q/p}).
/// q = inf gives sup_t t^{1/p} f*(t) = max_i v_i T_i^{1/p}.
inline double lorentz_norm(const StepFunction& sf, double p, double q) {
    if (p <= 1.0) throw std::invalid_argument("lorentz_norm: p must be > 1");
    if (q < 1.0) throw std::invalid_argument("lorentz_norm: q must be >= 1 (or inf)");
    if (std::isinf(q)) {
        double best = 0, T = 0;
        for (const auto& pl : sf.plateaus) {
            T += pl.measure;
            best = std::max(best, pl.value * std::pow(T, 1.0 / p));
        }
        return best;
    }
    const double e = q / p;
    double acc = 0, T0 = 0;
    for (const auto& pl : sf.plateaus) {
        double T1 = T0 + pl.measure;
        acc += std::pow(pl.value, q) * (std::pow(T1, e) - std::pow(T0, e)) / e;
        T0 = T1;
    }
    return std::pow(acc, 1.0 / q);
}

inline double lorentz_norm(const ScalarField& f, double p, double q) {
    return lorentz_norm(decreasing_rearrangement(f), p, q);
}

}  // namespace abp
