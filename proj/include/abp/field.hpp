// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "abp/geometry.hpp"

namespace abp {

/// Real values on the interior and boundary cells of a GridDomain, aligned
/// with the domain's dense cell ids.
class ScalarField {
  public:
    explicit ScalarField(std::shared_ptr<const GridDomain> dom)
        : dom_(std::move(dom)),
          interior_(dom_->n_interior(), 0.0),
          boundary_(dom_->n_boundary(), 0.0) {}

    const GridDomain& domain() const { return *dom_; }
    std::shared_ptr<const GridDomain> domain_ptr() const { return dom_; }

    std::vector<double>& interior_values() { return interior_; }
    const std::vector<double>& interior_values() const { return interior_; }
    std::vector<double>& boundary_values() { return boundary_; }
    const std::vector<double>& boundary_values() const { return boundary_; }

    double value_at(GridIndex gi) const {
        switch (dom_->cell_class(gi)) {
            case CellClass::interior: return interior_[dom_->cell_id(gi)];
            case CellClass::boundary: return boundary_[dom_->cell_id(gi)];
            default: throw std::out_of_range("ScalarField: exterior cell has no value");
        }
    }

  private:
    std::shared_ptr<const GridDomain> dom_;
    std::vector<double> interior_;
    std::vector<double> boundary_;
};

/// Closed-form test case: u and its Laplacian, both evaluable at any point
/// of the closed shape. Verifiers consume lap_u in closed form; the discrete
/// Laplacian exists for cross-checks only.
struct TestFunction {
    std::string name;
    std::map<std::string, double> params;
    std::function<double(Vec)> u;
    std::function<double(Vec)> lap_u;
};

struct SampledFunction {
    ScalarField u;
    ScalarField lap;
};

/// Pointwise evaluation of f at interior and boundary cell centers.
inline SampledFunction sample(std::shared_ptr<const GridDomain> dom, const TestFunction& f) {
    SampledFunction out{ScalarField(dom), ScalarField(dom)};
    auto eval = [&](const std::function<double(Vec)>& fn, GridIndex gi, const char* what) {
        Vec c = dom->cell_center(gi);
        double v = fn(c);
        if (!std::isfinite(v))
            throw std::runtime_error("sample: non-finite " + std::string(what) + " for '" +
                                     f.name + "' at cell (" + std::to_string(gi.i) + "," +
                                     std::to_string(gi.j) + "," + std::to_string(gi.k) + ") = (" +
                                     std::to_string(c.x) + "," + std::to_string(c.y) + "," +
                                     std::to_string(c.z) + ")");
        return v;
    };
    const auto& icells = dom->interior_cells();
    for (std::size_t n = 0; n < icells.size(); ++n) {
        out.u.interior_values()[n] = eval(f.u, icells[n], "u");
        out.lap.interior_values()[n] = eval(f.lap_u, icells[n], "lap_u");
    }
    const auto& bcells = dom->boundary_cells();
    for (std::size_t n = 0; n < bcells.size(); ++n) {
        out.u.boundary_values()[n] = eval(f.u, bcells[n], "u");
        out.lap.boundary_values()[n] = eval(f.lap_u, bcells[n], "lap_u");
    }
    return out;
}

/// Standard 2n+1-point stencil on interior cells; boundary cells of the
/// output carry 0 by convention.
inline ScalarField discrete_laplacian(const ScalarField& u) {
    const GridDomain& dom = u.domain();
    ScalarField out(u.domain_ptr());
    const double inv_h2 = 1.0 / (dom.spacing() * dom.spacing());
    const int n = dom.dim();
    const auto& icells = dom.interior_cells();
    for (std::size_t c = 0; c < icells.size(); ++c) {
        double acc = -2.0 * n * u.interior_values()[c];
        for (int d = 0; d < n; ++d)
            for (int s : {-1, +1}) acc += u.value_at(GridDomain::shifted(icells[c], d, s));
        out.interior_values()[c] = acc * inv_h2;
    }
    return out;
}

struct Extrema {
    double interior_sup = 0;
    double boundary_sup = 0;
    Vec argmax;  // interior cell center realizing interior_sup
};

inline Extrema extrema(const ScalarField& u) {
    const GridDomain& dom = u.domain();
    if (dom.n_interior() == 0) throw std::invalid_argument("extrema: empty field");
    Extrema e;
    std::size_t arg = 0;
    for (std::size_t c = 0; c < u.interior_values().size(); ++c) {
        double a = std::abs(u.interior_values()[c]);
        if (a > e.interior_sup) {
            e.interior_sup = a;
            arg = c;
        }
    }
    for (double v : u.boundary_values()) e.boundary_sup = std::max(e.boundary_sup, std::abs(v));
    e.argmax = dom.cell_center(dom.interior_cells()[arg]);
    return e;
}

}  // namespace abp
