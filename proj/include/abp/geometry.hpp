// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "abp/common.hpp"

namespace abp {

// ---------------------------------------------------------------------------
// Shape specifications
// ---------------------------------------------------------------------------

/// Closed family of generating shapes. Planar: disk, rectangle, annulus,
/// l_shape (axis-aligned square minus its upper-right quadrant). 3D: ball3d,
/// box3d. Each shape knows its analytic measure/inradius/diameter, used by
/// the path samplers and as cross-checks for the grid quantities.
class Shape {
  public:
    enum class Kind { disk, rectangle, annulus, l_shape, ball3d, box3d };

    static Shape disk(Vec center, double radius) {
        require(radius > 0, "disk: radius must be > 0");
        return Shape(Kind::disk, center, {radius, 0, 0});
    }
    static Shape rectangle(Vec corner, Vec widths) {
        require(widths.x > 0 && widths.y > 0, "rectangle: widths must be > 0");
        return Shape(Kind::rectangle, corner, {widths.x, widths.y, 0});
    }
    static Shape annulus(Vec center, double r_in, double r_out) {
        require(0 < r_in && r_in < r_out, "annulus: need 0 < r_in < r_out");
        return Shape(Kind::annulus, center, {r_in, r_out, 0});
    }
    static Shape l_shape(Vec corner, double size) {
        require(size > 0, "l_shape: size must be > 0");
        return Shape(Kind::l_shape, corner, {size, 0, 0});
    }
    static Shape ball3d(Vec center, double radius) {
        require(radius > 0, "ball3d: radius must be > 0");
        return Shape(Kind::ball3d, center, {radius, 0, 0});
    }
    static Shape box3d(Vec corner, Vec widths) {
        require(widths.x > 0 && widths.y > 0 && widths.z > 0, "box3d: widths must be > 0");
        return Shape(Kind::box3d, corner, {widths.x, widths.y, widths.z});
    }

    Kind kind() const { return kind_; }
    int dim() const { return (kind_ == Kind::ball3d || kind_ == Kind::box3d) ? 3 : 2; }

    std::string tag() const {
        switch (kind_) {
            case Kind::disk: return "disk";
            case Kind::rectangle: return "rectangle";
            case Kind::annulus: return "annulus";
            case Kind::l_shape: return "l_shape";
            case Kind::ball3d: return "ball3d";
            case Kind::box3d: return "box3d";
        }
        return "?";
    }

    /// Membership in the open shape.
    bool contains(Vec p) const {
        switch (kind_) {
            case Kind::disk: {
                Vec d = p - base_;
                d.z = 0;
                return d.norm2() < p_[0] * p_[0];
            }
            case Kind::rectangle:
                return p.x > base_.x && p.x < base_.x + p_[0] && p.y > base_.y &&
                       p.y < base_.y + p_[1];
            case Kind::annulus: {
                Vec d = p - base_;
                d.z = 0;
                double r2 = d.norm2();
                return r2 > p_[0] * p_[0] && r2 < p_[1] * p_[1];
            }
            case Kind::l_shape: {
                double s = p_[0];
                double u = p.x - base_.x, v = p.y - base_.y;
                if (!(u > 0 && u < s && v > 0 && v < s)) return false;
                return !(u >= s / 2 && v >= s / 2);  // removed quadrant is closed
            }
            case Kind::ball3d:
                return dist2(p, base_) < p_[0] * p_[0];
            case Kind::box3d:
                return p.x > base_.x && p.x < base_.x + p_[0] && p.y > base_.y &&
                       p.y < base_.y + p_[1] && p.z > base_.z && p.z < base_.z + p_[2];
        }
        return false;
    }

    std::pair<Vec, Vec> bounding_box() const {
        switch (kind_) {
            case Kind::disk:
            case Kind::ball3d: {
                double r = p_[0];
                return {base_ - Vec{r, r, dim() == 3 ? r : 0.0},
                        base_ + Vec{r, r, dim() == 3 ? r : 0.0}};
            }
            case Kind::annulus: {
                double r = p_[1];
                return {base_ - Vec{r, r, 0}, base_ + Vec{r, r, 0}};
            }
            case Kind::rectangle:
                return {base_, base_ + Vec{p_[0], p_[1], 0}};
            case Kind::l_shape:
                return {base_, base_ + Vec{p_[0], p_[0], 0}};
            case Kind::box3d:
                return {base_, base_ + Vec{p_[0], p_[1], p_[2]}};
        }
        return {};
    }

    /// Lattice anchor: cell centers are placed on anchor + h*Z^n. Radial
    /// shapes anchor at their center (so the grid has a cell center exactly
    /// there); corner shapes anchor at corner + h/2 per axis, which is
    /// handled by the builder via anchor_at_corner().
    Vec anchor() const { return base_; }
    bool anchor_at_corner() const {
        return kind_ == Kind::rectangle || kind_ == Kind::l_shape || kind_ == Kind::box3d;
    }

    double measure() const {
        switch (kind_) {
            case Kind::disk: return kPi * p_[0] * p_[0];
            case Kind::rectangle: return p_[0] * p_[1];
            case Kind::annulus: return kPi * (p_[1] * p_[1] - p_[0] * p_[0]);
            case Kind::l_shape: return 0.75 * p_[0] * p_[0];
            case Kind::ball3d: return 4.0 / 3.0 * kPi * p_[0] * p_[0] * p_[0];
            case Kind::box3d: return p_[0] * p_[1] * p_[2];
        }
        return 0;
    }

    double inradius() const {
        switch (kind_) {
            case Kind::disk:
            case Kind::ball3d: return p_[0];
            case Kind::rectangle: return 0.5 * std::min(p_[0], p_[1]);
            case Kind::annulus: return 0.5 * (p_[1] - p_[0]);
            // largest disk fits against the two outer walls and the inner
            // corner: r = s/(2 + sqrt(2))
            case Kind::l_shape: return p_[0] / (2.0 + std::sqrt(2.0));
            case Kind::box3d: return 0.5 * std::min({p_[0], p_[1], p_[2]});
        }
        return 0;
    }

    double diameter() const {
        switch (kind_) {
            case Kind::disk:
            case Kind::ball3d: return 2 * p_[0];
            case Kind::annulus: return 2 * p_[1];
            case Kind::rectangle: return std::sqrt(p_[0] * p_[0] + p_[1] * p_[1]);
            case Kind::l_shape: return p_[0] * std::sqrt(2.0);
            case Kind::box3d:
                return std::sqrt(p_[0] * p_[0] + p_[1] * p_[1] + p_[2] * p_[2]);
        }
        return 0;
    }

    bool simply_connected() const { return kind_ != Kind::annulus; }

    /// A point well inside the shape (start point default for path sampling).
    Vec representative_interior_point() const {
        switch (kind_) {
            case Kind::disk:
            case Kind::ball3d: return base_;
            case Kind::rectangle: return base_ + Vec{p_[0] / 2, p_[1] / 2, 0};
            case Kind::annulus: return base_ + Vec{(p_[0] + p_[1]) / 2, 0, 0};
            case Kind::l_shape: {
                double c = p_[0] / (2.0 + std::sqrt(2.0));  // incenter
                return base_ + Vec{c, c, 0};
            }
            case Kind::box3d: return base_ + Vec{p_[0] / 2, p_[1] / 2, p_[2] / 2};
        }
        return base_;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["shape"] = tag();
        switch (kind_) {
            case Kind::disk:
            case Kind::annulus:
                j["center"] = {base_.x, base_.y};
                break;
            case Kind::ball3d:
                j["center"] = {base_.x, base_.y, base_.z};
                break;
            case Kind::rectangle:
            case Kind::l_shape:
                j["corner"] = {base_.x, base_.y};
                break;
            case Kind::box3d:
                j["corner"] = {base_.x, base_.y, base_.z};
                break;
        }
        switch (kind_) {
            case Kind::disk:
            case Kind::ball3d: j["radius"] = p_[0]; break;
            case Kind::annulus:
                j["r_in"] = p_[0];
                j["r_out"] = p_[1];
                break;
            case Kind::rectangle: j["widths"] = {p_[0], p_[1]}; break;
            case Kind::box3d: j["widths"] = {p_[0], p_[1], p_[2]}; break;
            case Kind::l_shape: j["size"] = p_[0]; break;
        }
        return j;
    }

    static Shape from_json(const nlohmann::json& j) {
        const std::string tag = j.at("shape").get<std::string>();
        auto pt = [&j](const char* key, int n) {
            const auto& a = j.at(key);
            if (!a.is_array() || static_cast<int>(a.size()) != n)
                throw std::invalid_argument(std::string("shape json: '") + key + "' must be an array of " +
                                            std::to_string(n) + " numbers");
            Vec v{a[0].get<double>(), a[1].get<double>(), 0};
            if (n == 3) v.z = a[2].get<double>();
            return v;
        };
        if (tag == "disk") return disk(pt("center", 2), j.at("radius").get<double>());
        if (tag == "rectangle") return rectangle(pt("corner", 2), pt("widths", 2));
        if (tag == "annulus")
            return annulus(pt("center", 2), j.at("r_in").get<double>(), j.at("r_out").get<double>());
        if (tag == "l_shape") return l_shape(pt("corner", 2), j.at("size").get<double>());
        if (tag == "ball3d") return ball3d(pt("center", 3), j.at("radius").get<double>());
        if (tag == "box3d") return box3d(pt("corner", 3), pt("widths", 3));
        throw std::invalid_argument("shape json: unknown shape '" + tag + "'");
    }

  private:
    Shape(Kind k, Vec base, std::array<double, 3> p) : kind_(k), base_(base), p_(p) {}
    static void require(bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    }

    Kind kind_;
    Vec base_;                  // center or corner
    std::array<double, 3> p_;   // kind-specific parameters
};

// ---------------------------------------------------------------------------
// Grid domains
// ---------------------------------------------------------------------------

enum class CellClass : std::uint8_t { exterior = 0, interior = 1, boundary = 2 };

struct GridIndex {
    int i = 0, j = 0, k = 0;
    bool operator==(const GridIndex&) const = default;
};

/// Axis-aligned grid discretization of a Shape. A cell is interior iff its
/// center lies in the open shape; boundary cells are the non-interior cells
/// with an interior axis neighbor. Cell centers sit on the shape's anchor
/// lattice, so radial shapes have a cell center exactly at their center and
/// corner shapes tile exactly when h divides the widths.
class GridDomain {
  public:
    GridDomain(const Shape& spec, double h) : shape_(spec), h_(h) {
        if (!(h > 0)) throw std::invalid_argument("build_domain: h must be > 0");
        dim_ = spec.dim();
        auto [lo, hi] = spec.bounding_box();
        Vec anchor = spec.anchor();
        if (spec.anchor_at_corner()) anchor = anchor + Vec{h / 2, h / 2, dim_ == 3 ? h / 2 : 0.0};
        origin_ = anchor;
        for (int d = 0; d < 3; ++d) {
            double l = axis(lo, d), u = axis(hi, d), a = axis(anchor, d);
            if (d >= dim_) {
                lo_[d] = 0;
                dims_[d] = 1;
                continue;
            }
            lo_[d] = static_cast<int>(std::floor((l - a) / h)) - 2;
            int hi_i = static_cast<int>(std::ceil((u - a) / h)) + 2;
            dims_[d] = hi_i - lo_[d] + 1;
        }
        const std::size_t total =
            std::size_t(dims_[0]) * std::size_t(dims_[1]) * std::size_t(dims_[2]);
        class_.assign(total, static_cast<std::uint8_t>(CellClass::exterior));
        cell_id_.assign(total, -1);

        for (int i = 0; i < dims_[0]; ++i)
            for (int j = 0; j < dims_[1]; ++j)
                for (int k = 0; k < dims_[2]; ++k) {
                    GridIndex gi{i + lo_[0], j + lo_[1], k + lo_[2]};
                    if (spec.contains(cell_center(gi)))
                        class_[flat(gi)] = static_cast<std::uint8_t>(CellClass::interior);
                }

        // boundary = non-interior cells adjacent to an interior cell
        for (int i = 0; i < dims_[0]; ++i)
            for (int j = 0; j < dims_[1]; ++j)
                for (int k = 0; k < dims_[2]; ++k) {
                    GridIndex gi{i + lo_[0], j + lo_[1], k + lo_[2]};
                    if (class_[flat(gi)] != static_cast<std::uint8_t>(CellClass::interior))
                        continue;
                    for (int d = 0; d < dim_; ++d)
                        for (int s : {-1, +1}) {
                            GridIndex nb = shifted(gi, d, s);
                            std::size_t f = flat(nb);
                            if (class_[f] == static_cast<std::uint8_t>(CellClass::exterior))
                                class_[f] = static_cast<std::uint8_t>(CellClass::boundary);
                        }
                }

        for (int i = 0; i < dims_[0]; ++i)
            for (int j = 0; j < dims_[1]; ++j)
                for (int k = 0; k < dims_[2]; ++k) {
                    GridIndex gi{i + lo_[0], j + lo_[1], k + lo_[2]};
                    std::size_t f = flat(gi);
                    if (class_[f] == static_cast<std::uint8_t>(CellClass::interior)) {
                        cell_id_[f] = static_cast<int>(interior_.size());
                        interior_.push_back(gi);
                    } else if (class_[f] == static_cast<std::uint8_t>(CellClass::boundary)) {
                        cell_id_[f] = static_cast<int>(boundary_.size());
                        boundary_.push_back(gi);
                    }
                }

        if (interior_.empty())
            throw std::invalid_argument("build_domain: shape has empty interior at h=" +
                                        std::to_string(h));
        // require a usable resolution: >= 10 interior cells per dimension
        for (int d = 0; d < dim_; ++d) {
            int mn = std::numeric_limits<int>::max(), mx = std::numeric_limits<int>::min();
            for (const auto& gi : interior_) {
                int v = d == 0 ? gi.i : (d == 1 ? gi.j : gi.k);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            if (mx - mn + 1 < 10)
                throw std::invalid_argument(
                    "build_domain: fewer than 10 interior cells along axis " + std::to_string(d) +
                    "; decrease h");
        }
    }

    const Shape& shape() const { return shape_; }
    int dim() const { return dim_; }
    double spacing() const { return h_; }
    std::size_t n_interior() const { return interior_.size(); }
    std::size_t n_boundary() const { return boundary_.size(); }
    const std::vector<GridIndex>& interior_cells() const { return interior_; }
    const std::vector<GridIndex>& boundary_cells() const { return boundary_; }

    CellClass cell_class(GridIndex gi) const {
        if (!in_grid(gi)) return CellClass::exterior;
        return static_cast<CellClass>(class_[flat(gi)]);
    }

    /// Dense id within the interior (or boundary) list; -1 otherwise.
    int cell_id(GridIndex gi) const { return in_grid(gi) ? cell_id_[flat(gi)] : -1; }

    Vec cell_center(GridIndex gi) const {
        return {origin_.x + gi.i * h_, origin_.y + gi.j * h_,
                dim_ == 3 ? origin_.z + gi.k * h_ : 0.0};
    }

    static GridIndex shifted(GridIndex gi, int d, int s) {
        if (d == 0) gi.i += s;
        else if (d == 1) gi.j += s;
        else gi.k += s;
        return gi;
    }

    double measure() const {
        return static_cast<double>(interior_.size()) * std::pow(h_, dim_);
    }

    /// Max over interior cell centers of the Euclidean distance to the
    /// nearest non-interior cell center (exact per-axis distance transform).
    double inradius() const {
        std::vector<double> d2 = distance_transform_sq();
        double best = 0;
        for (const auto& gi : interior_) best = std::max(best, d2[flat(gi)]);
        return h_ * std::sqrt(best);
    }

    /// Max pairwise distance between interior cell centers. Reduces to the
    /// interior surface cells; in 2D additionally to their convex hull.
    double diameter() const {
        std::vector<Vec> pts;
        for (const auto& gi : interior_) {
            bool surface = false;
            for (int d = 0; d < dim_ && !surface; ++d)
                for (int s : {-1, +1})
                    if (cell_class(shifted(gi, d, s)) != CellClass::interior) {
                        surface = true;
                        break;
                    }
            if (surface) pts.push_back(cell_center(gi));
        }
        if (dim_ == 2) pts = convex_hull_2d(std::move(pts));
        double best = 0;
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b)
                best = std::max(best, dist2(pts[a], pts[b]));
        return std::sqrt(best);
    }

  private:
    static double axis(Vec v, int d) { return d == 0 ? v.x : (d == 1 ? v.y : v.z); }

    bool in_grid(GridIndex gi) const {
        return gi.i >= lo_[0] && gi.i < lo_[0] + dims_[0] && gi.j >= lo_[1] &&
               gi.j < lo_[1] + dims_[1] && gi.k >= lo_[2] && gi.k < lo_[2] + dims_[2];
    }
    std::size_t flat(GridIndex gi) const {
        return (std::size_t(gi.i - lo_[0]) * dims_[1] + std::size_t(gi.j - lo_[1])) * dims_[2] +
               std::size_t(gi.k - lo_[2]);
    }

    // Felzenszwalb-Huttenlocher exact squared EDT, one axis at a time.
    // Sources are the non-interior cells; distances in cell units.
    std::vector<double> distance_transform_sq() const {
        const double INF = 1e18;
        std::vector<double> f(class_.size());
        for (std::size_t t = 0; t < class_.size(); ++t)
            f[t] = class_[t] == static_cast<std::uint8_t>(CellClass::interior) ? INF : 0.0;

        auto transform_line = [INF](std::vector<double>& fl, std::vector<double>& dl,
                                    std::vector<int>& v, std::vector<double>& zb) {
            const int n = static_cast<int>(fl.size());
            int kk = 0;
            v[0] = 0;
            zb[0] = -INF;
            zb[1] = INF;
            for (int q = 1; q < n; ++q) {
                double s;
                while (true) {
                    s = ((fl[q] + q * q) - (fl[v[kk]] + v[kk] * v[kk])) / (2.0 * (q - v[kk]));
                    if (s <= zb[kk]) --kk;
                    else break;
                }
                ++kk;
                v[kk] = q;
                zb[kk] = s;
                zb[kk + 1] = INF;
            }
            kk = 0;
            for (int q = 0; q < n; ++q) {
                while (zb[kk + 1] < q) ++kk;
                double dq = q - v[kk];
                dl[q] = dq * dq + fl[v[kk]];
            }
        };

        for (int d = 0; d < dim_; ++d) {
            const int n = dims_[d];
            std::vector<double> line(n), out(n);
            std::vector<int> v(n);
            std::vector<double> zb(n + 1);
            const int n1 = dims_[(d + 1) % 3], n2 = dims_[(d + 2) % 3];
            for (int a = 0; a < n1; ++a)
                for (int b = 0; b < n2; ++b) {
                    for (int q = 0; q < n; ++q) line[q] = f[flat_raw(d, q, a, b)];
                    transform_line(line, out, v, zb);
                    for (int q = 0; q < n; ++q) f[flat_raw(d, q, a, b)] = out[q];
                }
        }
        return f;
    }

    std::size_t flat_raw(int d, int q, int a, int b) const {
        int idx[3];
        idx[d] = q;
        idx[(d + 1) % 3] = a;
        idx[(d + 2) % 3] = b;
        return (std::size_t(idx[0]) * dims_[1] + std::size_t(idx[1])) * dims_[2] +
               std::size_t(idx[2]);
    }

    // Andrew monotone chain on (x, y).
    static std::vector<Vec> convex_hull_2d(std::vector<Vec> p) {
        if (p.size() < 3) return p;
        std::sort(p.begin(), p.end(), [](Vec a, Vec b) {
            return a.x < b.x || (a.x == b.x && a.y < b.y);
        });
        auto cross = [](Vec o, Vec a, Vec b) {
            return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
        };
        std::vector<Vec> hull(2 * p.size());
        std::size_t m = 0;
        for (std::size_t t = 0; t < p.size(); ++t) {
            while (m >= 2 && cross(hull[m - 2], hull[m - 1], p[t]) <= 0) --m;
            hull[m++] = p[t];
        }
        for (std::size_t t = p.size() - 1, lower = m + 1; t-- > 0;) {
            while (m >= lower && cross(hull[m - 2], hull[m - 1], p[t]) <= 0) --m;
            hull[m++] = p[t];
        }
        hull.resize(m - 1);
        return hull;
    }

    Shape shape_;
    double h_;
    int dim_;
    Vec origin_;       // cell center of index (0,0,0)
    int lo_[3];        // smallest stored index per axis
    int dims_[3];      // stored grid extent per axis
    std::vector<std::uint8_t> class_;
    std::vector<int> cell_id_;
    std::vector<GridIndex> interior_;
    std::vector<GridIndex> boundary_;
};

inline std::shared_ptr<const GridDomain> build_domain(const Shape& spec, double h) {
    return std::make_shared<const GridDomain>(spec, h);
}

/// Build from a JSON shape descriptor carrying its own "h" field.
inline std::shared_ptr<const GridDomain> build_domain(const nlohmann::json& j) {
    return build_domain(Shape::from_json(j), j.at("h").get<double>());
}

inline double measure(const GridDomain& d) { return d.measure(); }
inline double inradius(const GridDomain& d) { return d.inradius(); }
inline double diameter(const GridDomain& d) { return d.diameter(); }

}  // namespace abp
