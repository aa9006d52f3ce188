#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "csa/errors.hpp"

namespace csa {

/// A point in R^d, d <= 3. Unused coordinates stay zero so that equality
/// and hashing behave uniformly across dimensions.
class Point {
public:
    Point() = default;
    explicit Point(double x) : c_{x, 0.0, 0.0}, dim_(1) {}
    Point(double x, double y) : c_{x, y, 0.0}, dim_(2) {}
    Point(double x, double y, double z) : c_{x, y, z}, dim_(3) {}

    static Point from(std::span<const double> coords);

    int dim() const { return dim_; }
    double operator[](int axis) const { return c_[static_cast<size_t>(axis)]; }
    double& operator[](int axis) { return c_[static_cast<size_t>(axis)]; }

    bool operator==(const Point&) const = default;

private:
    std::array<double, 3> c_{0.0, 0.0, 0.0};
    int dim_ = 0;
};

/// Squared Euclidean distance over the first `dim` axes.
inline double squared_distance(const Point& a, const Point& b, int dim) {
    double d2 = 0.0;
    for (int axis = 0; axis < dim; ++axis) {
        const double d = a[axis] - b[axis];
        d2 += d * d;
    }
    return d2;
}

/// Axis-aligned box [lower_0, upper_0] x ... x [lower_{d-1}, upper_{d-1}]
/// with strictly positive side lengths, 1 <= d <= 3.
class BoxDomain {
public:
    BoxDomain(std::span<const double> lower, std::span<const double> upper);

    static BoxDomain unit(int d);

    int dim() const { return dim_; }
    double lower(int axis) const { return lower_[static_cast<size_t>(axis)]; }
    double upper(int axis) const { return upper_[static_cast<size_t>(axis)]; }
    double side(int axis) const { return upper(axis) - lower(axis); }
    double volume() const;
    double min_side() const;
    double max_side() const;
    Point center() const;

    /// Closed-box membership test.
    bool contains(const Point& x) const;

    bool operator==(const BoxDomain&) const = default;

private:
    int dim_ = 0;
    std::array<double, 3> lower_{0.0, 0.0, 0.0};
    std::array<double, 3> upper_{0.0, 0.0, 0.0};
};

/// Volume of the d-dimensional unit ball, 1 <= d <= 3.
double ball_volume_coeff(int d);

/// Uniform cell grid over a box. Cells are addressed in row-major order
/// (axis 0 is the slowest index); cell centers carry the midpoint rule.
class QuadratureGrid {
public:
    QuadratureGrid(BoxDomain box, std::span<const int> resolution);

    const BoxDomain& box() const { return box_; }
    int dim() const { return box_.dim(); }
    long num_cells() const { return num_cells_; }
    double cell_volume() const { return cell_volume_; }
    int resolution(int axis) const { return res_[static_cast<size_t>(axis)]; }
    double cell_side(int axis) const { return box_.side(axis) / res_[static_cast<size_t>(axis)]; }

    Point center(long cell) const;
    std::array<int, 3> cell_coords(long cell) const;
    long cell_index(const std::array<int, 3>& coords) const;

    /// Cell containing x; coordinates on the upper boundary are clamped
    /// into the last cell so every point of the closed box maps somewhere.
    long cell_of(const Point& x) const;

    bool same_shape(const QuadratureGrid& other) const;

private:
    BoxDomain box_;
    std::array<int, 3> res_{1, 1, 1};
    long num_cells_ = 1;
    double cell_volume_ = 0.0;
};

/// Interaction radius as a function of the query point only: either a
/// positive constant or piecewise constant on a quadrature grid.
class RadiusField {
public:
    static RadiusField constant(double r);
    static RadiusField grid(std::shared_ptr<const QuadratureGrid> grid, std::vector<double> values);

    double at(const Point& x) const;
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    bool is_constant() const { return grid_ == nullptr; }
    const std::shared_ptr<const QuadratureGrid>& field_grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

private:
    RadiusField() = default;

    double r_ = 0.0;
    double r_min_ = 0.0;
    double r_max_ = 0.0;
    std::shared_ptr<const QuadratureGrid> grid_;
    std::vector<double> values_;
};

/// Spatial hash of stored point indices on a uniform cell lattice.
/// Supports counting stored points inside a closed ball while touching
/// only the cells that intersect it.
class GridIndex {
public:
    GridIndex(const BoxDomain& box, double cell_size);

    double cell_size() const { return cell_size_; }
    long size() const { return count_; }

    /// p must lie in the box (callers validate); index is the position of
    /// p in the external point array.
    void insert(const Point& p, int32_t index);

    /// |{i : ||x - pts[i]|| <= radius}| scanning only overlapping cells.
    long count_in_ball(const Point& x, double radius, std::span<const Point> pts) const;

    /// Cell coordinates of a point: floor((coords - lower) / cell_size),
    /// clamped into the valid range on the closed upper boundary.
    std::array<int64_t, 3> cell_coords(const Point& p) const;

    /// True when re-binning pts[0..n) reproduces exactly this index.
    bool consistent_with(std::span<const Point> pts) const;

private:
    uint64_t key_of(const std::array<int64_t, 3>& c) const;

    BoxDomain box_;
    double cell_size_ = 0.0;
    std::array<int64_t, 3> ncells_{1, 1, 1};
    std::unordered_map<uint64_t, std::vector<int32_t>> cells_;
    long count_ = 0;
};

}  // namespace csa
