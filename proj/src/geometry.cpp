#include "csa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csa {

Point Point::from(std::span<const double> coords) {
    if (coords.empty() || coords.size() > 3) {
        throw ConfigError("point dimension must be 1, 2 or 3");
    }
    Point p;
    p.dim_ = static_cast<int>(coords.size());
    for (size_t a = 0; a < coords.size(); ++a) p.c_[a] = coords[a];
    return p;
}

BoxDomain::BoxDomain(std::span<const double> lower, std::span<const double> upper) {
    if (lower.size() != upper.size() || lower.empty() || lower.size() > 3) {
        throw ConfigError("domain bounds must have matching dimension in {1,2,3}");
    }
    dim_ = static_cast<int>(lower.size());
    for (int a = 0; a < dim_; ++a) {
        if (!(lower[static_cast<size_t>(a)] < upper[static_cast<size_t>(a)])) {
            throw ConfigError("domain side lengths must be strictly positive");
        }
        lower_[static_cast<size_t>(a)] = lower[static_cast<size_t>(a)];
        upper_[static_cast<size_t>(a)] = upper[static_cast<size_t>(a)];
    }
}

BoxDomain BoxDomain::unit(int d) {
    if (d < 1 || d > 3) throw ConfigError("dimension must be 1, 2 or 3");
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{1.0, 1.0, 1.0};
    return BoxDomain(std::span<const double>(lo.data(), static_cast<size_t>(d)),
                     std::span<const double>(hi.data(), static_cast<size_t>(d)));
}

double BoxDomain::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= side(a);
    return v;
}

double BoxDomain::min_side() const {
    double s = side(0);
    for (int a = 1; a < dim_; ++a) s = std::min(s, side(a));
    return s;
}

double BoxDomain::max_side() const {
    double s = side(0);
    for (int a = 1; a < dim_; ++a) s = std::max(s, side(a));
    return s;
}

Point BoxDomain::center() const {
    Point p;
    std::array<double, 3> c{};
    for (int a = 0; a < dim_; ++a) c[static_cast<size_t>(a)] = 0.5 * (lower(a) + upper(a));
    return Point::from(std::span<const double>(c.data(), static_cast<size_t>(dim_)));
}

bool BoxDomain::contains(const Point& x) const {
    if (x.dim() != dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (x[a] < lower(a) || x[a] > upper(a)) return false;
    }
    return true;
}

double ball_volume_coeff(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return std::numbers::pi;
        case 3: return 4.0 * std::numbers::pi / 3.0;
        default: throw ConfigError("ball volume coefficient defined for d in {1,2,3}");
    }
}

QuadratureGrid::QuadratureGrid(BoxDomain box, std::span<const int> resolution) : box_(box) {
    if (static_cast<int>(resolution.size()) != box_.dim()) {
        throw ConfigError("grid resolution must have one entry per axis");
    }
    num_cells_ = 1;
    for (int a = 0; a < box_.dim(); ++a) {
        const int r = resolution[static_cast<size_t>(a)];
        if (r < 1) throw ConfigError("grid resolution must be >= 1 on every axis");
        res_[static_cast<size_t>(a)] = r;
        num_cells_ *= r;
    }
    cell_volume_ = box_.volume() / static_cast<double>(num_cells_);
}

std::array<int, 3> QuadratureGrid::cell_coords(long cell) const {
    std::array<int, 3> c{0, 0, 0};
    for (int a = box_.dim() - 1; a >= 0; --a) {
        const int r = res_[static_cast<size_t>(a)];
        c[static_cast<size_t>(a)] = static_cast<int>(cell % r);
        cell /= r;
    }
    return c;
}

long QuadratureGrid::cell_index(const std::array<int, 3>& coords) const {
    long idx = 0;
    for (int a = 0; a < box_.dim(); ++a) {
        idx = idx * res_[static_cast<size_t>(a)] + coords[static_cast<size_t>(a)];
    }
    return idx;
}

Point QuadratureGrid::center(long cell) const {
    const auto c = cell_coords(cell);
    std::array<double, 3> x{};
    for (int a = 0; a < box_.dim(); ++a) {
        x[static_cast<size_t>(a)] =
            box_.lower(a) + (c[static_cast<size_t>(a)] + 0.5) * cell_side(a);
    }
    return Point::from(std::span<const double>(x.data(), static_cast<size_t>(box_.dim())));
}

long QuadratureGrid::cell_of(const Point& x) const {
    long idx = 0;
    for (int a = 0; a < box_.dim(); ++a) {
        const int r = res_[static_cast<size_t>(a)];
        long i = static_cast<long>(std::floor((x[a] - box_.lower(a)) / cell_side(a)));
        i = std::clamp<long>(i, 0, r - 1);
        idx = idx * r + i;
    }
    return idx;
}

bool QuadratureGrid::same_shape(const QuadratureGrid& other) const {
    return box_ == other.box_ && res_ == other.res_;
}

RadiusField RadiusField::constant(double r) {
    if (!(r > 0.0)) throw ConfigError("interaction radius must be positive");
    RadiusField f;
    f.r_ = f.r_min_ = f.r_max_ = r;
    return f;
}

RadiusField RadiusField::grid(std::shared_ptr<const QuadratureGrid> grid, std::vector<double> values) {
    if (!grid) throw ConfigError("radius grid field requires a grid");
    if (static_cast<long>(values.size()) != grid->num_cells()) {
        throw ConfigError("radius grid field needs one value per grid cell");
    }
    double lo = values.front(), hi = values.front();
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo > 0.0)) throw ConfigError("interaction radius must be positive everywhere");
    RadiusField f;
    f.grid_ = std::move(grid);
    f.values_ = std::move(values);
    f.r_min_ = lo;
    f.r_max_ = hi;
    return f;
}

double RadiusField::at(const Point& x) const {
    if (!grid_) return r_;
    return values_[static_cast<size_t>(grid_->cell_of(x))];
}

GridIndex::GridIndex(const BoxDomain& box, double cell_size) : box_(box), cell_size_(cell_size) {
    if (!(cell_size > 0.0)) throw ConfigError("index cell size must be positive");
    for (int a = 0; a < box_.dim(); ++a) {
        const auto n = static_cast<int64_t>(std::ceil(box_.side(a) / cell_size));
        ncells_[static_cast<size_t>(a)] = std::max<int64_t>(n, 1);
        if (ncells_[static_cast<size_t>(a)] >= (1 << 20)) {
            throw ConfigError("index cell size too fine for the domain");
        }
    }
}

std::array<int64_t, 3> GridIndex::cell_coords(const Point& p) const {
    std::array<int64_t, 3> c{0, 0, 0};
    for (int a = 0; a < box_.dim(); ++a) {
        auto i = static_cast<int64_t>(std::floor((p[a] - box_.lower(a)) / cell_size_));
        c[static_cast<size_t>(a)] = std::clamp<int64_t>(i, 0, ncells_[static_cast<size_t>(a)] - 1);
    }
    return c;
}

uint64_t GridIndex::key_of(const std::array<int64_t, 3>& c) const {
    return (static_cast<uint64_t>(c[0]) << 42) | (static_cast<uint64_t>(c[1]) << 21) |
           static_cast<uint64_t>(c[2]);
}

void GridIndex::insert(const Point& p, int32_t index) {
    cells_[key_of(cell_coords(p))].push_back(index);
    ++count_;
}

long GridIndex::count_in_ball(const Point& x, double radius, std::span<const Point> pts) const {
    const int dim = box_.dim();
    const double r2 = radius * radius;
    std::array<int64_t, 3> lo{0, 0, 0};
    std::array<int64_t, 3> hi{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        auto l = static_cast<int64_t>(std::floor((x[a] - radius - box_.lower(a)) / cell_size_));
        auto h = static_cast<int64_t>(std::floor((x[a] + radius - box_.lower(a)) / cell_size_));
        lo[static_cast<size_t>(a)] = std::clamp<int64_t>(l, 0, ncells_[static_cast<size_t>(a)] - 1);
        hi[static_cast<size_t>(a)] = std::clamp<int64_t>(h, 0, ncells_[static_cast<size_t>(a)] - 1);
    }
    long count = 0;
    std::array<int64_t, 3> c{0, 0, 0};
    for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) {
        for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1]) {
            for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2]) {
                const auto it = cells_.find(key_of(c));
                if (it == cells_.end()) continue;
                for (const int32_t i : it->second) {
                    if (squared_distance(x, pts[static_cast<size_t>(i)], dim) <= r2) ++count;
                }
            }
        }
    }
    return count;
}

bool GridIndex::consistent_with(std::span<const Point> pts) const {
    if (static_cast<long>(pts.size()) != count_) return false;
    long listed = 0;
    for (const auto& [key, list] : cells_) listed += static_cast<long>(list.size());
    if (listed != count_) return false;
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto it = cells_.find(key_of(cell_coords(pts[i])));
        if (it == cells_.end()) return false;
        const auto& list = it->second;
        if (std::find(list.begin(), list.end(), static_cast<int32_t>(i)) == list.end()) return false;
    }
    return true;
}

}  // namespace csa
