#include "csa/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csa {

namespace {

double ipow(double x, int n) {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= x;
    return v;
}

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

void require_quadrature_grid(const IntensityFamily& family, const QuadratureGrid& grid) {
    const auto& fg = family.field_grid();
    if (fg && !fg->same_shape(grid)) {
        throw ConfigError("quadrature grid does not match the intensity field grid");
    }
}

}  // namespace

TestFunction TestFunction::indicator_box(Point lower, Point upper) {
    if (lower.dim() != upper.dim()) throw ConfigError("indicator box bounds must match in dimension");
    TestFunction f;
    f.kind_ = Kind::IndicatorBox;
    f.lower_ = lower;
    f.upper_ = upper;
    return f;
}

TestFunction TestFunction::monomial(std::vector<int> exponents) {
    if (exponents.empty() || exponents.size() > 3) {
        throw ConfigError("monomial exponents must have dimension 1..3");
    }
    for (int e : exponents) {
        if (e < 0) throw ConfigError("monomial exponents must be nonnegative");
    }
    TestFunction f;
    f.kind_ = Kind::Monomial;
    f.exponents_ = std::move(exponents);
    return f;
}

TestFunction TestFunction::cosine(std::vector<double> frequency) {
    if (frequency.empty() || frequency.size() > 3) {
        throw ConfigError("cosine frequency must have dimension 1..3");
    }
    TestFunction f;
    f.kind_ = Kind::Cosine;
    f.frequency_ = std::move(frequency);
    return f;
}

TestFunction TestFunction::constant(double c) {
    TestFunction f;
    f.kind_ = Kind::Constant;
    f.c_ = c;
    return f;
}

TestFunction TestFunction::half_domain_indicator(const BoxDomain& box) {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    for (int a = 0; a < box.dim(); ++a) {
        lo[static_cast<size_t>(a)] = box.lower(a);
        hi[static_cast<size_t>(a)] = box.upper(a);
    }
    hi[0] = box.lower(0) + 0.5 * box.side(0);
    const auto d = static_cast<size_t>(box.dim());
    return indicator_box(Point::from(std::span<const double>(lo.data(), d)),
                         Point::from(std::span<const double>(hi.data(), d)));
}

double TestFunction::operator()(const Point& x) const {
    switch (kind_) {
        case Kind::IndicatorBox:
            for (int a = 0; a < x.dim(); ++a) {
                if (x[a] < lower_[a] || x[a] > upper_[a]) return 0.0;
            }
            return 1.0;
        case Kind::Monomial: {
            double v = 1.0;
            for (size_t a = 0; a < exponents_.size(); ++a) {
                v *= ipow(x[static_cast<int>(a)], exponents_[a]);
            }
            return v;
        }
        case Kind::Cosine: {
            double s = 0.0;
            for (size_t a = 0; a < frequency_.size(); ++a) s += frequency_[a] * x[static_cast<int>(a)];
            return std::cos(s);
        }
        case Kind::Constant:
            return c_;
    }
    return 0.0;
}

double TestFunction::sup_norm(const BoxDomain& box) const {
    switch (kind_) {
        case Kind::IndicatorBox: {
            for (int a = 0; a < box.dim(); ++a) {
                if (lower_[a] > box.upper(a) || upper_[a] < box.lower(a)) return 0.0;
            }
            return 1.0;
        }
        case Kind::Monomial: {
            double v = 1.0;
            for (size_t a = 0; a < exponents_.size(); ++a) {
                const int axis = static_cast<int>(a);
                const double m = std::max(std::abs(box.lower(axis)), std::abs(box.upper(axis)));
                v *= ipow(m, exponents_[a]);
            }
            return v;
        }
        case Kind::Cosine: {
            double smin = 0.0, smax = 0.0;
            for (size_t a = 0; a < frequency_.size(); ++a) {
                const int axis = static_cast<int>(a);
                const double w = frequency_[a];
                smin += std::min(w * box.lower(axis), w * box.upper(axis));
                smax += std::max(w * box.lower(axis), w * box.upper(axis));
            }
            // |cos| attains 1 iff [smin, smax] contains a multiple of pi.
            if (std::floor(smax / std::numbers::pi) >= std::ceil(smin / std::numbers::pi)) return 1.0;
            return std::max(std::abs(std::cos(smin)), std::abs(std::cos(smax)));
        }
        case Kind::Constant:
            return std::abs(c_);
    }
    return 0.0;
}

SampleStatistics SampleStatistics::from(std::vector<double> values) {
    if (values.empty()) throw RefusalError("statistics of an empty ensemble");
    SampleStatistics s;
    s.values = std::move(values);
    const auto n = static_cast<double>(s.values.size());
    double sum = 0.0;
    for (double v : s.values) sum += v;
    s.mean = sum / n;
    for (int k = 0; k <= 6; ++k) {
        double acc = 0.0;
        for (double v : s.values) acc += ipow(v - s.mean, k);
        s.central_moments[static_cast<size_t>(k)] = acc / n;
    }
    s.variance = s.central_moments[2];
    s.k2 = s.central_moments[2];
    s.k3 = s.central_moments[3];
    s.k4 = s.central_moments[4] - 3.0 * s.central_moments[2] * s.central_moments[2];
    return s;
}

double cumulant_estimate(std::span<const double> samples, int order) {
    if (samples.size() < 30) {
        throw RefusalError("cumulant estimation needs at least 30 samples");
    }
    SampleStatistics s = SampleStatistics::from(std::vector<double>(samples.begin(), samples.end()));
    switch (order) {
        case 2: return s.k2;
        case 3: return s.k3;
        case 4: return s.k4;
        default: throw RefusalError("cumulant order must be 2, 3 or 4");
    }
}

double quad_alpha_limit(const IntensityFamily& family, const QuadratureGrid& grid) {
    require_quadrature_grid(family, grid);
    const double vol = grid.cell_volume();
    double a = 0.0;
    for (long c = 0; c < grid.num_cells(); ++c) a += family.beta_limit_cell(c) * vol;
    return a;
}

double quad_alpha(const IntensityFamily& family, std::span<const long> counts_per_cell,
                  const QuadratureGrid& grid) {
    require_quadrature_grid(family, grid);
    if (static_cast<long>(counts_per_cell.size()) != grid.num_cells()) {
        throw ConfigError("per-cell counts must have one entry per grid cell");
    }
    const double vol = grid.cell_volume();
    double a = 0.0;
    for (long c = 0; c < grid.num_cells(); ++c) {
        a += family.beta_n_cell(c, counts_per_cell[static_cast<size_t>(c)]) * vol;
    }
    return a;
}

double compute_J_power(const TestFunction& f, int power, const IntensityFamily& family,
                       const QuadratureGrid& grid) {
    require_quadrature_grid(family, grid);
    if (power == 0) return 1.0;
    const double vol = grid.cell_volume();
    double num = 0.0, den = 0.0;
    for (long c = 0; c < grid.num_cells(); ++c) {
        const double w = family.beta_limit_cell(c) * vol;
        den += w;
        num += ipow(f(grid.center(c)), power) * w;
    }
    return num / den;
}

double compute_J(const TestFunction& f, const IntensityFamily& family, const QuadratureGrid& grid) {
    return compute_J_power(f, 1, family, grid);
}

double compute_G(const TestFunction& f, const TestFunction& g, const IntensityFamily& family,
                 const QuadratureGrid& grid) {
    require_quadrature_grid(family, grid);
    const double vol = grid.cell_volume();
    double num = 0.0, den = 0.0;
    for (long c = 0; c < grid.num_cells(); ++c) {
        const double w = family.beta_limit_cell(c) * vol;
        const Point center = grid.center(c);
        den += w;
        num += f(center) * g(center) * w;
    }
    return num / den - compute_J(f, family, grid) * compute_J(g, family, grid);
}

double compute_Un(const TestFunction& f, int n, const IntensityFamily& family,
                  const QuadratureGrid& grid) {
    if (n < 1) throw RefusalError("central moment order must be >= 1");
    if (n > 6) throw RefusalError("central moments are capped at order 6");
    const double jf = compute_J(f, family, grid);
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double sign = (n - i) % 2 == 0 ? 1.0 : -1.0;
        sum += sign * binom(n, i) * compute_J_power(f, i, family, grid) * ipow(jf, n - i);
    }
    return sum;
}

double conditional_mean_Jk(const TestFunction& f, const ProcessState& prefix,
                           const QuadratureGrid& grid) {
    const IntensityFamily& family = prefix.model().family;
    require_quadrature_grid(family, grid);
    const double vol = grid.cell_volume();
    double num = 0.0, den = 0.0;
    for (long c = 0; c < grid.num_cells(); ++c) {
        const Point center = grid.center(c);
        const long n = prefix.neighbor_count(center);
        const double w = family.beta_n_cell(c, n) * vol;
        den += w;
        num += f(center) * w;
    }
    return num / den;
}

double centered_scaled_sum(const TestFunction& f, const ProcessState& state,
                           std::span<const double> mean_reference) {
    const long m = state.size();
    if (static_cast<long>(mean_reference.size()) != m) {
        throw ConfigError("mean reference must supply one value per stored point");
    }
    if (m == 0) return 0.0;
    double sum = 0.0;
    for (long k = 0; k < m; ++k) sum += f(state.point(k)) - mean_reference[static_cast<size_t>(k)];
    return sum / std::sqrt(static_cast<double>(m));
}

BallCountResult ball_count(const ProcessState& state, const Point& x, double r) {
    const long m = state.size();
    if (m < 1) throw RefusalError("ball count needs at least one stored point");
    if (!(r > 0.0)) throw RefusalError("ball count radius must be positive");
    const BoxDomain& box = state.model().domain;
    BallCountResult res;
    res.shrunk_radius = r * std::pow(static_cast<double>(m), -1.0 / box.dim());
    for (int a = 0; a < box.dim(); ++a) {
        if (x[a] - res.shrunk_radius < box.lower(a) || x[a] + res.shrunk_radius > box.upper(a)) {
            res.boundary_warning = true;
        }
    }
    res.count = state.index().count_in_ball(x, res.shrunk_radius, state.points());
    return res;
}

}  // namespace csa
