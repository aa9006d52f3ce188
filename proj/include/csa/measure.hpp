#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "csa/sampler.hpp"

namespace csa {

/// Bounded measurable test function on the domain.
class TestFunction {
public:
    enum class Kind { IndicatorBox, Monomial, Cosine, Constant };

    static TestFunction indicator_box(Point lower, Point upper);
    static TestFunction monomial(std::vector<int> exponents);
    static TestFunction cosine(std::vector<double> frequency);
    static TestFunction constant(double c);

    /// Indicator of the lower half of the domain along axis 0.
    static TestFunction half_domain_indicator(const BoxDomain& box);

    double operator()(const Point& x) const;

    /// Exact sup norm over the box for every built-in kind.
    double sup_norm(const BoxDomain& box) const;

    Kind kind() const { return kind_; }
    const Point& box_lower() const { return lower_; }
    const Point& box_upper() const { return upper_; }
    const std::vector<int>& exponents() const { return exponents_; }
    const std::vector<double>& frequency() const { return frequency_; }
    double constant_value() const { return c_; }

private:
    TestFunction() = default;

    Kind kind_ = Kind::Constant;
    Point lower_, upper_;
    std::vector<int> exponents_;
    std::vector<double> frequency_;
    double c_ = 0.0;
};

/// Moment and cumulant summary of a replicated statistic.
struct SampleStatistics {
    std::vector<double> values;
    double mean = 0.0;
    double variance = 0.0;                      // population central moment m2
    std::array<double, 7> central_moments{};    // orders 0..6
    double k2 = 0.0, k3 = 0.0, k4 = 0.0;        // central-moment plug-in cumulants

    static SampleStatistics from(std::vector<double> values);
};

/// Plug-in cumulant of order 2, 3 or 4: k2 = m2, k3 = m3, k4 = m4 - 3 m2^2.
/// Refuses fewer than 30 samples.
double cumulant_estimate(std::span<const double> samples, int order);

/// alpha = integral of the limit intensity (cell-center sums; exact for
/// piecewise-constant fields on the same grid).
double quad_alpha_limit(const IntensityFamily& family, const QuadratureGrid& grid);

/// alpha(X) for the configuration described by per-cell neighbor counts.
double quad_alpha(const IntensityFamily& family, std::span<const long> counts_per_cell,
                  const QuadratureGrid& grid);

/// J(f) = (1/alpha) * integral of f * beta_limit.
double compute_J(const TestFunction& f, const IntensityFamily& family, const QuadratureGrid& grid);

/// J(f^power); power = 0 gives 1.
double compute_J_power(const TestFunction& f, int power, const IntensityFamily& family,
                       const QuadratureGrid& grid);

/// Covariance kernel G(f, g) = J(fg) - J(f) J(g).
double compute_G(const TestFunction& f, const TestFunction& g, const IntensityFamily& family,
                 const QuadratureGrid& grid);

/// n-th central moment of f(Y) where Y has density beta_limit/alpha,
/// via the binomial expansion in J(f^i). Refuses n > 6.
double compute_Un(const TestFunction& f, int n, const IntensityFamily& family,
                  const QuadratureGrid& grid);

/// E(f(X_k) | X(k-1)) for the configuration held in `prefix`, by quadrature
/// with per-cell neighbor counts against the prefix.
double conditional_mean_Jk(const TestFunction& f, const ProcessState& prefix,
                           const QuadratureGrid& grid);

/// (1/sqrt(m)) * sum_k (f(X_k) - mean_reference[k]).
double centered_scaled_sum(const TestFunction& f, const ProcessState& state,
                           std::span<const double> mean_reference);

struct BallCountResult {
    long count = 0;
    double shrunk_radius = 0.0;
    bool boundary_warning = false;  // ball extends beyond the domain
};

/// Number of stored points in the closed ball B(x, r * m^(-1/d)).
BallCountResult ball_count(const ProcessState& state, const Point& x, double r);

}  // namespace csa
