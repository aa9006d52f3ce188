#pragma once

#include <span>
#include <vector>

namespace csa::stats {

double mean(std::span<const double> v);
double median(std::span<const double> v);

/// k-th central moment (population convention, divisor N).
double central_moment(std::span<const double> v, int k);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-square distribution.
double chi_square_sf(double chi2, int dof);

double normal_cdf(double x, double mu, double sigma);

double poisson_pmf(long k, double lambda);

struct ChiSquareResult {
    double statistic;
    int dof;
    double p_value;
};

/// Pearson goodness-of-fit against the given expected counts.
ChiSquareResult chi_square_gof(std::span<const long> observed, std::span<const double> expected);

/// One-sample Kolmogorov-Smirnov distance to Normal(mu, sigma^2).
double ks_distance_normal(std::span<const double> samples, double mu, double sigma);

/// Strictly decreasing, except that runs of exact zeros (below eps) at the
/// converged end are accepted.
bool strictly_decreasing(std::span<const double> v, double eps = 1e-14);

bool nonincreasing(std::span<const double> v);

}  // namespace csa::stats
