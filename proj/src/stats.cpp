#include "csa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csa/errors.hpp"

namespace csa::stats {

double mean(std::span<const double> v) {
    if (v.empty()) throw RefusalError("mean of an empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median(std::span<const double> v) {
    if (v.empty()) throw RefusalError("median of an empty sample");
    std::vector<double> c(v.begin(), v.end());
    std::sort(c.begin(), c.end());
    const size_t n = c.size();
    return n % 2 == 1 ? c[n / 2] : 0.5 * (c[n / 2 - 1] + c[n / 2]);
}

double central_moment(std::span<const double> v, int k) {
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += std::pow(x - mu, k);
    return s / static_cast<double>(v.size());
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw RefusalError("invalid incomplete-gamma arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double chi2, int dof) {
    if (dof < 1) throw RefusalError("chi-square needs at least one degree of freedom");
    return regularized_gamma_q(0.5 * dof, 0.5 * chi2);
}

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

double poisson_pmf(long k, double lambda) {
    if (k < 0) return 0.0;
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(lambda) - lambda -
                    std::lgamma(static_cast<double>(k) + 1.0));
}

ChiSquareResult chi_square_gof(std::span<const long> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.size() < 2) {
        throw RefusalError("chi-square needs matching observed/expected bins (>= 2)");
    }
    double stat = 0.0;
    for (size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw RefusalError("chi-square expected counts must be positive");
        const double d = static_cast<double>(observed[i]) - expected[i];
        stat += d * d / expected[i];
    }
    const int dof = static_cast<int>(observed.size()) - 1;
    return {stat, dof, chi_square_sf(stat, dof)};
}

double ks_distance_normal(std::span<const double> samples, double mu, double sigma) {
    if (samples.empty()) throw RefusalError("KS distance of an empty sample");
    std::vector<double> c(samples.begin(), samples.end());
    std::sort(c.begin(), c.end());
    const auto n = static_cast<double>(c.size());
    double d = 0.0;
    for (size_t i = 0; i < c.size(); ++i) {
        const double f = normal_cdf(c[i], mu, sigma);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

bool strictly_decreasing(std::span<const double> v, double eps) {
    for (size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] < v[i]) continue;
        if (std::abs(v[i]) <= eps && std::abs(v[i + 1]) <= eps) continue;
        return false;
    }
    return true;
}

bool nonincreasing(std::span<const double> v) {
    for (size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] > v[i]) return false;
    }
    return true;
}

}  // namespace csa::stats
