#pragma once

#include <span>
#include <vector>

#include "csa/measure.hpp"
#include "csa/report.hpp"

namespace csa {

/// Seed and parallelism shared by every verification run.
struct RunContext {
    uint64_t base_seed = 0;
    int threads = 0;  // <= 0: hardware concurrency
};

struct LlnParams {
    std::vector<long> m_list{100, 1000, 10000};
    long replicates = 200;
    double tol = 0.02;
};

enum class Centering { Calibration, LimitMean };

struct CltParams {
    long m = 2000;
    long replicates = 500;
    double variance_slack = 0.05;
    double ks_slack = 0.02;
    Centering centering = Centering::Calibration;
};

struct PoissonParams {
    Point x;
    double r = 0.5;
    long m = 5000;
    long replicates = 2000;
    double p_min = 0.01;
};

struct TvBoundParams {
    Point x;
    double r = 0.5;
    long m = 500;
    long replicates = 200;
};

struct CoverageParams {
    double delta = -1.0;  // <= 0: use delta0 / 2
    std::vector<long> m_list{100, 1000, 10000};
    long replicates = 200;
};

struct CumulantParams {
    double epsilon = 0.25;
    long m = 4000;
    long replicates = 1000;
    double slack = 0.05;
    Centering centering = Centering::Calibration;
};

struct OracleParams {
    int m = 2;
    long samples = 100000;
    double slack = 0.005;
    bool include_ar = true;
    long ar_samples = 400000;
    double ar_tol = -1.0;  // <= 0: scaled default
};

struct UniformParams {
    long m = 100;
    long replicates = 1000;
    double p_min = 0.01;
};

/// Empirical-average convergence to J(f): median absolute error must fall
/// strictly along the m ladder and beat `tol` at the top.
VerificationReport run_lln(std::shared_ptr<const Model> model, const TestFunction& f,
                           const LlnParams& p, const RunContext& ctx);

/// Distribution of the centered scaled sums against Normal(0, G(f,f)):
/// variance window plus Kolmogorov-Smirnov distance.
VerificationReport run_clt(std::shared_ptr<const Model> model, const TestFunction& f,
                           const CltParams& p, const RunContext& ctx);

/// Counts in the shrinking ball against Poisson(r^d b_d beta(x)/alpha):
/// chi-square GOF on bins {0,1,2,3,>=4} plus a mean check.
VerificationReport run_poisson(std::shared_ptr<const Model> model, const PoissonParams& p,
                               const RunContext& ctx);

/// Poisson-approximation error bound: empirical total variation of the
/// ball counts against Poisson(m p_m) must not exceed
/// m p_m^2 + mean_k sum |J_k - p_m| (+ Monte Carlo slack).
VerificationReport run_poisson_tv_bound(std::shared_ptr<const Model> model, const TvBoundParams& p,
                                        const RunContext& ctx);

/// Minimal cell-center coverage above m*delta for delta below the
/// threshold delta0 derived from the mesh recipe.
VerificationReport run_coverage(std::shared_ptr<const Model> model, const CoverageParams& p,
                                const RunContext& ctx);

/// Cumulants of the tail sums: k2 near G(f,f), k3 and k4 near zero.
/// Requires an exponential-rate family.
VerificationReport run_cumulants(std::shared_ptr<const Model> model, const TestFunction& f,
                                 const CumulantParams& p, const RunContext& ctx);

/// Total variation of sampled cell tuples against the joint-density
/// oracle table, for the exact sampler and optionally the AR sampler.
VerificationReport run_density_oracle(std::shared_ptr<const Model> model, const OracleParams& p,
                                      const RunContext& ctx);

/// Pooled chi-square uniformity check for the constant family.
VerificationReport run_uniform_gof(std::shared_ptr<const Model> model, const UniformParams& p,
                                   const RunContext& ctx);

/// Mesh count l and coverage threshold delta0 = l^-d * beta_min/beta_max
/// for the smallest l with max_side/l < r_min/4 and delta0 < 1.
struct CoverageThreshold {
    long l = 0;
    double delta0 = 0.0;
};
CoverageThreshold coverage_delta0(const Model& model);

}  // namespace csa
