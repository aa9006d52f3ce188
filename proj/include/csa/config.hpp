#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csa/report.hpp"
#include "csa/verify.hpp"

namespace csa {

/// One configuration violation; parsing aggregates every violation it can
/// find instead of stopping at the first.
struct ParseIssue {
    std::string where;
    std::string message;
};

/// Constant-or-grid scalar field descriptor.
struct FieldSpec {
    bool is_constant = true;
    double value = 1.0;
    std::vector<double> values;
};

struct TestFunctionSpec {
    std::string kind = "indicator_box";  // indicator_box | monomial | cosine | constant
    std::vector<double> lower, upper;
    std::vector<int> exponents;
    std::vector<double> frequency;
    double value = 0.0;
};

/// Fully resolved run configuration. Built only by parse_config, which
/// guarantees the invariants (validated family, consistent geometry).
struct RunConfig {
    int d = 1;
    std::vector<double> lower{0.0};
    std::vector<double> upper{1.0};

    bool radius_constant = true;
    double radius_value = 0.25;
    std::vector<double> radius_values;

    IntensityKind intensity_kind = IntensityKind::Constant;
    FieldSpec beta_limit;
    FieldSpec a;
    double gamma = 1.0;
    double q = 1.0;
    std::vector<FieldSpec> overrides;

    std::vector<int> resolution{10};
    long m = 100;
    long replicates = 100;
    std::optional<uint64_t> base_seed;
    int threads = 0;
    long max_attempts = kDefaultMaxAttempts;
    bool emit_birth_times = false;
    std::string output_dir = "out";

    TestFunctionSpec test_function;

    LlnParams lln;
    CltParams clt;
    PoissonParams poisson;
    TvBoundParams tv_bound;
    CoverageParams coverage;
    CumulantParams cumulants;
    OracleParams oracle;
    UniformParams uniform;

    Json to_json() const;

    std::shared_ptr<const Model> build_model() const;
    TestFunction build_test_function() const;
};

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<ParseIssue> issues;
    bool ok() const { return config.has_value() && issues.empty(); }
};

/// Parses and validates a JSON configuration. Syntax errors carry the line
/// and column; semantic violations come back as a complete list.
ParseResult parse_config(const std::string& text);
ParseResult parse_config_json(const Json& j);

/// Writes the deterministic report JSON to `path` plus a timing sidecar at
/// `path + ".meta.json"`. Refuses reports without criteria.
void emit_report(const VerificationReport& report, const std::string& path);

/// CSV with header `replicate,statistic,value` (skipped when empty).
void write_replicate_csv(const VerificationReport& report, const std::string& path);

/// CSV with header `replicate,k,x1[,x2[,x3]],attempts`; coordinates are
/// printed with 17 significant digits.
void write_points_csv(const std::vector<ProcessState>& states, const std::string& path);

/// Runs one verification test by name (uniform, lln, clt, poisson,
/// tv_bound, coverage, cumulants, oracle) with the per-test derived seed.
VerificationReport run_verification(const std::string& test, const RunConfig& config);

/// Runs one CLI command against a validated configuration. Returns the
/// process exit status: 0 when every verdict passes, 1 on a failed verdict,
/// 2 on refusals and configuration or I/O errors.
int execute(const std::string& command, const RunConfig& config);

std::vector<std::string> known_commands();

}  // namespace csa
