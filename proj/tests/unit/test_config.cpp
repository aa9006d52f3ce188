#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csa/config.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace csa;

namespace {

std::string minimal_config(const std::string& extra = "") {
    return std::string(R"({
  "domain": {"d": 1, "lower": [0.0], "upper": [1.0]},
  "radius": {"kind": "constant", "r": 0.25},
  "intensity": {"kind": "constant", "beta": 1.0},
  "grid": {"resolution": [10]},
  "m": 100,
  "replicates": 2,
  "base_seed": 12345)") +
           extra + "\n}";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fresh_dir(const std::string& name) {
    const std::string dir = "ctest_tmp/" + name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config parses") {
    const auto result = parse_config(minimal_config());
    REQUIRE(result.ok());
    CHECK(result.config->d == 1);
    CHECK(result.config->base_seed == 12345u);
    CHECK(result.config->build_model()->family.beta_max() == 1.0);
}

TEST_CASE("a vanishing intensity floor is a semantic violation") {
    const std::string text = R"({
      "domain": {"d": 1, "lower": [0.0], "upper": [1.0]},
      "radius": {"kind": "constant", "r": 0.25},
      "intensity": {"kind": "limit_plus_exp", "beta_limit": 1.0, "a": -1.0, "gamma": 1.0},
      "grid": {"resolution": [10]},
      "base_seed": 1
    })";
    const auto result = parse_config(text);
    CHECK(!result.ok());
    bool found = false;
    for (const auto& issue : result.issues) {
        if (issue.message.find("lower bound") != std::string::npos) found = true;
    }
    CHECK(found);
}

TEST_CASE("missing seed is reported") {
    const std::string text = R"({
      "domain": {"d": 1, "lower": [0.0], "upper": [1.0]},
      "radius": {"kind": "constant", "r": 0.25},
      "intensity": {"kind": "constant", "beta": 1.0},
      "grid": {"resolution": [10]}
    })";
    const auto result = parse_config(text);
    CHECK(!result.ok());
    bool found = false;
    for (const auto& issue : result.issues) {
        if (issue.message.find("seed required for reproducibility") != std::string::npos) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("violations are aggregated, not first-error-only") {
    const std::string text = R"({
      "domain": {"d": 1, "lower": [1.0], "upper": [0.0]},
      "radius": {"kind": "constant", "r": -0.25},
      "intensity": {"kind": "limit_plus_poly", "beta_limit": 1.0, "a": 0.5, "q": 0.4},
      "grid": {"resolution": [10]}
    })";
    const auto result = parse_config(text);
    CHECK(!result.ok());
    CHECK(result.issues.size() >= 3);
}

TEST_CASE("syntax errors carry the position") {
    const auto result = parse_config("{\n  \"domain\": [,]\n}");
    REQUIRE(!result.ok());
    CHECK(result.issues.front().where.find("line") != std::string::npos);
}

TEST_CASE("config round-trips through serialization") {
    const std::string text = R"({
      "domain": {"d": 2, "lower": [0.0, 0.0], "upper": [1.0, 1.0]},
      "radius": {"kind": "constant", "r": 0.1},
      "intensity": {"kind": "limit_plus_exp", "beta_limit": 1.0, "a": 1.0, "gamma": 1.0},
      "grid": {"resolution": [10, 10]},
      "m": 50,
      "replicates": 3,
      "base_seed": 99,
      "test_function": {"kind": "half_domain"},
      "verify": {"lln": {"m_list": [50, 100], "replicates": 20, "tol": 0.05}}
    })";
    const auto first = parse_config(text);
    REQUIRE(first.ok());
    const auto second = parse_config(first.config->to_json().dump());
    REQUIRE(second.ok());
    CHECK(first.config->to_json() == second.config->to_json());
}

TEST_CASE("simulate writes a deterministic points CSV") {
    const auto result = parse_config(minimal_config());
    REQUIRE(result.ok());
    RunConfig config = *result.config;
    const std::string dir_a = fresh_dir("sim_a");
    const std::string dir_b = fresh_dir("sim_b");

    config.output_dir = dir_a;
    REQUIRE(execute("simulate", config) == 0);
    config.output_dir = dir_b;
    REQUIRE(execute("simulate", config) == 0);

    const std::string a = read_file(dir_a + "/points.csv");
    CHECK(a == read_file(dir_b + "/points.csv"));
    CHECK(a.rfind("replicate,k,x1,attempts\n", 0) == 0);
    // 2 replicates x 100 points
    CHECK(std::count(a.begin(), a.end(), '\n') == 201);
}

TEST_CASE("birth-time export") {
    const auto result = parse_config(minimal_config(R"(,
  "emit_birth_times": true)"));
    REQUIRE(result.ok());
    RunConfig config = *result.config;
    config.output_dir = fresh_dir("sim_birth");
    REQUIRE(execute("simulate", config) == 0);
    const std::string birth = read_file(config.output_dir + "/birth.csv");
    CHECK(birth.rfind("replicate,k,time,rate\n", 0) == 0);
    CHECK(std::count(birth.begin(), birth.end(), '\n') == 201);
}

TEST_CASE("verify-cumulants refuses polynomial-rate families via the CLI path") {
    const std::string text = R"({
      "domain": {"d": 1, "lower": [0.0], "upper": [1.0]},
      "radius": {"kind": "constant", "r": 0.25},
      "intensity": {"kind": "limit_plus_poly", "beta_limit": 1.0, "a": 0.5, "q": 0.8},
      "grid": {"resolution": [10]},
      "base_seed": 7
    })";
    const auto result = parse_config(text);
    REQUIRE(result.ok());
    RunConfig config = *result.config;
    config.output_dir = fresh_dir("refusal");
    CHECK(execute("verify-cumulants", config) == 2);
}

TEST_CASE("verify-lln end to end with byte-identical artifacts") {
    const auto result = parse_config(minimal_config(R"(,
  "verify": {"lln": {"m_list": [50, 200], "replicates": 40, "tol": 0.05}})"));
    REQUIRE(result.ok());
    RunConfig config = *result.config;
    const std::string dir_a = fresh_dir("lln_a");
    const std::string dir_b = fresh_dir("lln_b");
    config.output_dir = dir_a;
    REQUIRE(execute("verify-lln", config) == 0);
    config.output_dir = dir_b;
    REQUIRE(execute("verify-lln", config) == 0);
    CHECK(read_file(dir_a + "/report_lln.json") == read_file(dir_b + "/report_lln.json"));
    CHECK(read_file(dir_a + "/lln_replicates.csv") == read_file(dir_b + "/lln_replicates.csv"));
    CHECK(std::filesystem::exists(dir_a + "/report_lln.json.meta.json"));
    const std::string report = read_file(dir_a + "/report_lln.json");
    CHECK(report.find("\"verdict\": \"PASS\"") != std::string::npos);
    CHECK(report.find("\"warnings\"") != std::string::npos);
}

TEST_CASE("emit_report refuses empty reports and is byte-stable") {
    VerificationReport report;
    report.test = "demo";
    const std::string dir = fresh_dir("emit");
    CHECK_THROWS_AS(emit_report(report, dir + "/r.json"), RefusalError);
    report.criteria.push_back({"always", 1.0, "<", 2.0, true});
    report.warnings.push_back("sample warning");
    report.finalize();
    emit_report(report, dir + "/r1.json");
    emit_report(report, dir + "/r2.json");
    CHECK(read_file(dir + "/r1.json") == read_file(dir + "/r2.json"));
    CHECK(read_file(dir + "/r1.json").find("sample warning") != std::string::npos);
}

TEST_CASE("unknown command is rejected") {
    const auto result = parse_config(minimal_config());
    REQUIRE(result.ok());
    RunConfig config = *result.config;
    config.output_dir = fresh_dir("unknown");
    CHECK(execute("frobnicate", config) == 2);
}

}  // TEST_SUITE
