#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace csa {

using Json = nlohmann::ordered_json;

/// One audited check inside a verification report. The verdict must be
/// recomputable from the stored observed value, rule and threshold.
struct Criterion {
    std::string name;
    Json observed;
    std::string rule;  // e.g. "<", "|.| <", "strictly decreasing", "nonincreasing"
    Json threshold;
    bool pass = false;
};

/// Per-replicate statistic row for CSV export.
struct ReplicateStat {
    long replicate = 0;
    std::string statistic;
    double value = 0.0;
};

/// Self-contained result of one statistical verification run.
struct VerificationReport {
    std::string test;
    Json params = Json::object();
    Json observed = Json::object();
    Json reference = Json::object();
    std::vector<Criterion> criteria;
    std::vector<std::string> warnings;
    uint64_t seed = 0;
    bool pass = false;

    double runtime_ms = 0.0;                    // sidecar only, never in to_json()
    std::vector<ReplicateStat> replicate_stats; // CSV export material

    bool recompute_verdict() const;
    void finalize() { pass = recompute_verdict(); }

    /// Deterministic serialization: stable field order, no timing data.
    Json to_json() const;

    /// Timing sidecar content.
    Json meta_json() const;
};

}  // namespace csa
