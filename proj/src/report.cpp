#include "csa/report.hpp"

namespace csa {

bool VerificationReport::recompute_verdict() const {
    if (criteria.empty()) return false;
    for (const auto& c : criteria) {
        if (!c.pass) return false;
    }
    return true;
}

Json VerificationReport::to_json() const {
    Json j;
    j["test"] = test;
    j["params"] = params;
    j["observed"] = observed;
    j["reference"] = reference;
    Json thresholds = Json::object();
    for (const auto& c : criteria) thresholds[c.name] = c.threshold;
    j["thresholds"] = thresholds;
    Json crits = Json::array();
    for (const auto& c : criteria) {
        Json jc;
        jc["name"] = c.name;
        jc["observed"] = c.observed;
        jc["rule"] = c.rule;
        jc["threshold"] = c.threshold;
        jc["pass"] = c.pass;
        crits.push_back(jc);
    }
    j["criteria"] = crits;
    j["verdict"] = pass ? "PASS" : "FAIL";
    j["warnings"] = warnings;
    j["seed"] = seed;
    return j;
}

Json VerificationReport::meta_json() const {
    Json j;
    j["test"] = test;
    j["runtime_ms"] = runtime_ms;
    return j;
}

}  // namespace csa
