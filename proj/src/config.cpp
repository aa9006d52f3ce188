#include "csa/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

namespace csa {

namespace {

constexpr uint64_t kTagUniform = 101;
constexpr uint64_t kTagLln = 102;
constexpr uint64_t kTagClt = 103;
constexpr uint64_t kTagPoisson = 104;
constexpr uint64_t kTagTvBound = 105;
constexpr uint64_t kTagCoverage = 106;
constexpr uint64_t kTagCumulants = 107;
constexpr uint64_t kTagOracle = 108;

using IssueSink = std::function<void(const std::string&, const std::string&)>;

bool get_number(const Json& j, const char* key, double& out, const std::string& where,
                const IssueSink& add, bool required = false) {
    if (!j.contains(key)) {
        if (required) add(where + "." + key, "required number is missing");
        return false;
    }
    if (!j.at(key).is_number()) {
        add(where + "." + key, "must be a number");
        return false;
    }
    out = j.at(key).get<double>();
    return true;
}

bool get_integer(const Json& j, const char* key, long& out, const std::string& where,
                 const IssueSink& add, bool required = false) {
    if (!j.contains(key)) {
        if (required) add(where + "." + key, "required integer is missing");
        return false;
    }
    if (!j.at(key).is_number_integer()) {
        add(where + "." + key, "must be an integer");
        return false;
    }
    out = j.at(key).get<long>();
    return true;
}

bool get_number_array(const Json& j, const char* key, std::vector<double>& out,
                      const std::string& where, const IssueSink& add, bool required = false) {
    if (!j.contains(key)) {
        if (required) add(where + "." + key, "required array is missing");
        return false;
    }
    if (!j.at(key).is_array()) {
        add(where + "." + key, "must be an array of numbers");
        return false;
    }
    out.clear();
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) {
            add(where + "." + key, "must contain numbers only");
            return false;
        }
        out.push_back(v.get<double>());
    }
    return true;
}

bool get_integer_array(const Json& j, const char* key, std::vector<long>& out,
                       const std::string& where, const IssueSink& add) {
    if (!j.contains(key)) return false;
    if (!j.at(key).is_array()) {
        add(where + "." + key, "must be an array of integers");
        return false;
    }
    out.clear();
    for (const auto& v : j.at(key)) {
        if (!v.is_number_integer()) {
            add(where + "." + key, "must contain integers only");
            return false;
        }
        out.push_back(v.get<long>());
    }
    return true;
}

FieldSpec parse_field(const Json& v, long cells, const std::string& where, const IssueSink& add) {
    FieldSpec f;
    if (v.is_number()) {
        f.is_constant = true;
        f.value = v.get<double>();
        return f;
    }
    if (v.is_object() && v.contains("values") && v.at("values").is_array()) {
        f.is_constant = false;
        for (const auto& x : v.at("values")) {
            if (!x.is_number()) {
                add(where, "field values must be numbers");
                return f;
            }
            f.values.push_back(x.get<double>());
        }
        if (cells > 0 && static_cast<long>(f.values.size()) != cells) {
            add(where, "field needs one value per grid cell (" + std::to_string(cells) +
                           "), got " + std::to_string(f.values.size()));
        }
        return f;
    }
    add(where, "field must be a number or an object {\"values\": [...]}");
    return f;
}

Json field_to_json(const FieldSpec& f) {
    if (f.is_constant) return Json(f.value);
    Json j;
    j["values"] = f.values;
    return j;
}

Point point_from(const std::vector<double>& v) {
    return Point::from(std::span<const double>(v.data(), v.size()));
}

std::vector<double> point_to_vector(const Point& p) {
    std::vector<double> v(static_cast<size_t>(p.dim()));
    for (int a = 0; a < p.dim(); ++a) v[static_cast<size_t>(a)] = p[a];
    return v;
}

void format_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

int64_t now_unix_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

ParseResult parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        ParseResult res;
        res.issues.push_back({"line " + std::to_string(line) + ", column " + std::to_string(col),
                              std::string("JSON syntax error: ") + e.what()});
        return res;
    }
    return parse_config_json(j);
}

ParseResult parse_config_json(const Json& j) {
    ParseResult res;
    RunConfig c;
    const IssueSink add = [&](const std::string& where, const std::string& message) {
        res.issues.push_back({where, message});
    };

    if (!j.is_object()) {
        add("$", "configuration must be a JSON object");
        return res;
    }

    // --- domain ------------------------------------------------------
    bool domain_ok = false;
    if (!j.contains("domain") || !j.at("domain").is_object()) {
        add("domain", "required object {d, lower, upper}");
    } else {
        const auto& dj = j.at("domain");
        long d = 0;
        if (get_integer(dj, "d", d, "domain", add, true)) {
            if (d < 1 || d > 3) {
                add("domain.d", "dimension must be 1, 2 or 3");
            } else {
                c.d = static_cast<int>(d);
                domain_ok = get_number_array(dj, "lower", c.lower, "domain", add, true) &&
                            get_number_array(dj, "upper", c.upper, "domain", add, true);
                if (domain_ok) {
                    if (static_cast<int>(c.lower.size()) != c.d ||
                        static_cast<int>(c.upper.size()) != c.d) {
                        add("domain", "lower/upper must have d entries");
                        domain_ok = false;
                    } else {
                        for (int a = 0; a < c.d; ++a) {
                            if (!(c.lower[static_cast<size_t>(a)] < c.upper[static_cast<size_t>(a)])) {
                                add("domain", "lower must be strictly below upper on axis " +
                                                  std::to_string(a));
                                domain_ok = false;
                            }
                        }
                    }
                }
            }
        }
    }

    // --- grid --------------------------------------------------------
    long cells = 0;
    bool grid_ok = false;
    if (!j.contains("grid") || !j.at("grid").is_object()) {
        add("grid", "required object {resolution}");
    } else {
        std::vector<long> resolution;
        if (get_integer_array(j.at("grid"), "resolution", resolution, "grid", add)) {
            if (domain_ok && static_cast<int>(resolution.size()) != c.d) {
                add("grid.resolution", "needs one entry per axis");
            } else {
                c.resolution.clear();
                cells = 1;
                grid_ok = true;
                for (long r : resolution) {
                    if (r < 1) {
                        add("grid.resolution", "entries must be >= 1");
                        grid_ok = false;
                        break;
                    }
                    c.resolution.push_back(static_cast<int>(r));
                    cells *= r;
                }
                if (!grid_ok) cells = 0;
            }
        } else {
            add("grid.resolution", "required array of integers");
        }
    }

    // --- radius ------------------------------------------------------
    if (!j.contains("radius") || !j.at("radius").is_object()) {
        add("radius", "required object {kind, ...}");
    } else {
        const auto& rj = j.at("radius");
        const std::string kind = rj.contains("kind") && rj.at("kind").is_string()
                                     ? rj.at("kind").get<std::string>()
                                     : "constant";
        if (kind == "constant") {
            c.radius_constant = true;
            double r = 0.0;
            if (get_number(rj, "r", r, "radius", add, true)) {
                if (!(r > 0.0)) {
                    add("radius.r", "interaction radius must be positive");
                } else {
                    c.radius_value = r;
                }
            }
        } else if (kind == "grid") {
            c.radius_constant = false;
            if (get_number_array(rj, "values", c.radius_values, "radius", add, true)) {
                if (cells > 0 && static_cast<long>(c.radius_values.size()) != cells) {
                    add("radius.values", "needs one value per grid cell");
                }
                for (double v : c.radius_values) {
                    if (!(v > 0.0)) {
                        add("radius.values", "interaction radius must be positive everywhere");
                        break;
                    }
                }
            }
        } else {
            add("radius.kind", "must be \"constant\" or \"grid\"");
        }
    }

    // --- intensity ---------------------------------------------------
    bool family_structural_ok = false;
    if (!j.contains("intensity") || !j.at("intensity").is_object()) {
        add("intensity", "required object {kind, ...}");
    } else {
        const auto& ij = j.at("intensity");
        const std::string kind = ij.contains("kind") && ij.at("kind").is_string()
                                     ? ij.at("kind").get<std::string>()
                                     : "";
        family_structural_ok = true;
        if (kind == "constant") {
            c.intensity_kind = IntensityKind::Constant;
            double beta = 0.0;
            if (get_number(ij, "beta", beta, "intensity", add, true)) {
                c.beta_limit = FieldSpec{true, beta, {}};
            } else {
                family_structural_ok = false;
            }
        } else if (kind == "limit_plus_exp" || kind == "limit_plus_poly") {
            c.intensity_kind = kind == "limit_plus_exp" ? IntensityKind::LimitPlusExp
                                                        : IntensityKind::LimitPlusPoly;
            if (ij.contains("beta_limit")) {
                c.beta_limit = parse_field(ij.at("beta_limit"), cells, "intensity.beta_limit", add);
            } else {
                add("intensity.beta_limit", "required field");
                family_structural_ok = false;
            }
            if (ij.contains("a")) {
                c.a = parse_field(ij.at("a"), cells, "intensity.a", add);
            } else {
                add("intensity.a", "required field");
                family_structural_ok = false;
            }
            if (kind == "limit_plus_exp") {
                if (!get_number(ij, "gamma", c.gamma, "intensity", add, true)) {
                    family_structural_ok = false;
                }
            } else {
                if (!get_number(ij, "q", c.q, "intensity", add, true)) {
                    family_structural_ok = false;
                }
            }
        } else if (kind == "finite_perturbation") {
            c.intensity_kind = IntensityKind::FinitePerturbation;
            if (ij.contains("beta_limit")) {
                c.beta_limit = parse_field(ij.at("beta_limit"), cells, "intensity.beta_limit", add);
            } else {
                add("intensity.beta_limit", "required field");
                family_structural_ok = false;
            }
            if (ij.contains("overrides") && ij.at("overrides").is_array()) {
                long i = 0;
                for (const auto& o : ij.at("overrides")) {
                    c.overrides.push_back(
                        parse_field(o, cells, "intensity.overrides[" + std::to_string(i) + "]", add));
                    ++i;
                }
            } else {
                add("intensity.overrides", "required array of fields");
                family_structural_ok = false;
            }
        } else {
            add("intensity.kind",
                "must be one of constant, limit_plus_exp, limit_plus_poly, finite_perturbation");
            family_structural_ok = false;
        }
    }

    // --- scalars -----------------------------------------------------
    long m = c.m;
    if (get_integer(j, "m", m, "$", add)) {
        if (m < 0) add("m", "must be >= 0");
        else c.m = m;
    }
    long replicates = c.replicates;
    if (get_integer(j, "replicates", replicates, "$", add)) {
        if (replicates < 1) add("replicates", "must be >= 1");
        else c.replicates = replicates;
    }
    if (!j.contains("base_seed")) {
        add("base_seed", "seed required for reproducibility");
    } else if (!j.at("base_seed").is_number_integer() || j.at("base_seed").get<int64_t>() < 0) {
        add("base_seed", "must be a nonnegative integer");
    } else {
        c.base_seed = j.at("base_seed").get<uint64_t>();
    }
    long threads = 0;
    if (get_integer(j, "threads", threads, "$", add)) {
        if (threads < 0) add("threads", "must be >= 0 (0 = all cores)");
        else c.threads = static_cast<int>(threads);
    }
    long max_attempts = c.max_attempts;
    if (get_integer(j, "max_attempts", max_attempts, "$", add)) {
        if (max_attempts < 1) add("max_attempts", "must be >= 1");
        else c.max_attempts = max_attempts;
    }
    if (j.contains("emit_birth_times")) {
        if (!j.at("emit_birth_times").is_boolean()) add("emit_birth_times", "must be a boolean");
        else c.emit_birth_times = j.at("emit_birth_times").get<bool>();
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) add("output_dir", "must be a string");
        else c.output_dir = j.at("output_dir").get<std::string>();
    }

    // --- test function -------------------------------------------------
    if (j.contains("test_function")) {
        if (!j.at("test_function").is_object()) {
            add("test_function", "must be an object");
        } else {
            const auto& fj = j.at("test_function");
            const std::string kind = fj.contains("kind") && fj.at("kind").is_string()
                                         ? fj.at("kind").get<std::string>()
                                         : "";
            if (kind == "indicator_box") {
                c.test_function.kind = "indicator_box";
                get_number_array(fj, "lower", c.test_function.lower, "test_function", add, true);
                get_number_array(fj, "upper", c.test_function.upper, "test_function", add, true);
                if (domain_ok && (static_cast<int>(c.test_function.lower.size()) != c.d ||
                                  static_cast<int>(c.test_function.upper.size()) != c.d)) {
                    add("test_function", "indicator bounds must have d entries");
                }
            } else if (kind == "half_domain") {
                // sugar: expands to the explicit indicator of the lower half
                c.test_function.kind = "indicator_box";
                if (domain_ok) {
                    c.test_function.lower = c.lower;
                    c.test_function.upper = c.upper;
                    c.test_function.upper[0] = c.lower[0] + 0.5 * (c.upper[0] - c.lower[0]);
                }
            } else if (kind == "monomial") {
                c.test_function.kind = "monomial";
                std::vector<long> e;
                if (get_integer_array(fj, "exponents", e, "test_function", add)) {
                    c.test_function.exponents.assign(e.begin(), e.end());
                    for (long x : e) {
                        if (x < 0) add("test_function.exponents", "must be nonnegative");
                    }
                } else {
                    add("test_function.exponents", "required array of integers");
                }
            } else if (kind == "cosine") {
                c.test_function.kind = "cosine";
                get_number_array(fj, "frequency", c.test_function.frequency, "test_function", add,
                                 true);
            } else if (kind == "constant") {
                c.test_function.kind = "constant";
                get_number(fj, "value", c.test_function.value, "test_function", add, true);
            } else {
                add("test_function.kind",
                    "must be one of indicator_box, half_domain, monomial, cosine, constant");
            }
        }
    } else if (domain_ok) {
        // default: indicator of the lower half of the domain along axis 0
        c.test_function.kind = "indicator_box";
        c.test_function.lower = c.lower;
        c.test_function.upper = c.upper;
        c.test_function.upper[0] = c.lower[0] + 0.5 * (c.upper[0] - c.lower[0]);
    }

    // --- verify parameter blocks --------------------------------------
    std::vector<double> center(static_cast<size_t>(c.d), 0.0);
    if (domain_ok) {
        for (int a = 0; a < c.d; ++a) {
            center[static_cast<size_t>(a)] =
                0.5 * (c.lower[static_cast<size_t>(a)] + c.upper[static_cast<size_t>(a)]);
        }
        c.poisson.x = point_from(center);
        c.tv_bound.x = point_from(center);
    }
    const Json verify = j.contains("verify") && j.at("verify").is_object() ? j.at("verify")
                                                                           : Json::object();
    auto parse_point_param = [&](const Json& block, Point& target, const std::string& where) {
        std::vector<double> xv;
        if (get_number_array(block, "x", xv, where, add)) {
            if (static_cast<int>(xv.size()) != c.d) {
                add(where + ".x", "must have d entries");
            } else {
                target = point_from(xv);
                if (domain_ok) {
                    for (int axis = 0; axis < c.d; ++axis) {
                        if (target[axis] < c.lower[static_cast<size_t>(axis)] ||
                            target[axis] > c.upper[static_cast<size_t>(axis)]) {
                            add(where + ".x", "must lie inside the domain");
                            break;
                        }
                    }
                }
            }
        }
    };
    auto parse_m_list = [&](const Json& block, std::vector<long>& target, const std::string& where) {
        std::vector<long> ml;
        if (get_integer_array(block, "m_list", ml, where, add)) {
            if (ml.empty()) {
                add(where + ".m_list", "must be nonempty");
                return;
            }
            for (size_t i = 0; i + 1 < ml.size(); ++i) {
                if (!(ml[i] < ml[i + 1])) {
                    add(where + ".m_list", "must be strictly increasing");
                    return;
                }
            }
            for (long v : ml) {
                if (v < 1) {
                    add(where + ".m_list", "entries must be >= 1");
                    return;
                }
            }
            target = ml;
        }
    };
    auto parse_centering = [&](const Json& block, Centering& target, const std::string& where) {
        if (!block.contains("centering")) return;
        if (!block.at("centering").is_string()) {
            add(where + ".centering", "must be \"calibration\" or \"limit_mean\"");
            return;
        }
        const std::string s = block.at("centering").get<std::string>();
        if (s == "calibration") target = Centering::Calibration;
        else if (s == "limit_mean") target = Centering::LimitMean;
        else add(where + ".centering", "must be \"calibration\" or \"limit_mean\"");
    };

    if (verify.contains("lln") && verify.at("lln").is_object()) {
        const auto& b = verify.at("lln");
        parse_m_list(b, c.lln.m_list, "verify.lln");
        get_integer(b, "replicates", c.lln.replicates, "verify.lln", add);
        get_number(b, "tol", c.lln.tol, "verify.lln", add);
    }
    if (verify.contains("clt") && verify.at("clt").is_object()) {
        const auto& b = verify.at("clt");
        get_integer(b, "m", c.clt.m, "verify.clt", add);
        get_integer(b, "replicates", c.clt.replicates, "verify.clt", add);
        get_number(b, "variance_slack", c.clt.variance_slack, "verify.clt", add);
        get_number(b, "ks_slack", c.clt.ks_slack, "verify.clt", add);
        parse_centering(b, c.clt.centering, "verify.clt");
    }
    if (verify.contains("poisson") && verify.at("poisson").is_object()) {
        const auto& b = verify.at("poisson");
        parse_point_param(b, c.poisson.x, "verify.poisson");
        get_number(b, "r", c.poisson.r, "verify.poisson", add);
        get_integer(b, "m", c.poisson.m, "verify.poisson", add);
        get_integer(b, "replicates", c.poisson.replicates, "verify.poisson", add);
        get_number(b, "p_min", c.poisson.p_min, "verify.poisson", add);
    }
    if (verify.contains("tv_bound") && verify.at("tv_bound").is_object()) {
        const auto& b = verify.at("tv_bound");
        parse_point_param(b, c.tv_bound.x, "verify.tv_bound");
        get_number(b, "r", c.tv_bound.r, "verify.tv_bound", add);
        get_integer(b, "m", c.tv_bound.m, "verify.tv_bound", add);
        if (c.tv_bound.m > 500) add("verify.tv_bound.m", "limited to m <= 500 (cost guard)");
        get_integer(b, "replicates", c.tv_bound.replicates, "verify.tv_bound", add);
    }
    if (verify.contains("coverage") && verify.at("coverage").is_object()) {
        const auto& b = verify.at("coverage");
        if (b.contains("delta") && !b.at("delta").is_null()) {
            get_number(b, "delta", c.coverage.delta, "verify.coverage", add);
            if (!(c.coverage.delta > 0.0)) add("verify.coverage.delta", "must be positive");
        }
        parse_m_list(b, c.coverage.m_list, "verify.coverage");
        get_integer(b, "replicates", c.coverage.replicates, "verify.coverage", add);
    }
    if (verify.contains("cumulants") && verify.at("cumulants").is_object()) {
        const auto& b = verify.at("cumulants");
        get_number(b, "epsilon", c.cumulants.epsilon, "verify.cumulants", add);
        if (!(c.cumulants.epsilon > 0.0 && c.cumulants.epsilon < 0.5)) {
            add("verify.cumulants.epsilon", "must lie strictly between 0 and 1/2");
        }
        get_integer(b, "m", c.cumulants.m, "verify.cumulants", add);
        get_integer(b, "replicates", c.cumulants.replicates, "verify.cumulants", add);
        get_number(b, "slack", c.cumulants.slack, "verify.cumulants", add);
        parse_centering(b, c.cumulants.centering, "verify.cumulants");
    }
    if (verify.contains("oracle") && verify.at("oracle").is_object()) {
        const auto& b = verify.at("oracle");
        long om = c.oracle.m;
        if (get_integer(b, "m", om, "verify.oracle", add)) {
            if (om < 1 || om > 3) add("verify.oracle.m", "must be 1, 2 or 3");
            else c.oracle.m = static_cast<int>(om);
        }
        get_integer(b, "samples", c.oracle.samples, "verify.oracle", add);
        get_number(b, "slack", c.oracle.slack, "verify.oracle", add);
        get_integer(b, "ar_samples", c.oracle.ar_samples, "verify.oracle", add);
        if (b.contains("ar_tol") && !b.at("ar_tol").is_null()) {
            get_number(b, "ar_tol", c.oracle.ar_tol, "verify.oracle", add);
        }
        if (b.contains("include_ar")) {
            if (!b.at("include_ar").is_boolean()) add("verify.oracle.include_ar", "must be a boolean");
            else c.oracle.include_ar = b.at("include_ar").get<bool>();
        }
    }
    if (verify.contains("uniform") && verify.at("uniform").is_object()) {
        const auto& b = verify.at("uniform");
        get_integer(b, "m", c.uniform.m, "verify.uniform", add);
        get_integer(b, "replicates", c.uniform.replicates, "verify.uniform", add);
        get_number(b, "p_min", c.uniform.p_min, "verify.uniform", add);
    }

    // --- semantic validation through construction ----------------------
    if (domain_ok && grid_ok && family_structural_ok && res.issues.empty()) {
        try {
            const auto model = c.build_model();
            const auto violations = model->family.validate();
            for (const auto& v : violations) {
                add("intensity", v.what + " [" + v.where + "]");
            }
        } catch (const Error& e) {
            add("model", e.what());
        }
        try {
            c.build_test_function();
        } catch (const Error& e) {
            add("test_function", e.what());
        }
    }

    if (res.issues.empty()) res.config = std::move(c);
    return res;
}

Json RunConfig::to_json() const {
    Json j;
    j["domain"] = Json::object();
    j["domain"]["d"] = d;
    j["domain"]["lower"] = lower;
    j["domain"]["upper"] = upper;
    j["radius"] = Json::object();
    if (radius_constant) {
        j["radius"]["kind"] = "constant";
        j["radius"]["r"] = radius_value;
    } else {
        j["radius"]["kind"] = "grid";
        j["radius"]["values"] = radius_values;
    }
    j["intensity"] = Json::object();
    j["intensity"]["kind"] = to_string(intensity_kind);
    switch (intensity_kind) {
        case IntensityKind::Constant:
            j["intensity"]["beta"] = beta_limit.value;
            break;
        case IntensityKind::LimitPlusExp:
            j["intensity"]["beta_limit"] = field_to_json(beta_limit);
            j["intensity"]["a"] = field_to_json(a);
            j["intensity"]["gamma"] = gamma;
            break;
        case IntensityKind::LimitPlusPoly:
            j["intensity"]["beta_limit"] = field_to_json(beta_limit);
            j["intensity"]["a"] = field_to_json(a);
            j["intensity"]["q"] = q;
            break;
        case IntensityKind::FinitePerturbation: {
            j["intensity"]["beta_limit"] = field_to_json(beta_limit);
            Json arr = Json::array();
            for (const auto& o : overrides) arr.push_back(field_to_json(o));
            j["intensity"]["overrides"] = arr;
            break;
        }
    }
    j["grid"] = Json::object();
    j["grid"]["resolution"] = resolution;
    j["m"] = m;
    j["replicates"] = replicates;
    if (base_seed) j["base_seed"] = *base_seed;
    j["threads"] = threads;
    j["max_attempts"] = max_attempts;
    j["emit_birth_times"] = emit_birth_times;
    j["output_dir"] = output_dir;

    j["test_function"] = Json::object();
    j["test_function"]["kind"] = test_function.kind;
    if (test_function.kind == "indicator_box") {
        j["test_function"]["lower"] = test_function.lower;
        j["test_function"]["upper"] = test_function.upper;
    } else if (test_function.kind == "monomial") {
        j["test_function"]["exponents"] = test_function.exponents;
    } else if (test_function.kind == "cosine") {
        j["test_function"]["frequency"] = test_function.frequency;
    } else if (test_function.kind == "constant") {
        j["test_function"]["value"] = test_function.value;
    }

    Json v;
    v["lln"] = Json::object();
    v["lln"]["m_list"] = lln.m_list;
    v["lln"]["replicates"] = lln.replicates;
    v["lln"]["tol"] = lln.tol;
    v["clt"] = Json::object();
    v["clt"]["m"] = clt.m;
    v["clt"]["replicates"] = clt.replicates;
    v["clt"]["variance_slack"] = clt.variance_slack;
    v["clt"]["ks_slack"] = clt.ks_slack;
    v["clt"]["centering"] = clt.centering == Centering::Calibration ? "calibration" : "limit_mean";
    v["poisson"] = Json::object();
    v["poisson"]["x"] = point_to_vector(poisson.x);
    v["poisson"]["r"] = poisson.r;
    v["poisson"]["m"] = poisson.m;
    v["poisson"]["replicates"] = poisson.replicates;
    v["poisson"]["p_min"] = poisson.p_min;
    v["tv_bound"] = Json::object();
    v["tv_bound"]["x"] = point_to_vector(tv_bound.x);
    v["tv_bound"]["r"] = tv_bound.r;
    v["tv_bound"]["m"] = tv_bound.m;
    v["tv_bound"]["replicates"] = tv_bound.replicates;
    v["coverage"] = Json::object();
    if (coverage.delta > 0.0) v["coverage"]["delta"] = coverage.delta;
    else v["coverage"]["delta"] = nullptr;
    v["coverage"]["m_list"] = coverage.m_list;
    v["coverage"]["replicates"] = coverage.replicates;
    v["cumulants"] = Json::object();
    v["cumulants"]["epsilon"] = cumulants.epsilon;
    v["cumulants"]["m"] = cumulants.m;
    v["cumulants"]["replicates"] = cumulants.replicates;
    v["cumulants"]["slack"] = cumulants.slack;
    v["cumulants"]["centering"] =
        cumulants.centering == Centering::Calibration ? "calibration" : "limit_mean";
    v["oracle"] = Json::object();
    v["oracle"]["m"] = oracle.m;
    v["oracle"]["samples"] = oracle.samples;
    v["oracle"]["slack"] = oracle.slack;
    v["oracle"]["include_ar"] = oracle.include_ar;
    v["oracle"]["ar_samples"] = oracle.ar_samples;
    if (oracle.ar_tol > 0.0) v["oracle"]["ar_tol"] = oracle.ar_tol;
    else v["oracle"]["ar_tol"] = nullptr;
    v["uniform"] = Json::object();
    v["uniform"]["m"] = uniform.m;
    v["uniform"]["replicates"] = uniform.replicates;
    v["uniform"]["p_min"] = uniform.p_min;
    j["verify"] = v;
    return j;
}

std::shared_ptr<const Model> RunConfig::build_model() const {
    const BoxDomain box(std::span<const double>(lower.data(), lower.size()),
                        std::span<const double>(upper.data(), upper.size()));
    const auto grid = std::make_shared<QuadratureGrid>(
        box, std::span<const int>(resolution.data(), resolution.size()));
    RadiusField radius = radius_constant ? RadiusField::constant(radius_value)
                                         : RadiusField::grid(grid, radius_values);
    auto to_field = [&](const FieldSpec& f) {
        return f.is_constant ? ScalarField::constant(f.value) : ScalarField::grid(grid, f.values);
    };
    IntensityFamily family = IntensityFamily::constant(1.0);
    switch (intensity_kind) {
        case IntensityKind::Constant:
            family = IntensityFamily::constant(beta_limit.value);
            break;
        case IntensityKind::LimitPlusExp:
            family = IntensityFamily::limit_plus_exp(to_field(beta_limit), to_field(a), gamma);
            break;
        case IntensityKind::LimitPlusPoly:
            family = IntensityFamily::limit_plus_poly(to_field(beta_limit), to_field(a), q);
            break;
        case IntensityKind::FinitePerturbation: {
            std::vector<ScalarField> ov;
            ov.reserve(overrides.size());
            for (const auto& o : overrides) ov.push_back(to_field(o));
            family = IntensityFamily::finite_perturbation(to_field(beta_limit), std::move(ov));
            break;
        }
    }
    return make_model(box, std::move(radius), std::move(family), grid, max_attempts);
}

TestFunction RunConfig::build_test_function() const {
    if (test_function.kind == "indicator_box") {
        return TestFunction::indicator_box(point_from(test_function.lower),
                                           point_from(test_function.upper));
    }
    if (test_function.kind == "monomial") {
        return TestFunction::monomial(test_function.exponents);
    }
    if (test_function.kind == "cosine") {
        return TestFunction::cosine(test_function.frequency);
    }
    return TestFunction::constant(test_function.value);
}

void emit_report(const VerificationReport& report, const std::string& path) {
    if (report.criteria.empty()) {
        throw RefusalError("refusing to write a report without criteria");
    }
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open report file: " + path);
        out << report.to_json().dump(2) << '\n';
        if (!out) throw Error("failed writing report file: " + path);
    }
    Json meta = report.meta_json();
    meta["written_at_unix_ms"] = now_unix_ms();
    std::ofstream mo(path + ".meta.json", std::ios::binary | std::ios::trunc);
    if (!mo) throw Error("cannot open sidecar file: " + path + ".meta.json");
    mo << meta.dump(2) << '\n';
}

void write_replicate_csv(const VerificationReport& report, const std::string& path) {
    if (report.replicate_stats.empty()) return;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open CSV file: " + path);
    out << "replicate,statistic,value\n";
    std::string row;
    for (const auto& s : report.replicate_stats) {
        row.clear();
        row += std::to_string(s.replicate);
        row += ',';
        row += s.statistic;
        row += ',';
        format_double(row, s.value);
        row += '\n';
        out << row;
    }
    if (!out) throw Error("failed writing CSV file: " + path);
}

void write_points_csv(const std::vector<ProcessState>& states, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open CSV file: " + path);
    const int d = states.empty() ? 1 : states.front().model().domain.dim();
    out << "replicate,k";
    for (int a = 0; a < d; ++a) out << ",x" << (a + 1);
    out << ",attempts\n";
    std::string row;
    for (const auto& st : states) {
        for (long k = 0; k < st.size(); ++k) {
            row.clear();
            row += std::to_string(st.replicate_id());
            row += ',';
            row += std::to_string(k + 1);
            for (int a = 0; a < d; ++a) {
                row += ',';
                format_double(row, st.point(k)[a]);
            }
            row += ',';
            row += std::to_string(st.attempts()[static_cast<size_t>(k)]);
            row += '\n';
            out << row;
        }
    }
    if (!out) throw Error("failed writing CSV file: " + path);
}

std::vector<std::string> known_commands() {
    return {"simulate",        "verify-lln",      "verify-clt",    "verify-poisson",
            "verify-tv-bound", "verify-coverage", "verify-cumulants", "verify-oracle",
            "verify-all"};
}

namespace {

VerificationReport run_named(const std::string& name, const RunConfig& config,
                             const std::shared_ptr<const Model>& model, int threads) {
    const uint64_t base = config.base_seed.value_or(0);
    const TestFunction f = config.build_test_function();
    if (name == "uniform") {
        return run_uniform_gof(model, config.uniform, {Rng::mix(base, kTagUniform), threads});
    }
    if (name == "lln") {
        return run_lln(model, f, config.lln, {Rng::mix(base, kTagLln), threads});
    }
    if (name == "clt") {
        return run_clt(model, f, config.clt, {Rng::mix(base, kTagClt), threads});
    }
    if (name == "poisson") {
        return run_poisson(model, config.poisson, {Rng::mix(base, kTagPoisson), threads});
    }
    if (name == "tv_bound") {
        return run_poisson_tv_bound(model, config.tv_bound, {Rng::mix(base, kTagTvBound), threads});
    }
    if (name == "coverage") {
        return run_coverage(model, config.coverage, {Rng::mix(base, kTagCoverage), threads});
    }
    if (name == "cumulants") {
        return run_cumulants(model, f, config.cumulants, {Rng::mix(base, kTagCumulants), threads});
    }
    if (name == "oracle") {
        return run_density_oracle(model, config.oracle, {Rng::mix(base, kTagOracle), threads});
    }
    throw ConfigError("unknown verification test: " + name);
}

}  // namespace

VerificationReport run_verification(const std::string& test, const RunConfig& config) {
    return run_named(test, config, config.build_model(), config.threads);
}

namespace {

int emit_and_summarize(const VerificationReport& report, const RunConfig& config) {
    const std::string dir = config.output_dir;
    emit_report(report, dir + "/report_" + report.test + ".json");
    write_replicate_csv(report, dir + "/" + report.test + "_replicates.csv");
    std::cout << (report.pass ? "[PASS] " : "[FAIL] ") << report.test;
    if (!report.pass) {
        std::cout << " (";
        bool first = true;
        for (const auto& c : report.criteria) {
            if (c.pass) continue;
            if (!first) std::cout << ", ";
            std::cout << c.name;
            first = false;
        }
        std::cout << ")";
    }
    std::cout << "\n";
    return report.pass ? 0 : 1;
}

int run_simulate(const RunConfig& config, const std::shared_ptr<const Model>& model) {
    const uint64_t base = config.base_seed.value_or(0);
    std::vector<ProcessState> states;
    states.reserve(static_cast<size_t>(config.replicates));
    std::ofstream birth;
    if (config.emit_birth_times) {
        birth.open(config.output_dir + "/birth.csv", std::ios::binary | std::ios::trunc);
        if (!birth) throw Error("cannot open CSV file: " + config.output_dir + "/birth.csv");
        birth << "replicate,k,time,rate\n";
    }
    for (long r = 0; r < config.replicates; ++r) {
        if (config.emit_birth_times) {
            auto [st, traj] = simulate_birth_process(model, config.m, base, static_cast<uint64_t>(r));
            std::string row;
            for (size_t k = 0; k < traj.times.size(); ++k) {
                row.clear();
                row += std::to_string(r);
                row += ',';
                row += std::to_string(k + 1);
                row += ',';
                format_double(row, traj.times[k]);
                row += ',';
                format_double(row, traj.rates[k]);
                row += '\n';
                birth << row;
            }
            states.push_back(std::move(st));
        } else {
            states.push_back(simulate(model, config.m, base, static_cast<uint64_t>(r)));
        }
    }
    write_points_csv(states, config.output_dir + "/points.csv");
    return 0;
}

}  // namespace

int execute(const std::string& command, const RunConfig& config) {
    try {
        const auto model = config.build_model();
        std::filesystem::create_directories(config.output_dir);
        const int threads = config.threads;

        if (command == "simulate") return run_simulate(config, model);

        if (command == "verify-all") {
            int status = 0;
            std::vector<std::string> tests;
            if (model->family.kind() == IntensityKind::Constant) tests.push_back("uniform");
            tests.insert(tests.end(), {"lln", "clt", "poisson", "tv_bound", "coverage"});
            if (model->family.exponential_rate()) {
                tests.push_back("cumulants");
            } else {
                std::cerr << "note: skipping cumulants (needs an exponential-rate family)\n";
            }
            tests.push_back("oracle");
            for (const auto& t : tests) {
                const VerificationReport report = run_named(t, config, model, threads);
                status |= emit_and_summarize(report, config);
            }
            return status;
        }

        const std::string prefix = "verify-";
        if (command.rfind(prefix, 0) == 0) {
            std::string name = command.substr(prefix.size());
            if (name == "tv-bound") name = "tv_bound";
            const VerificationReport report = run_named(name, config, model, threads);
            return emit_and_summarize(report, config);
        }

        std::cerr << "unknown command: " << command << "\n";
        return 2;
    } catch (const RefusalError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace csa
