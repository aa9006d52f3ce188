#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "csa/config.hpp"

namespace py = pybind11;

namespace {

csa::RunConfig parse_or_throw(const std::string& text) {
    csa::ParseResult result = csa::parse_config(text);
    if (!result.ok()) {
        std::string msg = "invalid configuration:";
        for (const auto& issue : result.issues) {
            msg += "\n  - [" + issue.where + "] " + issue.message;
        }
        throw std::invalid_argument(msg);
    }
    return *result.config;
}

csa::Point point_of(const std::vector<double>& coords) {
    return csa::Point::from(std::span<const double>(coords.data(), coords.size()));
}

std::vector<csa::Point> points_of(const std::vector<std::vector<double>>& raw) {
    std::vector<csa::Point> pts;
    pts.reserve(raw.size());
    for (const auto& c : raw) pts.push_back(point_of(c));
    return pts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cooperative sequential adsorption sampling and verification core";

    m.def("ball_volume_coeff", &csa::ball_volume_coeff, py::arg("d"),
          "Volume of the d-dimensional unit ball (d = 1, 2, 3).");

    m.def(
        "config_issues",
        [](const std::string& text) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& issue : csa::parse_config(text).issues) {
                out.emplace_back(issue.where, issue.message);
            }
            return out;
        },
        py::arg("config"), "All validation issues of a configuration (empty when valid).");

    m.def(
        "canonical_config",
        [](const std::string& text) { return parse_or_throw(text).to_json().dump(2); },
        py::arg("config"), "Parse and re-serialize a configuration in canonical form.");

    m.def(
        "simulate",
        [](const std::string& text, std::optional<long> m, std::optional<uint64_t> seed,
           uint64_t replicate) {
            const csa::RunConfig config = parse_or_throw(text);
            const auto model = config.build_model();
            const csa::ProcessState st = csa::simulate(
                model, m.value_or(config.m), seed.value_or(config.base_seed.value_or(0)), replicate);
            std::vector<std::vector<double>> points;
            points.reserve(static_cast<size_t>(st.size()));
            for (const csa::Point& p : st.points()) {
                std::vector<double> row(static_cast<size_t>(p.dim()));
                for (int a = 0; a < p.dim(); ++a) row[static_cast<size_t>(a)] = p[a];
                points.push_back(std::move(row));
            }
            std::vector<long> attempts(st.attempts().begin(), st.attempts().end());
            return py::make_tuple(points, attempts);
        },
        py::arg("config"), py::arg("m") = std::nullopt, py::arg("seed") = std::nullopt,
        py::arg("replicate") = 0,
        "Sample one replicate; returns (points, attempts_per_point).");

    m.def(
        "neighbor_count",
        [](const std::string& text, const std::vector<std::vector<double>>& stored,
           const std::vector<double>& x) {
            const csa::RunConfig config = parse_or_throw(text);
            csa::ProcessState st(config.build_model());
            for (const auto& p : points_of(stored)) st.insert(p);
            return st.neighbor_count(point_of(x));
        },
        py::arg("config"), py::arg("points"), py::arg("x"),
        "Number of stored points within R(x) of x (closed ball).");

    m.def(
        "compute_j",
        [](const std::string& text) {
            const csa::RunConfig config = parse_or_throw(text);
            const auto model = config.build_model();
            return csa::compute_J(config.build_test_function(), model->family, *model->grid);
        },
        py::arg("config"), "J(f) for the configured test function.");

    m.def(
        "compute_g",
        [](const std::string& text) {
            const csa::RunConfig config = parse_or_throw(text);
            const auto model = config.build_model();
            const csa::TestFunction f = config.build_test_function();
            return csa::compute_G(f, f, model->family, *model->grid);
        },
        py::arg("config"), "Covariance kernel G(f,f) for the configured test function.");

    m.def(
        "compute_un",
        [](const std::string& text, int n) {
            const csa::RunConfig config = parse_or_throw(text);
            const auto model = config.build_model();
            return csa::compute_Un(config.build_test_function(), n, model->family, *model->grid);
        },
        py::arg("config"), py::arg("n"),
        "n-th central moment of f under the limit density (n <= 6).");

    m.def(
        "joint_density_oracle",
        [](const std::string& text, const std::vector<std::vector<double>>& points) {
            const csa::RunConfig config = parse_or_throw(text);
            return csa::joint_density_oracle(points_of(points), config.build_model());
        },
        py::arg("config"), py::arg("points"),
        "Joint density of an ordered point tuple under the discretized model (m <= 4).");

    m.def(
        "cumulant_estimate",
        [](const std::vector<double>& samples, int order) {
            return csa::cumulant_estimate(samples, order);
        },
        py::arg("samples"), py::arg("order"),
        "Central-moment plug-in cumulant of order 2, 3 or 4 (needs >= 30 samples).");

    m.def(
        "verify_json",
        [](const std::string& test, const std::string& text) {
            return csa::run_verification(test, parse_or_throw(text)).to_json().dump(2);
        },
        py::arg("test"), py::arg("config"),
        "Run one verification test (uniform, lln, clt, poisson, tv_bound, coverage, "
        "cumulants, oracle) and return the report as JSON text.");

    m.def(
        "execute",
        [](const std::string& command, const std::string& text) {
            return csa::execute(command, parse_or_throw(text));
        },
        py::arg("command"), py::arg("config"),
        "Run a CLI command (simulate, verify-*, verify-all); writes artifacts and "
        "returns the exit status.");

    py::register_exception<csa::RefusalError>(m, "RefusalError", PyExc_RuntimeError);
    py::register_exception<csa::StallError>(m, "StallError", PyExc_RuntimeError);
}
