#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

using namespace csa;

TEST_SUITE("intensity") {

TEST_CASE("constant family") {
    const auto f = IntensityFamily::constant(2.0);
    CHECK(f.beta_n(Point(0.3), 0) == 2.0);
    CHECK(f.beta_n(Point(0.3), 12345) == 2.0);
    CHECK(f.beta_limit(Point(0.9)) == 2.0);
    CHECK(f.beta_min() == 2.0);
    CHECK(f.beta_max() == 2.0);
    CHECK(f.tau_sup() == 0.0);
    CHECK(f.phi(0) == 0.0);
    CHECK(f.validate().empty());
}

TEST_CASE("limit_plus_exp evaluation") {
    const auto f = testutil::exp_family(1.0, 1.0, std::log(2.0));
    CHECK(f.beta_n(Point(0.5), 0) == doctest::Approx(2.0));
    CHECK(f.beta_n(Point(0.5), 1) == doctest::Approx(1.5));
    CHECK(f.beta_limit(Point(0.5)) == 1.0);
    CHECK(f.beta_min() == doctest::Approx(1.0));
    CHECK(f.beta_max() == doctest::Approx(2.0));
    CHECK(f.validate().empty());
}

TEST_CASE("finite perturbation hits the limit past the cutoff") {
    std::vector<ScalarField> overrides(3, ScalarField::constant(2.5));
    const auto f =
        IntensityFamily::finite_perturbation(ScalarField::constant(1.0), std::move(overrides));
    CHECK(f.cutoff() == 3);
    CHECK(f.beta_n(Point(0.5), 2) == 2.5);
    CHECK(f.beta_n(Point(0.5), 5) == 1.0);
    CHECK(f.phi(2) == 1.0);
    CHECK(f.phi(3) == 0.0);
    CHECK(f.tau_sup() == 1.5);
    CHECK(f.validate().empty());
}

TEST_CASE("phi rate values") {
    const auto f = testutil::exp_family(1.0, 1.0, 1.0);
    CHECK(f.phi(0) == 1.0);
    CHECK(f.phi(2) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("validation catches degenerate families") {
    const auto zero_floor = testutil::exp_family(1.0, -1.0, 1.0);  // beta_0 = 0
    const auto violations = zero_floor.validate();
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations) {
        if (v.what.find("lower bound") != std::string::npos) found = true;
    }
    CHECK(found);

    const auto slow = IntensityFamily::limit_plus_poly(ScalarField::constant(1.0),
                                                       ScalarField::constant(0.5), 0.4);
    bool rate_issue = false;
    for (const auto& v : slow.validate()) {
        if (v.what.find("q must exceed 1/2") != std::string::npos) rate_issue = true;
    }
    CHECK(rate_issue);
}

TEST_CASE("rate envelope holds exhaustively for the built-ins") {
    const BoxDomain box = testutil::box1d();
    auto grid = testutil::make_grid(box, {8});
    std::vector<double> bl{1.0, 1.2, 0.8, 1.5, 2.0, 0.7, 1.1, 0.9};
    std::vector<double> av{0.5, -0.25, 1.0, 0.0, 0.75, -0.4, 0.2, 1.5};
    const std::vector<IntensityFamily> families = {
        IntensityFamily::constant(1.5),
        IntensityFamily::limit_plus_exp(ScalarField::grid(grid, bl), ScalarField::grid(grid, av),
                                        0.7),
        IntensityFamily::limit_plus_poly(ScalarField::grid(grid, bl), ScalarField::grid(grid, av),
                                         0.75),
        IntensityFamily::finite_perturbation(
            ScalarField::grid(grid, bl),
            {ScalarField::constant(2.0), ScalarField::constant(0.5)}),
    };
    for (const auto& fam : families) {
        CHECK(fam.validate(1000).empty());
        const long cells = fam.field_grid() ? fam.field_grid()->num_cells() : 1;
        for (long n = 0; n <= 1000; n += (n < 32 ? 1 : 97)) {
            for (long c = 0; c < cells; ++c) {
                const double dev = std::abs(fam.beta_n_cell(c, n) - fam.beta_limit_cell(c));
                CHECK(dev <= fam.tau_sup() * fam.phi(static_cast<double>(n)) + 1e-12);
            }
        }
    }
}

TEST_CASE("phi is nonincreasing and vanishes") {
    const auto exp_fam = testutil::exp_family(1.0, 1.0, 1.0);
    const auto poly = IntensityFamily::limit_plus_poly(ScalarField::constant(1.0),
                                                       ScalarField::constant(1.0), 0.6);
    for (const auto* fam : {&exp_fam, &poly}) {
        double prev = fam->phi(0);
        for (long n = 1; n <= 1000; ++n) {
            const double cur = fam->phi(static_cast<double>(n));
            CHECK(cur <= prev);
            prev = cur;
        }
        CHECK(fam->phi(1e6) <= 1e-3);
    }
}

TEST_CASE("polynomial rate satisfies the normalized-sum condition empirically") {
    // (1/sqrt(n)) * sum_{k<=n} phi(k delta) must fall along n for q > 1/2.
    const auto poly = IntensityFamily::limit_plus_poly(ScalarField::constant(1.0),
                                                       ScalarField::constant(1.0), 0.6);
    for (const double delta : {0.05, 0.1, 0.5}) {
        double value_at_prev = 0.0;
        bool first = true;
        double running = 0.0;
        long k = 0;
        for (const long n : {1000L, 10000L, 100000L}) {
            for (; k <= n; ++k) running += poly.phi(static_cast<double>(k) * delta);
            const double v = running / std::sqrt(static_cast<double>(n));
            if (!first) CHECK(v < value_at_prev);
            value_at_prev = v;
            first = false;
        }
    }
}

TEST_CASE("grid fields must share one grid") {
    const BoxDomain box = testutil::box1d();
    auto g1 = testutil::make_grid(box, {4});
    auto g2 = testutil::make_grid(box, {5});
    CHECK_THROWS_AS(IntensityFamily::limit_plus_exp(
                        ScalarField::grid(g1, {1.0, 1.0, 1.0, 1.0}),
                        ScalarField::grid(g2, {0.1, 0.1, 0.1, 0.1, 0.1}), 1.0),
                    ConfigError);
}

}  // TEST_SUITE
