#include <cmath>
#include <numbers>

#include "csa/verify.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace csa;

namespace {

const RunContext kCtx{424242u, 0};

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("LLN of a constant function is exactly zero") {
    auto model = testutil::model1d(0.1, IntensityFamily::constant(1.0), 10);
    LlnParams p;
    p.m_list = {10, 40, 160};
    p.replicates = 20;
    const auto report = run_lln(model, TestFunction::constant(1.0), p, kCtx);
    CHECK(report.pass);
    for (const double v : report.observed.at("median_abs_error").get<std::vector<double>>()) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("LLN on the binomial control") {
    auto model = testutil::model1d(0.1, IntensityFamily::constant(1.0), 10);
    LlnParams p;
    p.m_list = {100, 400, 1600};
    p.replicates = 60;
    p.tol = 0.02;
    const auto report = run_lln(model, TestFunction::half_domain_indicator(model->domain), p, kCtx);
    CHECK(report.pass);
    CHECK(report.recompute_verdict() == report.pass);
    CHECK(!report.replicate_stats.empty());
}

TEST_CASE("CLT degenerate direction is flagged and passes") {
    auto model = testutil::model1d(0.1, IntensityFamily::constant(1.0), 10);
    CltParams p;
    p.m = 50;
    p.replicates = 30;
    const auto report = run_clt(model, TestFunction::constant(2.0), p, kCtx);
    CHECK(report.pass);
    REQUIRE(!report.warnings.empty());
    CHECK(report.warnings.front().find("degenerate") != std::string::npos);
}

TEST_CASE("CLT on the binomial control") {
    auto model = testutil::model1d(0.05, IntensityFamily::constant(1.0), 10);
    CltParams p;
    p.m = 500;
    p.replicates = 200;
    const auto report = run_clt(model, TestFunction::half_domain_indicator(model->domain), p, kCtx);
    CHECK(report.pass);
    CHECK(report.reference.at("G_ff").get<double>() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("CLT refuses families that fail validation") {
    auto model = testutil::model1d(0.1,
                                   IntensityFamily::limit_plus_poly(ScalarField::constant(1.0),
                                                                    ScalarField::constant(0.5), 0.3),
                                   10);
    CltParams p;
    CHECK_THROWS_AS(run_clt(model, TestFunction::half_domain_indicator(model->domain), p, kCtx),
                    RefusalError);
}

TEST_CASE("Poisson parameter formula in one dimension") {
    auto model = testutil::model1d(0.2, IntensityFamily::constant(1.0), 10);
    PoissonParams p;
    p.x = Point(0.5);
    p.r = 1.0;
    p.m = 400;
    p.replicates = 400;
    const auto report = run_poisson(model, p, kCtx);
    CHECK(report.reference.at("lambda").get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(report.pass);
}

TEST_CASE("Poisson counts at desk scale (binomial, d = 2)") {
    auto model = testutil::model2d(0.1, IntensityFamily::constant(1.0), 10);
    PoissonParams p;
    p.x = Point(0.5, 0.5);
    p.r = 1.0;
    p.m = 5000;
    p.replicates = 2000;
    const auto report = run_poisson(model, p, kCtx);
    CHECK(report.pass);
    const double lambda = report.reference.at("lambda").get<double>();
    CHECK(lambda == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    const double mean = report.observed.at("mean_count").get<double>();
    CHECK(std::abs(mean - lambda) < 0.05 * lambda);
}

TEST_CASE("Poisson check refuses balls that leave the domain") {
    auto model = testutil::model2d(0.1, IntensityFamily::constant(1.0), 10);
    PoissonParams p;
    p.x = Point(0.001, 0.5);
    p.r = 0.5;
    p.m = 25;
    p.replicates = 50;
    CHECK_THROWS_AS(run_poisson(model, p, kCtx), RefusalError);
}

TEST_CASE("coverage threshold recipe") {
    auto model = testutil::model1d(0.5, IntensityFamily::constant(1.0), 10);
    const auto th = coverage_delta0(*model);
    CHECK(th.l == 9);
    CHECK(th.delta0 == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

    CoverageParams refuse;
    refuse.delta = 0.2;  // >= delta0
    CHECK_THROWS_AS(run_coverage(model, refuse, kCtx), RefusalError);
}

TEST_CASE("coverage passes on the binomial control") {
    auto model = testutil::model1d(0.5, IntensityFamily::constant(1.0), 10);
    CoverageParams p;
    p.m_list = {50, 200, 800};
    p.replicates = 50;
    const auto report = run_coverage(model, p, kCtx);
    CHECK(report.pass);
    CHECK(report.params.at("delta").get<double>() == doctest::Approx(1.0 / 18.0));
}

TEST_CASE("cumulant check refuses polynomial-rate families") {
    auto model = testutil::model1d(0.25,
                                   IntensityFamily::limit_plus_poly(ScalarField::constant(1.0),
                                                                    ScalarField::constant(0.5), 0.8),
                                   10);
    CumulantParams p;
    CHECK_THROWS_AS(run_cumulants(model, TestFunction::half_domain_indicator(model->domain), p, kCtx),
                    RefusalError);
    auto ok_model = testutil::model1d(0.25, testutil::exp_family(), 10);
    CumulantParams bad_eps;
    bad_eps.epsilon = 0.7;
    CHECK_THROWS_AS(
        run_cumulants(ok_model, TestFunction::half_domain_indicator(ok_model->domain), bad_eps, kCtx),
        RefusalError);
}

TEST_CASE("cumulants on the binomial control") {
    auto model = testutil::model1d(0.05, IntensityFamily::constant(1.0), 10);
    CumulantParams p;
    p.m = 800;
    p.replicates = 300;
    const auto report =
        run_cumulants(model, TestFunction::half_domain_indicator(model->domain), p, kCtx);
    CHECK(report.pass);
    CHECK(std::abs(report.observed.at("k2").get<double>() - 0.25) < 0.1);
}

TEST_CASE("TV bound cost guard and the binomial closed form") {
    auto model = testutil::model2d(0.1, IntensityFamily::constant(1.0), 10);
    TvBoundParams big;
    big.m = 501;
    CHECK_THROWS_AS(run_poisson_tv_bound(model, big, kCtx), RefusalError);

    TvBoundParams p;
    p.x = Point(0.5, 0.5);
    p.r = 0.5;
    p.m = 200;
    p.replicates = 100;
    const auto report = run_poisson_tv_bound(model, p, kCtx);
    CHECK(report.pass);
    // binomial case: J_k == p_m exactly, the bound collapses to m p_m^2
    CHECK(report.observed.at("mean_jk_deviation_sum").get<double>() == 0.0);
    const double pm = report.reference.at("p_m").get<double>();
    CHECK(pm == doctest::Approx(std::numbers::pi * 0.25 / 200.0).epsilon(1e-12));
    CHECK(report.reference.at("bound").get<double>() ==
          doctest::Approx(200.0 * pm * pm).epsilon(1e-12));
}

TEST_CASE("density oracle check (m = 1) and grid guard") {
    auto model = testutil::model1d(0.25, testutil::exp_family(), 10);
    OracleParams p;
    p.m = 1;
    p.samples = 20000;
    p.ar_samples = 20000;
    const auto report = run_density_oracle(model, p, kCtx);
    CHECK(report.pass);
    CHECK(report.reference.at("tuple_count").get<long>() == 10);

    auto fine = testutil::model1d(0.25, IntensityFamily::constant(1.0), 101);
    OracleParams deep;
    deep.m = 3;
    CHECK_THROWS_AS(run_density_oracle(fine, deep, kCtx), RefusalError);
}

TEST_CASE("density oracle at m = 3 on a coarse grid") {
    auto model = testutil::model1d(0.25, testutil::exp_family(), 5);
    OracleParams p;
    p.m = 3;
    p.samples = 30000;
    p.include_ar = false;
    const auto report = run_density_oracle(model, p, kCtx);
    CHECK(report.pass);
    CHECK(report.reference.at("tuple_count").get<long>() == 125);
}

TEST_CASE("TV bound on a finite-perturbation family") {
    // once local coverage exceeds the cutoff, beta_n == beta everywhere and
    // the per-step deviation terms die out
    const BoxDomain box = testutil::box2d();
    auto grid = testutil::make_grid(box, {10, 10});
    auto fam = IntensityFamily::finite_perturbation(ScalarField::constant(1.0),
                                                    {ScalarField::constant(2.0)});
    auto model = make_model(box, RadiusField::constant(0.1), std::move(fam), grid);
    TvBoundParams p;
    p.x = Point(0.5, 0.5);
    p.r = 0.5;
    p.m = 300;
    p.replicates = 100;
    const auto report = run_poisson_tv_bound(model, p, kCtx);
    CHECK(report.pass);
    CHECK(report.observed.at("mean_jk_deviation_sum").get<double>() > 0.0);
    CHECK(report.reference.at("bound").get<double>() >
          report.reference.at("m_pm_squared").get<double>());
}

TEST_CASE("cumulants of a constant function vanish") {
    auto model = testutil::model1d(0.25, testutil::exp_family(), 10);
    CumulantParams p;
    p.m = 200;
    p.replicates = 60;
    const auto report = run_cumulants(model, TestFunction::constant(3.0), p, kCtx);
    CHECK(report.pass);
    CHECK(report.observed.at("k2").get<double>() == 0.0);
    CHECK(report.observed.at("k3").get<double>() == 0.0);
    CHECK(report.observed.at("k4").get<double>() == 0.0);
}

TEST_CASE("reports are self-contained and deterministic") {
    auto model = testutil::model1d(0.1, IntensityFamily::constant(1.0), 10);
    LlnParams p;
    p.m_list = {20, 80};
    p.replicates = 15;
    const auto a = run_lln(model, TestFunction::half_domain_indicator(model->domain), p, kCtx);
    const auto b = run_lln(model, TestFunction::half_domain_indicator(model->domain), p, kCtx);
    CHECK(a.to_json().dump(2) == b.to_json().dump(2));
    CHECK(a.recompute_verdict() == a.pass);
    // runtime stays out of the deterministic payload
    CHECK(a.to_json().dump().find("runtime") == std::string::npos);
    for (const auto& c : a.criteria) {
        CHECK(!c.name.empty());
        CHECK(!c.threshold.is_null());
    }
    VerificationReport empty;
    CHECK(!empty.recompute_verdict());
}

}  // TEST_SUITE
