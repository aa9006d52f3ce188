#include <cmath>
#include <vector>

#include "csa/stats.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace csa;

namespace {

std::shared_ptr<const QuadratureGrid> grid_of(const Model& m) { return m.grid; }

}  // namespace

TEST_SUITE("measure") {

TEST_CASE("quadrature of the limit intensity") {
    auto m1 = testutil::model2d(0.1, IntensityFamily::constant(2.0));
    CHECK(quad_alpha_limit(m1->family, *m1->grid) == doctest::Approx(2.0).epsilon(1e-12));

    const double l[] = {0.0, 0.0};
    const double u[] = {2.0, 2.0};
    const BoxDomain big(std::span<const double>(l, 2), std::span<const double>(u, 2));
    auto grid = testutil::make_grid(big, {6, 6});
    auto m2 = make_model(big, RadiusField::constant(0.2), IntensityFamily::constant(1.0), grid);
    CHECK(quad_alpha_limit(m2->family, *m2->grid) == doctest::Approx(4.0).epsilon(1e-12));

    // piecewise 1 on the left half, 3 on the right half of the unit interval
    const BoxDomain line = testutil::box1d();
    auto g10 = testutil::make_grid(line, {10});
    std::vector<double> halves{1, 1, 1, 1, 1, 3, 3, 3, 3, 3};
    auto fam = IntensityFamily::constant(1.0);
    auto m3 = make_model(line, RadiusField::constant(0.2),
                         IntensityFamily::limit_plus_exp(ScalarField::grid(g10, halves),
                                                         ScalarField::constant(0.0), 1.0),
                         g10);
    CHECK(quad_alpha_limit(m3->family, *m3->grid) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("J functional") {
    auto model = testutil::model1d(0.2, IntensityFamily::constant(1.0), 10);
    const auto& grid = *grid_of(*model);
    CHECK(compute_J(TestFunction::constant(1.0), model->family, grid) == 1.0);
    const auto half = TestFunction::half_domain_indicator(model->domain);
    CHECK(compute_J(half, model->family, grid) == doctest::Approx(0.5).epsilon(1e-12));
    // midpoint quadrature is exact for linear integrands
    const auto linear = TestFunction::monomial({1});
    CHECK(compute_J(linear, model->family, grid) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("covariance kernel G") {
    auto model = testutil::model1d(0.2, IntensityFamily::constant(1.0), 10);
    const auto& grid = *grid_of(*model);
    const auto one = TestFunction::constant(1.0);
    CHECK(compute_G(one, one, model->family, grid) == 0.0);
    const auto half = TestFunction::half_domain_indicator(model->domain);
    CHECK(compute_G(half, half, model->family, grid) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("G(f,f) is nonnegative for randomized test functions") {
    Rng rng(31u);
    auto model = testutil::model1d(0.2, testutil::exp_family(1.3, 0.6, 0.9), 16);
    const auto& grid = *grid_of(*model);
    for (int t = 0; t < 30; ++t) {
        TestFunction f = TestFunction::constant(1.0);
        switch (t % 3) {
            case 0: f = TestFunction::monomial({1 + static_cast<int>(rng.uniform01() * 3)}); break;
            case 1: f = TestFunction::cosine({rng.uniform(0.0, 9.0)}); break;
            case 2: {
                const double a = rng.uniform01();
                const double b = rng.uniform01();
                f = TestFunction::indicator_box(Point(std::min(a, b)), Point(std::max(a, b)));
                break;
            }
        }
        CHECK(compute_G(f, f, model->family, grid) >= -1e-12);
    }
}

TEST_CASE("central moments U_n") {
    auto model = testutil::model1d(0.2, IntensityFamily::constant(1.0), 10);
    const auto& grid = *grid_of(*model);
    const auto half = TestFunction::half_domain_indicator(model->domain);
    const auto linear = TestFunction::monomial({1});

    CHECK(compute_Un(half, 1, model->family, grid) == 0.0);
    CHECK(compute_Un(linear, 1, model->family, grid) == 0.0);
    // order 2 reduces to the covariance kernel through the same quadrature
    CHECK(compute_Un(half, 2, model->family, grid) == compute_G(half, half, model->family, grid));
    CHECK(compute_Un(linear, 2, model->family, grid) ==
          compute_G(linear, linear, model->family, grid));
    // symmetric two-point law has no third central moment
    CHECK(compute_Un(half, 3, model->family, grid) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(compute_Un(half, 7, model->family, grid), RefusalError);
}

TEST_CASE("conditional mean J_k") {
    auto model = testutil::model1d(0.25, IntensityFamily::constant(1.7), 10);
    const auto& grid = *grid_of(*model);
    const auto half = TestFunction::half_domain_indicator(model->domain);
    ProcessState empty(model);
    CHECK(conditional_mean_Jk(half, empty, grid) == compute_J(half, model->family, grid));
    ProcessState some(model);
    Rng rng(5u);
    for (int k = 0; k < 37; ++k) some.insert(rng.uniform_in(model->domain));
    // constant family: the prefix never matters
    CHECK(conditional_mean_Jk(half, some, grid) == compute_J(half, model->family, grid));
    CHECK(conditional_mean_Jk(TestFunction::constant(1.0), some, grid) == 1.0);
}

TEST_CASE("finite perturbation prefix past the cutoff reproduces J") {
    const BoxDomain box = testutil::box1d();
    auto grid = testutil::make_grid(box, {4});
    auto fam = IntensityFamily::finite_perturbation(ScalarField::constant(1.0),
                                                    {ScalarField::constant(3.0)});
    auto model = make_model(box, RadiusField::constant(0.3), std::move(fam), grid);
    ProcessState st(model);
    for (long c = 0; c < grid->num_cells(); ++c) st.insert(grid->center(c));
    // every cell center now has >= 1 neighbor, so beta_n == beta_limit there
    const auto half = TestFunction::half_domain_indicator(box);
    CHECK(conditional_mean_Jk(half, st, *grid) == compute_J(half, model->family, *grid));
}

TEST_CASE("J_k deviation bound from the limit intensity gap") {
    auto model = testutil::model1d(0.25, testutil::exp_family(1.0, 1.0, 1.0), 10);
    const auto& grid = *grid_of(*model);
    const double beta_min = model->family.beta_min();
    Rng rng(11u);
    for (const auto& f :
         {TestFunction::half_domain_indicator(model->domain), TestFunction::monomial({2})}) {
        const double j_ref = compute_J(f, model->family, grid);
        const double sup_f = f.sup_norm(model->domain);
        for (long m : {0L, 5L, 40L, 160L}) {
            ProcessState st(model);
            for (long k = 0; k < m; ++k) st.insert(rng.uniform_in(model->domain));
            double sup_gap = 0.0;
            for (long c = 0; c < grid.num_cells(); ++c) {
                const Point center = grid.center(c);
                const long n = st.neighbor_count(center);
                sup_gap = std::max(sup_gap, std::abs(model->family.beta_n_cell(c, n) -
                                                     model->family.beta_limit_cell(c)));
            }
            const double jk = conditional_mean_Jk(f, st, grid);
            CHECK(std::abs(jk - j_ref) <= 2.0 * sup_f / beta_min * sup_gap + 1e-12);
        }
    }
}

TEST_CASE("centered scaled sums") {
    auto model = testutil::model1d(0.1, IntensityFamily::constant(1.0), 10);
    ProcessState st(model);
    st.insert(Point(0.3));
    const auto f = TestFunction::constant(2.5);
    const std::vector<double> ref{2.5};
    CHECK(centered_scaled_sum(f, st, ref) == 0.0);
    const auto half = TestFunction::half_domain_indicator(model->domain);
    CHECK(centered_scaled_sum(half, st, std::vector<double>{0.25}) == 0.75);
    CHECK_THROWS_AS(centered_scaled_sum(half, st, std::vector<double>{0.25, 0.5}), ConfigError);
}

TEST_CASE("binomial centered sums match the i.i.d. variance") {
    auto model = testutil::model1d(0.02, IntensityFamily::constant(1.0), 10);
    const auto half = TestFunction::half_domain_indicator(model->domain);
    const double g_ref = compute_G(half, half, model->family, *model->grid);
    const long m = 2000, n = 1000;
    const std::vector<double> ref(static_cast<size_t>(m), 0.5);
    std::vector<double> s(static_cast<size_t>(n));
    for (long r = 0; r < n; ++r) {
        const ProcessState st = simulate(model, m, 4242u, static_cast<uint64_t>(r));
        s[static_cast<size_t>(r)] = centered_scaled_sum(half, st, ref);
    }
    const double var = stats::central_moment(s, 2);
    CHECK(var > 0.85 * g_ref);
    CHECK(var < 1.15 * g_ref);
}

TEST_CASE("ball counts in the shrinking ball") {
    auto model = testutil::model2d(0.1, IntensityFamily::constant(1.0));
    ProcessState st(model);
    CHECK_THROWS_AS(ball_count(st, Point(0.5, 0.5), 0.2), RefusalError);
    st.insert(Point(0.5, 0.5));
    const auto one = ball_count(st, Point(0.5, 0.5), 0.2);
    CHECK(one.count == 1);
    CHECK(one.shrunk_radius == doctest::Approx(0.2));
    CHECK(!one.boundary_warning);
    st.insert(Point(0.9, 0.9));
    // r -> 0+ keeps only points exactly at x
    CHECK(ball_count(st, Point(0.5, 0.5), 1e-12).count == 1);
    CHECK(ball_count(st, Point(0.2, 0.2), 1e-12).count == 0);
    CHECK(ball_count(st, Point(0.05, 0.05), 0.2).boundary_warning);
}

TEST_CASE("sample statistics and cumulant plug-ins") {
    std::vector<double> flat(40, 1.25);
    const auto s0 = SampleStatistics::from(flat);
    CHECK(s0.k2 == 0.0);
    CHECK(s0.k3 == 0.0);
    CHECK(s0.k4 == 0.0);
    CHECK(s0.variance == s0.k2);

    std::vector<double> pm;
    for (int i = 0; i < 25; ++i) {
        pm.push_back(1.0);
        pm.push_back(-1.0);
    }
    CHECK(cumulant_estimate(pm, 2) == 1.0);
    CHECK(cumulant_estimate(pm, 3) == 0.0);
    CHECK(cumulant_estimate(pm, 4) == -2.0);
    CHECK_THROWS_AS(cumulant_estimate(std::vector<double>(10, 1.0), 2), RefusalError);
    CHECK_THROWS_AS(cumulant_estimate(pm, 5), RefusalError);
}

TEST_CASE("gaussian reference stream has vanishing k3 and k4") {
    Rng rng(123u);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = rng.normal();
    CHECK(std::abs(cumulant_estimate(xs, 3)) < 0.03);
    CHECK(std::abs(cumulant_estimate(xs, 4)) < 0.06);
}

TEST_CASE("test function sup norms are exact") {
    const BoxDomain box = testutil::box1d(0.0, 2.0);
    CHECK(TestFunction::half_domain_indicator(box).sup_norm(box) == 1.0);
    CHECK(TestFunction::monomial({2}).sup_norm(box) == 4.0);
    CHECK(TestFunction::constant(-3.0).sup_norm(box) == 3.0);
    const BoxDomain small = testutil::box1d(0.1, 0.5);
    const auto cosine = TestFunction::cosine({3.14159265358979323846});
    CHECK(cosine.sup_norm(small) ==
          doctest::Approx(std::cos(0.1 * 3.14159265358979323846)).epsilon(1e-12));
    const auto through_peak = TestFunction::cosine({3.14159265358979323846});
    CHECK(through_peak.sup_norm(testutil::box1d(0.5, 1.5)) == 1.0);
}

}  // TEST_SUITE
