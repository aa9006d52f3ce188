#include "csa/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "csa/parallel.hpp"
#include "csa/stats.hpp"

namespace csa {

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

Criterion crit_less(std::string name, double observed, double threshold) {
    return {std::move(name), observed, "<", threshold, observed < threshold};
}

Criterion crit_abs_less(std::string name, double observed, double threshold) {
    return {std::move(name), observed, "|.| <", threshold, std::abs(observed) < threshold};
}

Criterion crit_greater(std::string name, double observed, double threshold) {
    return {std::move(name), observed, ">", threshold, observed > threshold};
}

Criterion crit_bool(std::string name, std::string rule, const Json& observed, bool ok) {
    return {std::move(name), observed, std::move(rule), true, ok};
}

Json params_base(uint64_t seed) {
    Json j;
    j["base_seed"] = seed;
    return j;
}

std::vector<double> ensemble_statistic(long n, int threads,
                                       const std::function<double(long)>& stat) {
    std::vector<double> values(static_cast<size_t>(n), 0.0);
    parallel_for(n, threads, [&](long r) { values[static_cast<size_t>(r)] = stat(r); });
    return values;
}

/// Per-position means of f(X_k) over an independent calibration ensemble.
std::vector<double> calibration_means(std::shared_ptr<const Model> model, const TestFunction& f,
                                      long m, long n, uint64_t seed, uint64_t id_offset,
                                      int threads) {
    std::vector<std::vector<double>> per(static_cast<size_t>(n));
    parallel_for(n, threads, [&](long r) {
        const ProcessState st = simulate(model, m, seed, id_offset + static_cast<uint64_t>(r));
        auto& row = per[static_cast<size_t>(r)];
        row.resize(static_cast<size_t>(m));
        for (long k = 0; k < m; ++k) row[static_cast<size_t>(k)] = f(st.point(k));
    });
    std::vector<double> ref(static_cast<size_t>(m), 0.0);
    for (const auto& row : per) {
        for (size_t k = 0; k < row.size(); ++k) ref[k] += row[k];
    }
    for (double& v : ref) v /= static_cast<double>(n);
    return ref;
}

void warn_if_field_discontinuous_at(const Model& model, const Point& x,
                                    VerificationReport& report) {
    const auto& fg = model.family.field_grid();
    if (!fg) return;
    for (int a = 0; a < fg->dim(); ++a) {
        const double t = (x[a] - fg->box().lower(a)) / fg->cell_side(a);
        const double frac = t - std::floor(t);
        if (frac < 1e-9 || frac > 1.0 - 1e-9) {
            report.warnings.push_back(
                "query point sits on a field-cell boundary; the limit intensity is "
                "discontinuous there");
            return;
        }
    }
}

void require_ball_inside(const Model& model, const Point& x, double shrunk_radius) {
    for (int a = 0; a < model.domain.dim(); ++a) {
        if (x[a] - shrunk_radius < model.domain.lower(a) ||
            x[a] + shrunk_radius > model.domain.upper(a)) {
            throw RefusalError("the shrunken ball must lie inside the domain");
        }
    }
}

/// Empirical TV distance between integer counts and Poisson(lambda), plus a
/// deterministic Monte Carlo standard error proxy for the estimate.
struct TvAgainstPoisson {
    double tv = 0.0;
    double se = 0.0;
};

TvAgainstPoisson tv_against_poisson(std::span<const long> counts, double lambda) {
    long max_count = 0;
    for (long c : counts) max_count = std::max(max_count, c);
    std::vector<long> hist(static_cast<size_t>(max_count) + 1, 0);
    for (long c : counts) ++hist[static_cast<size_t>(c)];
    const auto n = static_cast<double>(counts.size());

    TvAgainstPoisson out;
    double covered = 0.0;
    for (long j = 0; j <= max_count; ++j) {
        const double q = stats::poisson_pmf(j, lambda);
        covered += q;
        out.tv += std::abs(static_cast<double>(hist[static_cast<size_t>(j)]) / n - q);
    }
    out.tv = 0.5 * (out.tv + std::max(0.0, 1.0 - covered));

    const long j_cap = std::max<long>(max_count, static_cast<long>(lambda + 10.0 * std::sqrt(lambda) + 20.0));
    for (long j = 0; j <= j_cap; ++j) {
        const double q = stats::poisson_pmf(j, lambda);
        if (q < 1e-12) continue;
        out.se += std::sqrt(q * (1.0 - q) / n);
    }
    out.se *= 0.5;
    return out;
}

double tv_table(std::span<const long> counts, std::span<const double> masses, double n_samples) {
    double tv = 0.0;
    for (size_t i = 0; i < masses.size(); ++i) {
        tv += std::abs(static_cast<double>(counts[i]) / n_samples - masses[i]);
    }
    return 0.5 * tv;
}

/// Expected multinomial-noise TV at the given sample count (normal
/// approximation): 0.5 * sqrt(2/pi) * sum sqrt(p(1-p)/n).
double expected_noise_tv(std::span<const double> masses, double n_samples) {
    double s = 0.0;
    for (const double p : masses) s += std::sqrt(p * (1.0 - p) / n_samples);
    return 0.5 * std::sqrt(2.0 / 3.14159265358979323846) * s;
}

}  // namespace

VerificationReport run_lln(std::shared_ptr<const Model> model, const TestFunction& f,
                           const LlnParams& p, const RunContext& ctx) {
    Stopwatch watch;
    if (p.m_list.empty()) throw RefusalError("LLN check needs a nonempty m ladder");
    if (p.replicates < 1) throw RefusalError("LLN check needs at least one replicate");

    VerificationReport report;
    report.test = "lln";
    report.seed = ctx.base_seed;
    const double j_ref = compute_J(f, model->family, *model->grid);

    std::vector<double> medians;
    for (size_t mi = 0; mi < p.m_list.size(); ++mi) {
        const long m = p.m_list[mi];
        const uint64_t offset = static_cast<uint64_t>(mi) * static_cast<uint64_t>(p.replicates);
        const auto errs = ensemble_statistic(p.replicates, ctx.threads, [&](long r) {
            const ProcessState st =
                simulate(model, m, ctx.base_seed, offset + static_cast<uint64_t>(r));
            double sum = 0.0;
            for (long k = 0; k < m; ++k) sum += f(st.point(k));
            return std::abs(sum / static_cast<double>(m) - j_ref);
        });
        for (long r = 0; r < p.replicates; ++r) {
            report.replicate_stats.push_back({static_cast<long>(offset) + r,
                                              "abs_err_m" + std::to_string(m),
                                              errs[static_cast<size_t>(r)]});
        }
        medians.push_back(stats::median(errs));
    }

    report.params = params_base(ctx.base_seed);
    report.params["m_list"] = p.m_list;
    report.params["replicates"] = p.replicates;
    report.params["tol"] = p.tol;
    report.observed["median_abs_error"] = medians;
    report.reference["J_f"] = j_ref;

    report.criteria.push_back(crit_bool("median_error_strictly_decreasing", "strictly decreasing",
                                        medians, stats::strictly_decreasing(medians)));
    report.criteria.push_back(crit_less("median_error_at_largest_m", medians.back(), p.tol));
    report.finalize();
    report.runtime_ms = watch.ms();
    return report;
}

VerificationReport run_clt(std::shared_ptr<const Model> model, const TestFunction& f,
                           const CltParams& p, const RunContext& ctx) {
    Stopwatch watch;
    const auto violations = model->family.validate();
    if (!violations.empty()) {
        std::string msg = "CLT check refused, the intensity family fails validation:";
        for (const auto& v : violations) msg += "\n  - " + v.what + " [" + v.where + "]";
        throw RefusalError(msg);
    }

    VerificationReport report;
    report.test = "clt";
    report.seed = ctx.base_seed;
    const double g_ref = compute_G(f, f, model->family, *model->grid);
    const double j_ref = compute_J(f, model->family, *model->grid);

    report.params = params_base(ctx.base_seed);
    report.params["m"] = p.m;
    report.params["replicates"] = p.replicates;
    report.params["variance_slack"] = p.variance_slack;
    report.params["ks_slack"] = p.ks_slack;
    report.reference["G_ff"] = g_ref;
    report.reference["J_f"] = j_ref;

    const long n = p.replicates;
    if (g_ref <= 1e-12) {
        // Degenerate direction: S_m(f) vanishes identically; the
        // distributional check is meaningless and is skipped.
        report.warnings.push_back("G(f,f) = 0: degenerate test function, KS check skipped");
        const std::vector<double> ref(static_cast<size_t>(p.m), j_ref);
        const auto svals = ensemble_statistic(n, ctx.threads, [&](long r) {
            const ProcessState st = simulate(model, p.m, ctx.base_seed, static_cast<uint64_t>(r));
            return centered_scaled_sum(f, st, ref);
        });
        double max_abs = 0.0;
        for (double s : svals) max_abs = std::max(max_abs, std::abs(s));
        report.params["centering"] = "limit_mean";
        report.observed["max_abs_S"] = max_abs;
        report.criteria.push_back(crit_less("degenerate_sums_vanish", max_abs, 1e-9));
        report.finalize();
        report.runtime_ms = watch.ms();
        return report;
    }

    std::vector<double> ref;
    if (p.centering == Centering::Calibration) {
        report.params["centering"] = "calibration";
        ref = calibration_means(model, f, p.m, n, ctx.base_seed, static_cast<uint64_t>(n),
                                ctx.threads);
    } else {
        // Cheaper centering at J(f); adds a transient drift of order
        // sum_k phi(k delta) / sqrt(m).
        report.params["centering"] = "limit_mean";
        ref.assign(static_cast<size_t>(p.m), j_ref);
        report.warnings.push_back("centered at J(f); early-index transient bias is not removed");
    }

    const auto svals = ensemble_statistic(n, ctx.threads, [&](long r) {
        const ProcessState st = simulate(model, p.m, ctx.base_seed, static_cast<uint64_t>(r));
        return centered_scaled_sum(f, st, ref);
    });
    for (long r = 0; r < n; ++r) {
        report.replicate_stats.push_back({r, "S_m", svals[static_cast<size_t>(r)]});
    }

    const SampleStatistics st = SampleStatistics::from(svals);
    const double half_width = 3.0 * std::sqrt(2.0 / static_cast<double>(n)) + p.variance_slack;
    const double var_lo = g_ref * (1.0 - half_width);
    const double var_hi = g_ref * (1.0 + half_width);
    const double ks = stats::ks_distance_normal(st.values, 0.0, std::sqrt(g_ref));
    const double ks_threshold = 1.63 / std::sqrt(static_cast<double>(n)) + p.ks_slack;

    report.observed["variance"] = st.variance;
    report.observed["ks_distance"] = ks;
    report.observed["mean"] = st.mean;

    Json window;
    window["lo"] = var_lo;
    window["hi"] = var_hi;
    report.criteria.push_back(crit_bool("variance_in_window", "within [lo, hi]", st.variance,
                                        st.variance >= var_lo && st.variance <= var_hi));
    report.criteria.back().threshold = window;
    report.criteria.push_back(crit_less("ks_distance_to_normal", ks, ks_threshold));
    report.finalize();
    report.runtime_ms = watch.ms();
    return report;
}

VerificationReport run_poisson(std::shared_ptr<const Model> model, const PoissonParams& p,
                               const RunContext& ctx) {
    Stopwatch watch;
    if (p.m < 1 || p.replicates < 1) throw RefusalError("Poisson check needs m >= 1 and N >= 1");
    const int d = model->domain.dim();
    const double shrunk = p.r * std::pow(static_cast<double>(p.m), -1.0 / d);
    require_ball_inside(*model, p.x, shrunk);

    VerificationReport report;
    report.test = "poisson";
    report.seed = ctx.base_seed;
    warn_if_field_discontinuous_at(*model, p.x, report);

    const double alpha = quad_alpha_limit(model->family, *model->grid);
    const double lambda =
        std::pow(p.r, d) * ball_volume_coeff(d) * model->family.beta_limit(p.x) / alpha;

    std::vector<long> ball_counts(static_cast<size_t>(p.replicates), 0);
    parallel_for(p.replicates, ctx.threads, [&](long r) {
        const ProcessState st = simulate(model, p.m, ctx.base_seed, static_cast<uint64_t>(r));
        ball_counts[static_cast<size_t>(r)] = ball_count(st, p.x, p.r).count;
    });
    for (long r = 0; r < p.replicates; ++r) {
        report.replicate_stats.push_back(
            {r, "ball_count", static_cast<double>(ball_counts[static_cast<size_t>(r)])});
    }

    // Pooled bins {0,1,2,3,>=4}: expected counts stay healthy for lambda <= 3.
    std::array<long, 5> observed{0, 0, 0, 0, 0};
    for (long c : ball_counts) ++observed[static_cast<size_t>(std::min<long>(c, 4))];
    std::array<double, 5> expected{};
    double tail = 1.0;
    for (int j = 0; j < 4; ++j) {
        const double q = stats::poisson_pmf(j, lambda);
        expected[static_cast<size_t>(j)] = q * static_cast<double>(p.replicates);
        tail -= q;
    }
    expected[4] = std::max(tail, 1e-300) * static_cast<double>(p.replicates);

    const auto gof = stats::chi_square_gof(std::span<const long>(observed.data(), 5),
                                           std::span<const double>(expected.data(), 5));
    double mean = 0.0;
    for (long c : ball_counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(p.replicates);
    const double mean_tol = 3.0 * std::sqrt(lambda / static_cast<double>(p.replicates));

    report.params = params_base(ctx.base_seed);
    report.params["x"] = Json::array();
    for (int a = 0; a < d; ++a) report.params["x"].push_back(p.x[a]);
    report.params["r"] = p.r;
    report.params["m"] = p.m;
    report.params["replicates"] = p.replicates;
    report.params["p_min"] = p.p_min;
    report.observed["bin_counts"] = observed;
    report.observed["chi_square"] = gof.statistic;
    report.observed["mean_count"] = mean;
    report.reference["lambda"] = lambda;
    report.reference["alpha"] = alpha;
    report.reference["shrunk_radius"] = shrunk;

    report.criteria.push_back(crit_greater("poisson_gof_p_value", gof.p_value, p.p_min));
    report.criteria.push_back(crit_abs_less("mean_minus_lambda", mean - lambda, mean_tol));
    report.finalize();
    report.runtime_ms = watch.ms();
    return report;
}

VerificationReport run_poisson_tv_bound(std::shared_ptr<const Model> model, const TvBoundParams& p,
                                        const RunContext& ctx) {
    Stopwatch watch;
    if (p.m > 500) {
        throw RefusalError(
            "total-variation bound check is limited to m <= 500 (per-step quadrature cost)");
    }
    const int d = model->domain.dim();
    const double shrunk = p.r * std::pow(static_cast<double>(p.m), -1.0 / d);
    require_ball_inside(*model, p.x, shrunk);

    VerificationReport report;
    report.test = "poisson_tv_bound";
    report.seed = ctx.base_seed;
    warn_if_field_discontinuous_at(*model, p.x, report);
    if (model->family.field_grid() || !model->radius.is_constant()) {
        const auto& fg = model->family.field_grid();
        if (fg) {
            const long cell = fg->cell_of(p.x);
            const Point lo = fg->center(cell);
            for (int a = 0; a < d; ++a) {
                if (std::abs(p.x[a] - lo[a]) + shrunk > 0.5 * fg->cell_side(a)) {
                    report.warnings.push_back(
                        "shrunken ball crosses a field cell; p_m assumes a locally constant "
                        "intensity");
                    break;
                }
            }
        }
    }

    const double vol_ball = ball_volume_coeff(d) * std::pow(shrunk, d);
    const double alpha = quad_alpha_limit(model->family, *model->grid);
    const double p_m = model->family.beta_limit(p.x) * vol_ball / alpha;
    const double mp2 = static_cast<double>(p.m) * p_m * p_m;

    std::vector<long> ball_counts(static_cast<size_t>(p.replicates), 0);
    std::vector<double> dev_sums(static_cast<size_t>(p.replicates), 0.0);
    parallel_for(p.replicates, ctx.threads, [&](long r) {
        ProcessState st(model, ctx.base_seed, static_cast<uint64_t>(r));
        Rng rng = Rng::for_replicate(ctx.base_seed, static_cast<uint64_t>(r));
        CellCountTracker tracker(model);
        double dev = 0.0;
        for (long k = 0; k < p.m; ++k) {
            const double jk =
                model->family.beta_n(p.x, st.neighbor_count(p.x)) * vol_ball / tracker.alpha();
            dev += std::abs(jk - p_m);
            const ArResult res = next_point_ar(st, rng, model->max_attempts);
            st.insert(res.point, res.attempts);
            tracker.add_point(res.point);
        }
        dev_sums[static_cast<size_t>(r)] = dev;
        ball_counts[static_cast<size_t>(r)] = ball_count(st, p.x, p.r).count;
    });
    for (long r = 0; r < p.replicates; ++r) {
        report.replicate_stats.push_back(
            {r, "ball_count", static_cast<double>(ball_counts[static_cast<size_t>(r)])});
        report.replicate_stats.push_back({r, "jk_deviation_sum", dev_sums[static_cast<size_t>(r)]});
    }

    const double mean_dev = stats::mean(dev_sums);
    const double bound = mp2 + mean_dev;
    const auto tv = tv_against_poisson(ball_counts, static_cast<double>(p.m) * p_m);

    report.params = params_base(ctx.base_seed);
    report.params["x"] = Json::array();
    for (int a = 0; a < d; ++a) report.params["x"].push_back(p.x[a]);
    report.params["r"] = p.r;
    report.params["m"] = p.m;
    report.params["replicates"] = p.replicates;
    report.observed["empirical_tv"] = tv.tv;
    report.observed["mean_jk_deviation_sum"] = mean_dev;
    report.observed["tv_se"] = tv.se;
    report.reference["p_m"] = p_m;
    report.reference["m_pm_squared"] = mp2;
    report.reference["bound"] = bound;
    report.reference["poisson_mean"] = static_cast<double>(p.m) * p_m;

    report.criteria.push_back(crit_less("tv_within_bound", tv.tv, bound + 3.0 * tv.se));
    report.finalize();
    report.runtime_ms = watch.ms();
    return report;
}

CoverageThreshold coverage_delta0(const Model& model) {
    const int d = model.domain.dim();
    const double r_min = model.radius.r_min();
    const double max_side = model.domain.max_side();
    const double ratio = model.family.beta_min() / model.family.beta_max();
    for (long l = 1; l <= 1000000; ++l) {
        const double delta0 = std::pow(static_cast<double>(l), -d) * ratio;
        if (max_side / static_cast<double>(l) < 0.25 * r_min && delta0 < 1.0) {
            return {l, delta0};
        }
    }
    throw RefusalError("coverage mesh recipe found no admissible partition (radius too small)");
}

VerificationReport run_coverage(std::shared_ptr<const Model> model, const CoverageParams& p,
                                const RunContext& ctx) {
    Stopwatch watch;
    const CoverageThreshold th = coverage_delta0(*model);
    const double delta = p.delta > 0.0 ? p.delta : 0.5 * th.delta0;
    if (delta >= th.delta0) {
        throw RefusalError("coverage check needs delta < delta0 = " + std::to_string(th.delta0) +
                           " (mesh l = " + std::to_string(th.l) + ")");
    }
    if (p.m_list.empty()) throw RefusalError("coverage check needs a nonempty m ladder");

    VerificationReport report;
    report.test = "coverage";
    report.seed = ctx.base_seed;
    const QuadratureGrid& grid = *model->grid;
    for (int a = 0; a < grid.dim(); ++a) {
        if (grid.cell_side(a) > 0.5 * model->radius.r_min()) {
            report.warnings.push_back(
                "verification grid coarser than r_min/2; the cell-center minimum is an "
                "optimistic proxy for the true infimum");
            break;
        }
    }

    std::vector<Point> centers(static_cast<size_t>(grid.num_cells()));
    for (long c = 0; c < grid.num_cells(); ++c) centers[static_cast<size_t>(c)] = grid.center(c);

    std::vector<double> fractions;
    for (size_t mi = 0; mi < p.m_list.size(); ++mi) {
        const long m = p.m_list[mi];
        const uint64_t offset = static_cast<uint64_t>(mi) * static_cast<uint64_t>(p.replicates);
        std::vector<double> mins(static_cast<size_t>(p.replicates), 0.0);
        parallel_for(p.replicates, ctx.threads, [&](long r) {
            const ProcessState st =
                simulate(model, m, ctx.base_seed, offset + static_cast<uint64_t>(r));
            long min_n = st.neighbor_count(centers[0]);
            for (size_t c = 1; c < centers.size(); ++c) {
                min_n = std::min(min_n, st.neighbor_count(centers[c]));
                if (min_n == 0) break;
            }
            mins[static_cast<size_t>(r)] = static_cast<double>(min_n);
        });
        long failures = 0;
        for (long r = 0; r < p.replicates; ++r) {
            const double min_n = mins[static_cast<size_t>(r)];
            report.replicate_stats.push_back(
                {static_cast<long>(offset) + r, "min_coverage_m" + std::to_string(m), min_n});
            if (min_n <= static_cast<double>(m) * delta) ++failures;
        }
        fractions.push_back(static_cast<double>(failures) / static_cast<double>(p.replicates));
    }

    report.params = params_base(ctx.base_seed);
    report.params["delta"] = delta;
    report.params["m_list"] = p.m_list;
    report.params["replicates"] = p.replicates;
    report.observed["failure_fraction"] = fractions;
    report.reference["delta0"] = th.delta0;
    report.reference["mesh_l"] = th.l;

    report.criteria.push_back(crit_bool("failure_fraction_nonincreasing", "nonincreasing",
                                        fractions, stats::nonincreasing(fractions)));
    report.criteria.push_back(
        crit_bool("failure_fraction_zero_at_largest_m", "== 0", fractions.back(),
                  fractions.back() == 0.0));
    report.finalize();
    report.runtime_ms = watch.ms();
    return report;
}

VerificationReport run_cumulants(std::shared_ptr<const Model> model, const TestFunction& f,
                                 const CumulantParams& p, const RunContext& ctx) {
    Stopwatch watch;
    if (!model->family.exponential_rate()) {
        throw RefusalError(
            "cumulant decay check requires an intensity family with an exponential "
            "convergence rate; polynomial-rate families are out of scope");
    }
    if (!(p.epsilon > 0.0 && p.epsilon < 0.5)) {
        throw RefusalError("cumulant check needs 0 < epsilon < 1/2");
    }
    const long start =
        std::max<long>(1, static_cast<long>(std::ceil(std::pow(static_cast<double>(p.m), p.epsilon))));
    if (start >= p.m) throw RefusalError("m too small for the requested epsilon");
    const long tail_len = p.m - start + 1;

    VerificationReport report;
    report.test = "cumulants";
    report.seed = ctx.base_seed;
    const double g_ref = compute_G(f, f, model->family, *model->grid);
    const double j_ref = compute_J(f, model->family, *model->grid);
    const long n = p.replicates;

    std::vector<double> ref;
    if (p.centering == Centering::Calibration) {
        report.params["centering"] = "calibration";
        ref = calibration_means(model, f, p.m, n, ctx.base_seed, static_cast<uint64_t>(n),
                                ctx.threads);
    } else {
        report.params["centering"] = "limit_mean";
        ref.assign(static_cast<size_t>(p.m), j_ref);
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(tail_len));
    const auto svals = ensemble_statistic(n, ctx.threads, [&](long r) {
        const ProcessState st = simulate(model, p.m, ctx.base_seed, static_cast<uint64_t>(r));
        double sum = 0.0;
        for (long k = start - 1; k < p.m; ++k) {
            sum += f(st.point(k)) - ref[static_cast<size_t>(k)];
        }
        return sum * scale;
    });
    for (long r = 0; r < n; ++r) {
        report.replicate_stats.push_back({r, "S_tail", svals[static_cast<size_t>(r)]});
    }

    const SampleStatistics st = SampleStatistics::from(svals);
    const double se_k2 = 3.0 * std::sqrt(2.0 / static_cast<double>(n)) * g_ref + p.slack;
    const double se_k3 = 3.0 * std::sqrt(6.0 / static_cast<double>(n)) * std::pow(g_ref, 1.5) + p.slack;
    const double se_k4 = 3.0 * std::sqrt(24.0 / static_cast<double>(n)) * g_ref * g_ref + p.slack;

    report.params["base_seed"] = ctx.base_seed;
    report.params["epsilon"] = p.epsilon;
    report.params["m"] = p.m;
    report.params["tail_start"] = start;
    report.params["replicates"] = n;
    report.params["slack"] = p.slack;
    report.observed["k2"] = st.k2;
    report.observed["k3"] = st.k3;
    report.observed["k4"] = st.k4;
    report.reference["G_ff"] = g_ref;

    report.criteria.push_back(crit_abs_less("k2_minus_G", st.k2 - g_ref, se_k2));
    report.criteria.push_back(crit_abs_less("k3", st.k3, se_k3));
    report.criteria.push_back(crit_abs_less("k4", st.k4, se_k4));
    report.finalize();
    report.runtime_ms = watch.ms();
    return report;
}

VerificationReport run_density_oracle(std::shared_ptr<const Model> model, const OracleParams& p,
                                      const RunContext& ctx) {
    Stopwatch watch;
    if (p.m < 1) throw RefusalError("oracle check needs m >= 1");
    if (p.samples < 1000) throw RefusalError("oracle check needs at least 1000 samples");

    VerificationReport report;
    report.test = "density_oracle";
    report.seed = ctx.base_seed;

    const DiscretizedModel dm(model);
    const std::vector<double> masses = dm.tuple_masses(p.m);
    const auto k_tuples = static_cast<long>(masses.size());

    // Exact (discretized-model) sampler: empirical tuple frequencies carry
    // multinomial noise only.
    std::vector<long> counts(masses.size(), 0);
    {
        ExactSampler sampler(model);
        Rng rng = Rng::for_replicate(ctx.base_seed, 1);
        std::vector<long> seq(static_cast<size_t>(p.m));
        for (long s = 0; s < p.samples; ++s) {
            sampler.reset();
            for (int i = 0; i < p.m; ++i) sampler.next(rng);
            const auto cells = sampler.cell_sequence();
            std::copy(cells.begin(), cells.end(), seq.begin());
            ++counts[static_cast<size_t>(dm.tuple_index(seq))];
        }
    }
    const double tv_exact = tv_table(counts, masses, static_cast<double>(p.samples));
    const double tol_exact =
        4.0 * std::sqrt(static_cast<double>(k_tuples) / (2.0 * static_cast<double>(p.samples))) +
        p.slack;

    report.params = params_base(ctx.base_seed);
    report.params["m"] = p.m;
    report.params["samples"] = p.samples;
    report.params["slack"] = p.slack;
    report.observed["exact_sampler_tv"] = tv_exact;
    report.reference["tuple_count"] = k_tuples;
    report.reference["exact_noise_floor_tv"] =
        expected_noise_tv(masses, static_cast<double>(p.samples));
    report.criteria.push_back(crit_less("exact_tuple_tv", tv_exact, tol_exact));

    if (p.include_ar) {
        // Continuous-model AR sampler binned onto the same cells: the gap
        // additionally contains the discretization error, so the default
        // tolerance carries an allowance for it.
        std::vector<long> ar_counts(masses.size(), 0);
        Rng rng = Rng::for_replicate(ctx.base_seed, 2);
        std::vector<long> seq(static_cast<size_t>(p.m));
        const QuadratureGrid& grid = *model->grid;
        for (long s = 0; s < p.ar_samples; ++s) {
            ProcessState st(model, ctx.base_seed, static_cast<uint64_t>(s));
            for (int i = 0; i < p.m; ++i) {
                const ArResult res = next_point_ar(st, rng, model->max_attempts);
                st.insert(res.point, res.attempts);
                seq[static_cast<size_t>(i)] = grid.cell_of(res.point);
            }
            ++ar_counts[static_cast<size_t>(dm.tuple_index(seq))];
        }
        const double tv_ar = tv_table(ar_counts, masses, static_cast<double>(p.ar_samples));
        const double tol_ar =
            p.ar_tol > 0.0
                ? p.ar_tol
                : 4.0 * std::sqrt(static_cast<double>(k_tuples) /
                                  (2.0 * static_cast<double>(p.ar_samples))) +
                      p.slack + 0.01;
        report.params["ar_samples"] = p.ar_samples;
        report.observed["ar_sampler_tv"] = tv_ar;
        report.reference["ar_noise_floor_tv"] =
            expected_noise_tv(masses, static_cast<double>(p.ar_samples));
        report.criteria.push_back(crit_less("ar_tuple_tv", tv_ar, tol_ar));
    }

    report.finalize();
    report.runtime_ms = watch.ms();
    return report;
}

VerificationReport run_uniform_gof(std::shared_ptr<const Model> model, const UniformParams& p,
                                   const RunContext& ctx) {
    Stopwatch watch;
    if (model->family.kind() != IntensityKind::Constant) {
        throw RefusalError(
            "uniform goodness-of-fit applies to the constant intensity family only");
    }
    if (p.m < 1 || p.replicates < 1) throw RefusalError("uniform check needs m >= 1 and N >= 1");

    VerificationReport report;
    report.test = "uniform_gof";
    report.seed = ctx.base_seed;
    const QuadratureGrid& grid = *model->grid;
    const long cells = grid.num_cells();

    std::vector<std::vector<long>> per(static_cast<size_t>(p.replicates));
    parallel_for(p.replicates, ctx.threads, [&](long r) {
        const ProcessState st = simulate(model, p.m, ctx.base_seed, static_cast<uint64_t>(r));
        auto& local = per[static_cast<size_t>(r)];
        local.assign(static_cast<size_t>(cells), 0);
        for (const Point& pt : st.points()) ++local[static_cast<size_t>(grid.cell_of(pt))];
    });
    std::vector<long> observed(static_cast<size_t>(cells), 0);
    for (const auto& local : per) {
        for (long c = 0; c < cells; ++c) observed[static_cast<size_t>(c)] += local[static_cast<size_t>(c)];
    }
    const double total = static_cast<double>(p.m) * static_cast<double>(p.replicates);
    const std::vector<double> expected(static_cast<size_t>(cells),
                                       total / static_cast<double>(cells));
    const auto gof = stats::chi_square_gof(observed, expected);

    report.params = params_base(ctx.base_seed);
    report.params["m"] = p.m;
    report.params["replicates"] = p.replicates;
    report.params["p_min"] = p.p_min;
    report.observed["chi_square"] = gof.statistic;
    report.observed["dof"] = gof.dof;
    report.observed["samples"] = total;
    report.criteria.push_back(crit_greater("uniform_gof_p_value", gof.p_value, p.p_min));
    report.finalize();
    report.runtime_ms = watch.ms();
    return report;
}

}  // namespace csa
