#include "csa/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csa {

ScalarField ScalarField::constant(double v) {
    ScalarField f;
    f.v_ = f.min_ = f.max_ = v;
    return f;
}

ScalarField ScalarField::grid(std::shared_ptr<const QuadratureGrid> grid, std::vector<double> values) {
    if (!grid) throw ConfigError("grid field requires a grid");
    if (static_cast<long>(values.size()) != grid->num_cells()) {
        throw ConfigError("grid field needs one value per grid cell");
    }
    ScalarField f;
    f.min_ = f.max_ = values.front();
    for (double v : values) {
        f.min_ = std::min(f.min_, v);
        f.max_ = std::max(f.max_, v);
    }
    f.grid_ = std::move(grid);
    f.values_ = std::move(values);
    return f;
}

std::string to_string(IntensityKind kind) {
    switch (kind) {
        case IntensityKind::Constant: return "constant";
        case IntensityKind::LimitPlusExp: return "limit_plus_exp";
        case IntensityKind::LimitPlusPoly: return "limit_plus_poly";
        case IntensityKind::FinitePerturbation: return "finite_perturbation";
    }
    return "unknown";
}

namespace {

std::shared_ptr<const QuadratureGrid> merge_grids(std::shared_ptr<const QuadratureGrid> a,
                                                  std::shared_ptr<const QuadratureGrid> b) {
    if (a && b && !a->same_shape(*b)) {
        throw ConfigError("all grid-backed intensity fields must share one grid");
    }
    return a ? a : b;
}

}  // namespace

IntensityFamily IntensityFamily::constant(double beta) {
    IntensityFamily f;
    f.kind_ = IntensityKind::Constant;
    f.beta_limit_ = ScalarField::constant(beta);
    f.a_ = ScalarField::constant(0.0);
    f.finalize();
    return f;
}

IntensityFamily IntensityFamily::limit_plus_exp(ScalarField beta_limit, ScalarField a, double gamma) {
    IntensityFamily f;
    f.kind_ = IntensityKind::LimitPlusExp;
    f.beta_limit_ = std::move(beta_limit);
    f.a_ = std::move(a);
    f.gamma_ = gamma;
    f.finalize();
    return f;
}

IntensityFamily IntensityFamily::limit_plus_poly(ScalarField beta_limit, ScalarField a, double q) {
    IntensityFamily f;
    f.kind_ = IntensityKind::LimitPlusPoly;
    f.beta_limit_ = std::move(beta_limit);
    f.a_ = std::move(a);
    f.q_ = q;
    f.finalize();
    return f;
}

IntensityFamily IntensityFamily::finite_perturbation(ScalarField beta_limit,
                                                     std::vector<ScalarField> overrides) {
    IntensityFamily f;
    f.kind_ = IntensityKind::FinitePerturbation;
    f.beta_limit_ = std::move(beta_limit);
    f.a_ = ScalarField::constant(0.0);
    f.overrides_ = std::move(overrides);
    f.finalize();
    return f;
}

void IntensityFamily::finalize() {
    field_grid_ = merge_grids(beta_limit_.field_grid(), a_.field_grid());
    for (const auto& o : overrides_) field_grid_ = merge_grids(field_grid_, o.field_grid());

    const long cells = field_grid_ ? field_grid_->num_cells() : 1;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double tau = 0.0;
    for (long c = 0; c < cells; ++c) {
        const double bl = beta_limit_.at_cell(c);
        switch (kind_) {
            case IntensityKind::Constant: {
                lo = std::min(lo, bl);
                hi = std::max(hi, bl);
                break;
            }
            case IntensityKind::LimitPlusExp:
            case IntensityKind::LimitPlusPoly: {
                // phi(n) sweeps (0, 1]; extremes at n = 0 and at the limit.
                const double at0 = bl * (1.0 + a_.at_cell(c));
                lo = std::min({lo, bl, at0});
                hi = std::max({hi, bl, at0});
                tau = std::max(tau, std::abs(bl * a_.at_cell(c)));
                break;
            }
            case IntensityKind::FinitePerturbation: {
                lo = std::min(lo, bl);
                hi = std::max(hi, bl);
                for (const auto& o : overrides_) {
                    lo = std::min(lo, o.at_cell(c));
                    hi = std::max(hi, o.at_cell(c));
                    tau = std::max(tau, std::abs(o.at_cell(c) - bl));
                }
                break;
            }
        }
    }
    beta_min_ = lo;
    beta_max_ = hi;
    tau_sup_ = tau;
}

double IntensityFamily::beta_n(const Point& x, long n) const {
    switch (kind_) {
        case IntensityKind::Constant:
            return beta_limit_.at(x);
        case IntensityKind::LimitPlusExp:
            return beta_limit_.at(x) * (1.0 + a_.at(x) * std::exp(-gamma_ * static_cast<double>(n)));
        case IntensityKind::LimitPlusPoly:
            return beta_limit_.at(x) * (1.0 + a_.at(x) * std::pow(1.0 + static_cast<double>(n), -q_));
        case IntensityKind::FinitePerturbation:
            if (n < cutoff()) return overrides_[static_cast<size_t>(n)].at(x);
            return beta_limit_.at(x);
    }
    return 0.0;
}

double IntensityFamily::beta_n_cell(long cell, long n) const {
    switch (kind_) {
        case IntensityKind::Constant:
            return beta_limit_.at_cell(cell);
        case IntensityKind::LimitPlusExp:
            return beta_limit_.at_cell(cell) *
                   (1.0 + a_.at_cell(cell) * std::exp(-gamma_ * static_cast<double>(n)));
        case IntensityKind::LimitPlusPoly:
            return beta_limit_.at_cell(cell) *
                   (1.0 + a_.at_cell(cell) * std::pow(1.0 + static_cast<double>(n), -q_));
        case IntensityKind::FinitePerturbation:
            if (n < cutoff()) return overrides_[static_cast<size_t>(n)].at_cell(cell);
            return beta_limit_.at_cell(cell);
    }
    return 0.0;
}

double IntensityFamily::phi(double n) const {
    switch (kind_) {
        case IntensityKind::Constant:
            return 0.0;
        case IntensityKind::LimitPlusExp:
            return std::exp(-gamma_ * n);
        case IntensityKind::LimitPlusPoly:
            return std::pow(1.0 + n, -q_);
        case IntensityKind::FinitePerturbation:
            return n < static_cast<double>(cutoff()) ? 1.0 : 0.0;
    }
    return 0.0;
}

std::vector<FamilyViolation> IntensityFamily::validate(long n_check) const {
    std::vector<FamilyViolation> out;
    const long cells = field_grid_ ? field_grid_->num_cells() : 1;

    if (!(beta_min_ > 0.0)) {
        long where = 0;
        double worst = beta_n_cell(0, 0);
        for (long c = 0; c < cells; ++c) {
            const long n_extreme = kind_ == IntensityKind::FinitePerturbation ? cutoff() : 1;
            for (long n = 0; n <= n_extreme; ++n) {
                const double v = beta_n_cell(c, n);
                if (v < worst) {
                    worst = v;
                    where = c;
                }
            }
        }
        out.push_back({"uniform lower bound on the intensity family must be positive (beta_min = " +
                           std::to_string(beta_min_) + ")",
                       "cell " + std::to_string(where)});
    }
    if (!(beta_limit_.min_value() > 0.0)) {
        out.push_back({"the limit intensity must be bounded away from zero (min = " +
                           std::to_string(beta_limit_.min_value()) + ")",
                       "beta_limit field"});
    }
    if (!std::isfinite(beta_max_) || !(beta_max_ > 0.0)) {
        out.push_back({"uniform upper bound on the intensity family must be positive and finite",
                       "family bounds"});
    }
    if (kind_ == IntensityKind::LimitPlusExp && !(gamma_ > 0.0)) {
        out.push_back({"exponential rate parameter gamma must be positive (got " +
                           std::to_string(gamma_) + ")",
                       "gamma"});
    }
    if (kind_ == IntensityKind::LimitPlusPoly && !(q_ > 0.5)) {
        out.push_back({"polynomial rate exponent q must exceed 1/2 (got " + std::to_string(q_) +
                           "): the normalized rate sums (1/sqrt(n)) * sum_k phi(k*delta) "
                           "do not vanish otherwise",
                       "q"});
    }

    // Rate envelope |beta_n - beta_limit| <= tau_sup * phi(n), checked
    // exhaustively on the cells; exact for piecewise-constant fields.
    const bool rate_params_ok =
        (kind_ != IntensityKind::LimitPlusExp || gamma_ > 0.0) &&
        (kind_ != IntensityKind::LimitPlusPoly || q_ > 0.0);
    if (rate_params_ok) {
        int reported = 0;
        for (long n = 0; n <= n_check && reported < 3; ++n) {
            const double bound = tau_sup_ * phi(static_cast<double>(n)) + 1e-12;
            for (long c = 0; c < cells && reported < 3; ++c) {
                const double dev = std::abs(beta_n_cell(c, n) - beta_limit_cell(c));
                if (dev > bound) {
                    out.push_back({"rate envelope violated: |beta_n - beta_limit| = " +
                                       std::to_string(dev) + " > tau_sup*phi(n) = " +
                                       std::to_string(bound),
                                   "cell " + std::to_string(c) + ", n = " + std::to_string(n)});
                    ++reported;
                }
            }
        }
    }
    return out;
}

}  // namespace csa
