#pragma once

#include <memory>
#include <string>
#include <vector>

#include "csa/geometry.hpp"

namespace csa {

/// A bounded measurable field on the domain: either a constant or a
/// piecewise-constant function on a quadrature grid (cell lookup).
class ScalarField {
public:
    ScalarField() = default;  // constant zero

    static ScalarField constant(double v);
    static ScalarField grid(std::shared_ptr<const QuadratureGrid> grid, std::vector<double> values);

    double at(const Point& x) const {
        return grid_ ? values_[static_cast<size_t>(grid_->cell_of(x))] : v_;
    }
    double at_cell(long cell) const {
        return grid_ ? values_[static_cast<size_t>(cell)] : v_;
    }
    bool is_constant() const { return grid_ == nullptr; }
    double min_value() const { return min_; }
    double max_value() const { return max_; }
    const std::shared_ptr<const QuadratureGrid>& field_grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double constant_value() const { return v_; }

private:
    double v_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
    std::shared_ptr<const QuadratureGrid> grid_;
    std::vector<double> values_;
};

enum class IntensityKind { Constant, LimitPlusExp, LimitPlusPoly, FinitePerturbation };

std::string to_string(IntensityKind kind);

struct FamilyViolation {
    std::string what;
    std::string where;
};

/// The intensity family {beta_n(x)} together with its limit, convergence
/// rate phi(n) and uniform bounds. Immutable once constructed.
///
/// Built-in kinds:
///   constant             beta_n = beta for all n (the i.i.d. case)
///   limit_plus_exp       beta_n(x) = beta(x) * (1 + a(x) * exp(-gamma n))
///   limit_plus_poly      beta_n(x) = beta(x) * (1 + a(x) * (1+n)^-q)
///   finite_perturbation  beta_n = overrides[n] for n < n0, beta otherwise
class IntensityFamily {
public:
    static IntensityFamily constant(double beta);
    static IntensityFamily limit_plus_exp(ScalarField beta_limit, ScalarField a, double gamma);
    static IntensityFamily limit_plus_poly(ScalarField beta_limit, ScalarField a, double q);
    static IntensityFamily finite_perturbation(ScalarField beta_limit,
                                               std::vector<ScalarField> overrides);

    IntensityKind kind() const { return kind_; }

    double beta_n(const Point& x, long n) const;
    double beta_n_cell(long cell, long n) const;
    double beta_limit(const Point& x) const { return beta_limit_.at(x); }
    double beta_limit_cell(long cell) const { return beta_limit_.at_cell(cell); }

    /// Convergence-rate envelope: |beta_n - beta_limit| <= tau_sup * phi(n);
    /// nonincreasing in n with phi(n) -> 0.
    double phi(double n) const;

    double beta_min() const { return beta_min_; }
    double beta_max() const { return beta_max_; }
    double tau_sup() const { return tau_sup_; }

    /// True when phi decays at least exponentially (constant and
    /// finite-perturbation families converge even faster).
    bool exponential_rate() const { return kind_ != IntensityKind::LimitPlusPoly; }

    double gamma() const { return gamma_; }
    double q() const { return q_; }
    long cutoff() const { return static_cast<long>(overrides_.size()); }

    const ScalarField& beta_limit_field() const { return beta_limit_; }
    const ScalarField& a_field() const { return a_; }
    const std::vector<ScalarField>& overrides() const { return overrides_; }

    /// Grid shared by the grid-backed fields, or null if all are constant.
    const std::shared_ptr<const QuadratureGrid>& field_grid() const { return field_grid_; }

    /// Checks every family invariant by exhaustive evaluation on the field
    /// cells and n in {0..n_check}; exact because fields are piecewise
    /// constant. Violations are data, not exceptions.
    std::vector<FamilyViolation> validate(long n_check = 1000) const;

private:
    IntensityFamily() = default;
    void finalize();

    IntensityKind kind_ = IntensityKind::Constant;
    ScalarField beta_limit_;
    ScalarField a_;
    std::vector<ScalarField> overrides_;
    double gamma_ = 0.0;
    double q_ = 0.0;
    double beta_min_ = 0.0;
    double beta_max_ = 0.0;
    double tau_sup_ = 0.0;
    std::shared_ptr<const QuadratureGrid> field_grid_;
};

}  // namespace csa
