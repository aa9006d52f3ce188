#pragma once

#include <memory>
#include <span>
#include <vector>

#include "csa/measure.hpp"
#include "csa/sampler.hpp"

namespace testutil {

inline csa::BoxDomain box1d(double lo = 0.0, double hi = 1.0) {
    const double l[] = {lo};
    const double u[] = {hi};
    return csa::BoxDomain(std::span<const double>(l, 1), std::span<const double>(u, 1));
}

inline csa::BoxDomain box2d(double lo = 0.0, double hi = 1.0) {
    const double l[] = {lo, lo};
    const double u[] = {hi, hi};
    return csa::BoxDomain(std::span<const double>(l, 2), std::span<const double>(u, 2));
}

inline std::shared_ptr<const csa::QuadratureGrid> make_grid(const csa::BoxDomain& box,
                                                            std::vector<int> res) {
    return std::make_shared<csa::QuadratureGrid>(box,
                                                 std::span<const int>(res.data(), res.size()));
}

inline std::shared_ptr<const csa::Model> model1d(double radius, csa::IntensityFamily family,
                                                 int res = 10, double lo = 0.0, double hi = 1.0) {
    const csa::BoxDomain box = box1d(lo, hi);
    return csa::make_model(box, csa::RadiusField::constant(radius), std::move(family),
                           make_grid(box, {res}));
}

inline std::shared_ptr<const csa::Model> model2d(double radius, csa::IntensityFamily family,
                                                 int res = 10) {
    const csa::BoxDomain box = box2d();
    return csa::make_model(box, csa::RadiusField::constant(radius), std::move(family),
                           make_grid(box, {res, res}));
}

inline csa::IntensityFamily exp_family(double beta = 1.0, double a = 1.0, double gamma = 1.0) {
    return csa::IntensityFamily::limit_plus_exp(csa::ScalarField::constant(beta),
                                                csa::ScalarField::constant(a), gamma);
}

/// O(m) reference for the grid-accelerated neighbor count.
inline long brute_force_neighbor_count(const csa::Point& x, double radius,
                                       std::span<const csa::Point> pts) {
    const double r2 = radius * radius;
    long n = 0;
    for (const auto& p : pts) {
        if (csa::squared_distance(x, p, x.dim()) <= r2) ++n;
    }
    return n;
}

}  // namespace testutil
