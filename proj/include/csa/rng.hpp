#pragma once

#include <cstdint>
#include <random>

#include "csa/geometry.hpp"

namespace csa {

/// Deterministic random stream: mt19937_64 with uniforms built by explicit
/// bit manipulation, so sequences are identical across platforms and
/// standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    /// splitmix64 avalanche of (base_seed, replicate_id) into a stream seed.
    static uint64_t mix(uint64_t base_seed, uint64_t replicate_id) {
        uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * (replicate_id + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static Rng for_replicate(uint64_t base_seed, uint64_t replicate_id) {
        return Rng(mix(base_seed, replicate_id));
    }

    uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Strictly positive exponential variate with the given rate.
    double exponential(double rate) {
        const double u = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
        return -std::log(u) / rate;
    }

    /// Standard normal via Box-Muller (test utility).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform point in a box; draws one uniform per axis, axis order fixed.
    Point uniform_in(const BoxDomain& box) {
        Point p;
        std::array<double, 3> c{};
        for (int a = 0; a < box.dim(); ++a) {
            c[static_cast<size_t>(a)] = box.lower(a) + box.side(a) * uniform01();
        }
        return Point::from(std::span<const double>(c.data(), static_cast<size_t>(box.dim())));
    }

    /// Uniform point inside one grid cell.
    Point uniform_in_cell(const QuadratureGrid& grid, long cell) {
        const Point c = grid.center(cell);
        std::array<double, 3> x{};
        for (int a = 0; a < grid.dim(); ++a) {
            x[static_cast<size_t>(a)] = c[a] + grid.cell_side(a) * (uniform01() - 0.5);
        }
        return Point::from(std::span<const double>(x.data(), static_cast<size_t>(grid.dim())));
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace csa
