#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "csa/geometry.hpp"
#include "csa/intensity.hpp"
#include "csa/rng.hpp"

namespace csa {

inline constexpr long kDefaultMaxAttempts = 1000000;

/// Immutable simulation model: domain, interaction radius, intensity family
/// and the quadrature grid shared by all field lookups and integrals.
/// Shareable across threads.
struct Model {
    BoxDomain domain;
    RadiusField radius;
    IntensityFamily family;
    std::shared_ptr<const QuadratureGrid> grid;
    long max_attempts = kDefaultMaxAttempts;

    Model(BoxDomain domain_, RadiusField radius_, IntensityFamily family_,
          std::shared_ptr<const QuadratureGrid> grid_, long max_attempts_ = kDefaultMaxAttempts);

    /// Index cell: min(r_min, shortest side / 8) bounds the cells scanned
    /// per neighbor query while keeping the lattice modest.
    double index_cell_size() const;
};

std::shared_ptr<const Model> make_model(BoxDomain domain, RadiusField radius,
                                        IntensityFamily family,
                                        std::shared_ptr<const QuadratureGrid> grid,
                                        long max_attempts = kDefaultMaxAttempts);

/// The ordered point configuration X(1..k) plus its spatial index.
/// Mutated single-threaded; frozen states are safe to read concurrently.
class ProcessState {
public:
    ProcessState(std::shared_ptr<const Model> model, uint64_t seed = 0, uint64_t replicate_id = 0);

    const Model& model() const { return *model_; }
    const std::shared_ptr<const Model>& model_ptr() const { return model_; }
    long size() const { return static_cast<long>(points_.size()); }
    std::span<const Point> points() const { return points_; }
    const Point& point(long k) const { return points_[static_cast<size_t>(k)]; }
    std::span<const uint32_t> attempts() const { return attempts_; }
    uint64_t seed() const { return seed_; }
    uint64_t replicate_id() const { return replicate_id_; }
    const GridIndex& index() const { return index_; }

    /// Appends x and registers it in its grid cell.
    /// Throws DomainError when x lies outside the domain.
    void insert(const Point& x, uint32_t attempts = 1);

    /// |{i : ||x - X_i|| <= R(x)}|, closed ball, radius taken at the query
    /// point; scans only index cells intersecting the ball.
    long neighbor_count(const Point& x) const;

private:
    std::shared_ptr<const Model> model_;
    std::vector<Point> points_;
    std::vector<uint32_t> attempts_;
    GridIndex index_;
    uint64_t seed_ = 0;
    uint64_t replicate_id_ = 0;
};

/// Free-function form of the neighbor-count query.
inline long neighbor_count(const Point& x, const ProcessState& state) {
    return state.neighbor_count(x);
}

struct ArResult {
    Point point;
    uint32_t attempts;
};

/// One acceptance-rejection draw of the next point given the current
/// configuration: proposals are uniform on the domain and accepted with
/// probability beta_n(Y)/beta_max. The envelope beta_max is the smallest
/// valid constant, minimizing rejections. Draw order per proposal: d
/// coordinate uniforms, then the acceptance uniform.
/// Throws StallError after max_attempts rejected proposals.
ArResult next_point_ar(const ProcessState& state, Rng& rng, long max_attempts = kDefaultMaxAttempts);

/// Runs next_point_ar m times from the empty configuration. Output is a
/// deterministic function of (base_seed, replicate_id).
ProcessState simulate(std::shared_ptr<const Model> model, long m, uint64_t base_seed,
                      uint64_t replicate_id);

/// Jump times of the equivalent continuous-time arrival process: holding
/// time k is exponential with rate alpha(X(k)), the total arrival rate of
/// the current configuration (cell-center quadrature).
struct BirthTrajectory {
    std::vector<double> times;  // strictly increasing, one per accepted point
    std::vector<double> rates;  // alpha(X(k)) in effect before point k+1
};

/// Same point law as simulate (the clock uses its own substream so the
/// point sequence matches simulate bit for bit for equal seeds).
std::pair<ProcessState, BirthTrajectory> simulate_birth_process(std::shared_ptr<const Model> model,
                                                                long m, uint64_t base_seed,
                                                                uint64_t replicate_id);

/// Discretized companion model: the neighbor count n(x, .) is evaluated
/// between cell centers and all fields at cell centers, so the conditional
/// density is piecewise constant and cell sums are exact. Used by the exact
/// sampler and the joint-density oracle.
class DiscretizedModel {
public:
    explicit DiscretizedModel(std::shared_ptr<const Model> model);

    const Model& model() const { return *model_; }
    const QuadratureGrid& grid() const { return *model_->grid; }
    long num_cells() const { return grid().num_cells(); }

    /// n(center(cell), prefix) where the prefix is given as per-cell point
    /// counts (points identified with their cell centers).
    long count_at(long cell, std::span<const long> counts_by_cell) const;

    /// alpha(prefix) = sum_c beta_{n(c)}(c) * cell_volume.
    double alpha(std::span<const long> counts_by_cell) const;

    /// Unnormalized per-cell masses beta_{n(c)}(c) * cell_volume.
    void cell_weights(std::span<const long> counts_by_cell, std::vector<double>& out) const;

    /// Joint density p_m(x_1,...,x_m) of the discretized model, integrals
    /// as exact cell sums. Guarded to m <= 4.
    double joint_density(std::span<const Point> points) const;

    /// Probability mass of every ordered cell tuple of length m,
    /// lexicographic order, cells^m entries (refused above 10^6).
    std::vector<double> tuple_masses(int m) const;

    long tuple_index(std::span<const long> cells) const;

private:
    std::shared_ptr<const Model> model_;
    std::vector<std::vector<int32_t>> reach_;  // cells q with ||c_q - c|| <= R(c), per c
};

/// Brute-force product of conditional densities under the discretized
/// model; the reference the samplers are validated against.
double joint_density_oracle(std::span<const Point> points, std::shared_ptr<const Model> model);

/// Sequential sampler that is exact for the discretized model: picks a cell
/// with probability proportional to beta_{n(c, X(k))}(c) * cell_volume,
/// then a uniform point inside it.
class ExactSampler {
public:
    explicit ExactSampler(std::shared_ptr<const Model> model);

    Point next(Rng& rng);
    void reset();
    long size() const { return static_cast<long>(points_.size()); }
    std::span<const Point> points() const { return points_; }
    std::span<const long> cell_counts() const { return counts_; }
    std::span<const long> cell_sequence() const { return cell_seq_; }
    const DiscretizedModel& discretized() const { return dm_; }

private:
    DiscretizedModel dm_;
    std::vector<long> counts_;
    std::vector<long> cell_seq_;
    std::vector<Point> points_;
    std::vector<double> weights_;
};

/// One-shot exact draw against an existing configuration (the stored points
/// are identified with their cell centers).
Point next_point_exact(const ProcessState& state, Rng& rng);

/// Incrementally maintained neighbor counts n(c, X) at the quadrature cell
/// centers, together with the running quadrature value of alpha(X).
class CellCountTracker {
public:
    explicit CellCountTracker(std::shared_ptr<const Model> model);

    void add_point(const Point& p);
    double alpha() const { return alpha_; }
    std::span<const long> counts() const { return counts_; }

private:
    std::shared_ptr<const Model> model_;
    std::vector<long> counts_;
    std::vector<Point> centers_;
    double alpha_ = 0.0;
};

}  // namespace csa
