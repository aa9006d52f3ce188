#include "csa/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace csa {

namespace {

constexpr uint64_t kClockStreamTag = 0x9D5AB1C4F00DCAFEull;

void require_grid_compatible(const Model& m) {
    if (!m.grid) throw ConfigError("model requires a quadrature grid");
    const auto& fg = m.family.field_grid();
    if (fg && !fg->same_shape(*m.grid)) {
        throw ConfigError("intensity field grid does not match the model grid");
    }
    const auto& rg = m.radius.field_grid();
    if (rg && !rg->same_shape(*m.grid)) {
        throw ConfigError("radius field grid does not match the model grid");
    }
}

}  // namespace

Model::Model(BoxDomain domain_, RadiusField radius_, IntensityFamily family_,
             std::shared_ptr<const QuadratureGrid> grid_, long max_attempts_)
    : domain(domain_),
      radius(std::move(radius_)),
      family(std::move(family_)),
      grid(std::move(grid_)),
      max_attempts(max_attempts_) {
    require_grid_compatible(*this);
    if (!(grid->box() == domain)) {
        throw ConfigError("quadrature grid must cover exactly the simulation domain");
    }
    if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
}

double Model::index_cell_size() const {
    return std::min(radius.r_min(), domain.min_side() / 8.0);
}

std::shared_ptr<const Model> make_model(BoxDomain domain, RadiusField radius,
                                        IntensityFamily family,
                                        std::shared_ptr<const QuadratureGrid> grid,
                                        long max_attempts) {
    return std::make_shared<const Model>(std::move(domain), std::move(radius), std::move(family),
                                         std::move(grid), max_attempts);
}

ProcessState::ProcessState(std::shared_ptr<const Model> model, uint64_t seed, uint64_t replicate_id)
    : model_(std::move(model)),
      index_(model_->domain, model_->index_cell_size()),
      seed_(seed),
      replicate_id_(replicate_id) {}

void ProcessState::insert(const Point& x, uint32_t attempts) {
    if (!model_->domain.contains(x)) {
        throw DomainError("cannot insert a point outside the domain");
    }
    index_.insert(x, static_cast<int32_t>(points_.size()));
    points_.push_back(x);
    attempts_.push_back(attempts);
}

long ProcessState::neighbor_count(const Point& x) const {
    return index_.count_in_ball(x, model_->radius.at(x), points_);
}

ArResult next_point_ar(const ProcessState& state, Rng& rng, long max_attempts) {
    const Model& m = state.model();
    const double beta_max = m.family.beta_max();
    for (long attempt = 1; attempt <= max_attempts; ++attempt) {
        const Point y = rng.uniform_in(m.domain);
        const long n = state.neighbor_count(y);
        const double accept = m.family.beta_n(y, n) / beta_max;
        if (rng.uniform01() < accept) return {y, static_cast<uint32_t>(attempt)};
    }
    throw StallError(
        "acceptance-rejection sampling exceeded " + std::to_string(max_attempts) +
        " attempts for one point; the intensity family is likely misconfigured "
        "(beta_min/beta_max too small)");
}

ProcessState simulate(std::shared_ptr<const Model> model, long m, uint64_t base_seed,
                      uint64_t replicate_id) {
    ProcessState state(model, base_seed, replicate_id);
    Rng rng = Rng::for_replicate(base_seed, replicate_id);
    const long budget = model->max_attempts;
    for (long k = 0; k < m; ++k) {
        const ArResult r = next_point_ar(state, rng, budget);
        state.insert(r.point, r.attempts);
    }
    return state;
}

std::pair<ProcessState, BirthTrajectory> simulate_birth_process(std::shared_ptr<const Model> model,
                                                                long m, uint64_t base_seed,
                                                                uint64_t replicate_id) {
    ProcessState state(model, base_seed, replicate_id);
    Rng rng = Rng::for_replicate(base_seed, replicate_id);
    Rng clock = Rng::for_replicate(base_seed ^ kClockStreamTag, replicate_id);
    CellCountTracker tracker(model);
    BirthTrajectory traj;
    traj.times.reserve(static_cast<size_t>(m));
    traj.rates.reserve(static_cast<size_t>(m));
    double t = 0.0;
    const long budget = model->max_attempts;
    for (long k = 0; k < m; ++k) {
        const double rate = tracker.alpha();
        t += clock.exponential(rate);
        traj.rates.push_back(rate);
        traj.times.push_back(t);
        const ArResult r = next_point_ar(state, rng, budget);
        state.insert(r.point, r.attempts);
        tracker.add_point(r.point);
    }
    return {std::move(state), std::move(traj)};
}

DiscretizedModel::DiscretizedModel(std::shared_ptr<const Model> model) : model_(std::move(model)) {
    const QuadratureGrid& g = grid();
    const long cells = g.num_cells();
    reach_.resize(static_cast<size_t>(cells));
    std::vector<Point> centers(static_cast<size_t>(cells));
    for (long c = 0; c < cells; ++c) centers[static_cast<size_t>(c)] = g.center(c);
    for (long c = 0; c < cells; ++c) {
        const double r = model_->radius.at(centers[static_cast<size_t>(c)]);
        const double r2 = r * r;
        auto& list = reach_[static_cast<size_t>(c)];
        for (long q = 0; q < cells; ++q) {
            if (squared_distance(centers[static_cast<size_t>(c)], centers[static_cast<size_t>(q)],
                                 g.dim()) <= r2) {
                list.push_back(static_cast<int32_t>(q));
            }
        }
    }
}

long DiscretizedModel::count_at(long cell, std::span<const long> counts_by_cell) const {
    long n = 0;
    for (const int32_t q : reach_[static_cast<size_t>(cell)]) {
        n += counts_by_cell[static_cast<size_t>(q)];
    }
    return n;
}

double DiscretizedModel::alpha(std::span<const long> counts_by_cell) const {
    const double vol = grid().cell_volume();
    double a = 0.0;
    for (long c = 0; c < num_cells(); ++c) {
        a += model_->family.beta_n_cell(c, count_at(c, counts_by_cell)) * vol;
    }
    return a;
}

void DiscretizedModel::cell_weights(std::span<const long> counts_by_cell,
                                    std::vector<double>& out) const {
    const double vol = grid().cell_volume();
    out.resize(static_cast<size_t>(num_cells()));
    for (long c = 0; c < num_cells(); ++c) {
        out[static_cast<size_t>(c)] =
            model_->family.beta_n_cell(c, count_at(c, counts_by_cell)) * vol;
    }
}

double DiscretizedModel::joint_density(std::span<const Point> points) const {
    if (points.size() > 4) {
        throw RefusalError("joint-density oracle is limited to m <= 4 points");
    }
    std::vector<long> counts(static_cast<size_t>(num_cells()), 0);
    double density = 1.0;
    for (const Point& x : points) {
        if (!model_->domain.contains(x)) {
            throw DomainError("oracle point lies outside the domain");
        }
        const long cell = grid().cell_of(x);
        const long n = count_at(cell, counts);
        density *= model_->family.beta_n_cell(cell, n) / alpha(counts);
        ++counts[static_cast<size_t>(cell)];
    }
    return density;
}

std::vector<double> DiscretizedModel::tuple_masses(int m) const {
    if (m < 1) throw RefusalError("tuple table needs m >= 1");
    const long cells = num_cells();
    double k_estimate = 1.0;
    for (int i = 0; i < m; ++i) k_estimate *= static_cast<double>(cells);
    if (k_estimate > 1e6) {
        throw RefusalError("tuple table would exceed 10^6 entries; coarsen the grid or lower m");
    }
    const auto table_size = static_cast<size_t>(k_estimate);
    std::vector<double> table(table_size, 0.0);
    std::vector<long> counts(static_cast<size_t>(cells), 0);

    auto recurse = [&](auto&& self, int depth, long prefix_index, double prefix_mass) -> void {
        // per-level buffer: recursion below must not clobber this level's masses
        std::vector<double> weights;
        cell_weights(counts, weights);
        double total = 0.0;
        for (const double w : weights) total += w;
        for (long c = 0; c < cells; ++c) {
            const double mass = prefix_mass * weights[static_cast<size_t>(c)] / total;
            const long idx = prefix_index * cells + c;
            if (depth + 1 == m) {
                table[static_cast<size_t>(idx)] = mass;
            } else {
                ++counts[static_cast<size_t>(c)];
                self(self, depth + 1, idx, mass);
                --counts[static_cast<size_t>(c)];
            }
        }
    };
    recurse(recurse, 0, 0, 1.0);
    return table;
}

long DiscretizedModel::tuple_index(std::span<const long> cells_seq) const {
    long idx = 0;
    for (const long c : cells_seq) idx = idx * num_cells() + c;
    return idx;
}

double joint_density_oracle(std::span<const Point> points, std::shared_ptr<const Model> model) {
    return DiscretizedModel(std::move(model)).joint_density(points);
}

ExactSampler::ExactSampler(std::shared_ptr<const Model> model)
    : dm_(std::move(model)), counts_(static_cast<size_t>(dm_.num_cells()), 0) {}

void ExactSampler::reset() {
    std::fill(counts_.begin(), counts_.end(), 0);
    cell_seq_.clear();
    points_.clear();
}

Point ExactSampler::next(Rng& rng) {
    dm_.cell_weights(counts_, weights_);
    double total = 0.0;
    for (const double w : weights_) total += w;
    const double u = rng.uniform01() * total;
    long cell = dm_.num_cells() - 1;
    double acc = 0.0;
    for (long c = 0; c < dm_.num_cells(); ++c) {
        acc += weights_[static_cast<size_t>(c)];
        if (u < acc) {
            cell = c;
            break;
        }
    }
    const Point p = rng.uniform_in_cell(dm_.grid(), cell);
    ++counts_[static_cast<size_t>(cell)];
    cell_seq_.push_back(cell);
    points_.push_back(p);
    return p;
}

Point next_point_exact(const ProcessState& state, Rng& rng) {
    const DiscretizedModel dm(state.model_ptr());
    const QuadratureGrid& g = *state.model().grid;
    std::vector<long> counts(static_cast<size_t>(g.num_cells()), 0);
    for (const Point& p : state.points()) ++counts[static_cast<size_t>(g.cell_of(p))];
    std::vector<double> weights;
    dm.cell_weights(counts, weights);
    double total = 0.0;
    for (const double w : weights) total += w;
    const double u = rng.uniform01() * total;
    long cell = g.num_cells() - 1;
    double acc = 0.0;
    for (long c = 0; c < g.num_cells(); ++c) {
        acc += weights[static_cast<size_t>(c)];
        if (u < acc) {
            cell = c;
            break;
        }
    }
    return rng.uniform_in_cell(g, cell);
}

CellCountTracker::CellCountTracker(std::shared_ptr<const Model> model) : model_(std::move(model)) {
    const QuadratureGrid& g = *model_->grid;
    const long cells = g.num_cells();
    counts_.assign(static_cast<size_t>(cells), 0);
    centers_.resize(static_cast<size_t>(cells));
    const double vol = g.cell_volume();
    alpha_ = 0.0;
    for (long c = 0; c < cells; ++c) {
        centers_[static_cast<size_t>(c)] = g.center(c);
        alpha_ += model_->family.beta_n_cell(c, 0) * vol;
    }
}

void CellCountTracker::add_point(const Point& p) {
    const QuadratureGrid& g = *model_->grid;
    const double r_max = model_->radius.r_max();
    const double vol = g.cell_volume();
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) {
        const double side = g.cell_side(a);
        auto l = static_cast<long>(std::floor((p[a] - r_max - g.box().lower(a)) / side));
        auto h = static_cast<long>(std::floor((p[a] + r_max - g.box().lower(a)) / side));
        lo[static_cast<size_t>(a)] = static_cast<int>(std::clamp<long>(l, 0, g.resolution(a) - 1));
        hi[static_cast<size_t>(a)] = static_cast<int>(std::clamp<long>(h, 0, g.resolution(a) - 1));
    }
    std::array<int, 3> c{0, 0, 0};
    for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) {
        for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1]) {
            for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2]) {
                const long cell = g.cell_index(c);
                const Point& center = centers_[static_cast<size_t>(cell)];
                const double r = model_->radius.at(center);
                if (squared_distance(center, p, g.dim()) > r * r) continue;
                const long n = counts_[static_cast<size_t>(cell)];
                alpha_ += (model_->family.beta_n_cell(cell, n + 1) -
                           model_->family.beta_n_cell(cell, n)) *
                          vol;
                ++counts_[static_cast<size_t>(cell)];
            }
        }
    }
}

}  // namespace csa
