#include "bitraj/bounds.hpp"

#include "bitraj/propagate.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace bitraj {

double l1_norm(const BiDistribution& dist) {
    double s = 0.0;
    for (const Complex& q : dist.table()) {
        s += std::abs(q);
    }
    return s;
}

double nonuniform_bound(const BiDistribution& dist) {
    return static_cast<double>(dist.tuple_count());
}

double uniform_bound(const QuantumScenario& scenario, double horizon) {
    const double d = static_cast<double>(scenario.dimension());
    return d * d * std::exp(2.0 * (d - 1.0) * integrated_norm(scenario.schedule(), horizon));
}

BoundReport bound_report(const QuantumScenario& scenario, const BiDistribution& dist, double horizon) {
    BoundReport r;
    r.l1_norm = l1_norm(dist);
    r.nonuniform_bound = nonuniform_bound(dist);
    r.uniform_bound = uniform_bound(scenario, horizon);
    r.margin = std::min(r.nonuniform_bound, r.uniform_bound) - r.l1_norm;
    return r;
}

double RefinementMesh::max_gap() const {
    double prev = 0.0;
    double gap = 0.0;
    for (double t : refined.times()) {
        gap = std::max(gap, t - prev);
        prev = t;
    }
    return gap;
}

bool RefinementMesh::valid() const {
    const std::size_t n = base.size();
    const std::size_t big_n = refined.size();
    if (injection.size() != n || n == 0 || big_n < n || injection.back() != big_n) {
        return false;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = injection[j];
        if (k < 1 || k > big_n ||
            std::bit_cast<std::uint64_t>(refined[k - 1]) != std::bit_cast<std::uint64_t>(base[j])) {
            return false;
        }
    }
    for (std::size_t k = 1; k < big_n; ++k) {
        if (!(refined[k] > refined[k - 1])) {
            return false;
        }
    }
    return refined[0] > 0.0;
}

namespace {

constexpr std::size_t kMaxPoints = 1'000'000;

// ⌈x⌉, treating values within relative 1e-12 of an integer as that integer.
std::size_t snapped_ceil(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) {
        return static_cast<std::size_t>(r);
    }
    return static_cast<std::size_t>(std::ceil(x));
}

// k_j for j < n, or empty when the separation condition fails at N.
std::vector<std::size_t> snap_indices(const TimeGrid& grid, std::size_t big_n) {
    const std::size_t n = grid.size();
    const double tn = grid.last();
    const double h = tn / static_cast<double>(big_n);
    std::vector<std::size_t> k(n);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const std::size_t kj = snapped_ceil(grid[j] / h);
        const double prev = j == 0 ? 0.0 : grid[j - 1];
        if (kj < 1 || !(static_cast<double>(kj - 1) * h > prev) || !(static_cast<double>(kj) * h < grid[j + 1])) {
            return {};
        }
        k[j] = kj;
    }
    k[n - 1] = big_n;
    return k;
}

} // namespace

std::size_t refinement_start(const TimeGrid& grid) {
    if (grid.empty()) {
        throw Error(Errc::BadGrid, "refinement needs a nonempty grid");
    }
    for (std::size_t big_n = grid.size() + 1; big_n <= kMaxPoints; ++big_n) {
        if (!snap_indices(grid, big_n).empty()) {
            return big_n;
        }
    }
    throw Error(Errc::TooCoarse, "no separating refinement with N <= 1000000");
}

RefinementMesh build_refinement(const TimeGrid& grid, std::size_t n_points, double horizon) {
    grid.require_within(horizon);
    const std::size_t n0 = refinement_start(grid);
    const std::vector<std::size_t> k = n_points >= n0 ? snap_indices(grid, n_points) : std::vector<std::size_t>{};
    if (k.empty()) {
        std::ostringstream os;
        os << "N = " << n_points << " does not separate the grid; N0 = " << n0;
        throw Error(Errc::TooCoarse, os.str());
    }
    const double tn = grid.last();
    std::vector<double> tau(n_points);
    for (std::size_t i = 1; i <= n_points; ++i) {
        tau[i - 1] = tn * static_cast<double>(i) / static_cast<double>(n_points);
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        tau[k[j] - 1] = grid[j];
    }
    RefinementMesh mesh{grid, TimeGrid(std::move(tau)), k};
    return mesh;
}

MonotonicityRecord refinement_monotonicity(const QuantumScenario& scenario, const RefinementMesh& mesh,
                                           const EvalOptions& options) {
    MonotonicityRecord r;
    r.norm_fine = l1_norm(full_distribution(scenario, mesh.refined, options));
    r.norm_coarse = l1_norm(full_distribution(scenario, mesh.base, options));
    return r;
}

} // namespace bitraj
