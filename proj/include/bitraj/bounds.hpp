#pragma once

#include "bitraj/biprob.hpp"

namespace bitraj {

// Σ |Q| over every entry.
double l1_norm(const BiDistribution& dist);

// |Ω|ⁿ (product of per-slot outcome counts).
double nonuniform_bound(const BiDistribution& dist);

// d²·exp[2(d−1)∫_0^T ‖H(s)‖_op ds]; OutOfHorizon when T exceeds the schedule.
double uniform_bound(const QuantumScenario& scenario, double horizon);

struct BoundReport {
    double l1_norm = 0.0;
    double nonuniform_bound = 0.0;
    double uniform_bound = 0.0;
    double margin = 0.0; // min(nonuniform, uniform) − l1_norm
};

BoundReport bound_report(const QuantumScenario& scenario, const BiDistribution& dist, double horizon);

// Refined grid τ_N ⊇ t_n with injection ι (1-based, ι(n) = N).
struct RefinementMesh {
    TimeGrid base;
    TimeGrid refined;
    std::vector<std::size_t> injection;

    double max_gap() const; // largest Δτ including τ_1 − 0
    bool valid() const;     // τ_ι(j) = t_j bitwise, ι(n) = N, τ strictly increasing
};

// Smallest N > n such that, with h = t_n/N and k_j = ⌈t_j/h⌉, every j < n has
// t_{j−1} < (k_j − 1)h and k_j·h < t_{j+1} (t_0 = 0). Scans up to 10⁶;
// TooCoarse beyond that.
std::size_t refinement_start(const TimeGrid& grid);

// Uniform partition τ_k = t_n·k/N with the indices k_j snapped to t_j.
// TooCoarse (message carries N₀) when N < N₀ or the separation fails at N;
// OutOfHorizon when the grid leaves [0, horizon].
RefinementMesh build_refinement(const TimeGrid& grid, std::size_t n_points, double horizon);

struct MonotonicityRecord {
    double norm_coarse = 0.0;
    double norm_fine = 0.0;
};

// ‖Q‖₁ on the base and refined grids. EnumerationTooLarge from the fine grid.
MonotonicityRecord refinement_monotonicity(const QuantumScenario& scenario, const RefinementMesh& mesh,
                                           const EvalOptions& options = {});

} // namespace bitraj
