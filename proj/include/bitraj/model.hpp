#pragma once

#include "bitraj/error.hpp"
#include "bitraj/linalg.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bitraj {

// Absolute tolerances, spectral norm.
struct Tolerances {
    double hermitian = 1e-10;
    double projector = 1e-10;
    double trace = 1e-10;
};

struct HamiltonianSegment {
    double t_start = 0.0;
    double t_end = 0.0;
    Matrix h; // units of inverse time, hbar = 1
};

// Piecewise-constant H(t) on [0, horizon].
class HamiltonianSchedule {
public:
    HamiltonianSchedule() = default;
    explicit HamiltonianSchedule(std::vector<HamiltonianSegment> segments);

    static HamiltonianSchedule constant(Matrix h, double horizon);

    const std::vector<HamiltonianSegment>& segments() const noexcept { return segments_; }
    double horizon() const noexcept;
    Eigen::Index dimension() const noexcept;

private:
    std::vector<HamiltonianSegment> segments_;
};

// Samples a smooth H(t) at segment midpoints. segments_per_unit_time
// defaults to 64.
HamiltonianSchedule sample_smooth(const std::function<Matrix(double)>& h, double horizon,
                                  int segments_per_unit_time = 64);

// Projection-valued measure: one projector per distinct real outcome.
struct ObservablePVM {
    std::vector<double> outcomes;
    std::vector<Matrix> projectors;

    std::size_t size() const noexcept { return outcomes.size(); }
    Eigen::Index dimension() const noexcept { return projectors.empty() ? 0 : projectors.front().rows(); }
    std::size_t index_of(double outcome) const; // throws UnknownOutcome
    Matrix observable() const;                  // Σ f P(f)
    bool rank_one() const;
};

// {+1 ↦ |0⟩⟨0|, −1 ↦ |1⟩⟨1|}
ObservablePVM pauli_z_pvm();
// {+1 ↦ |+⟩⟨+|, −1 ↦ |−⟩⟨−|}
ObservablePVM pauli_x_pvm();

struct DensityOperator {
    Matrix matrix;
};

// Unvalidated input to validate_scenario.
struct RawScenario {
    Eigen::Index dimension = 0;
    HamiltonianSchedule schedule;
    Matrix state;
    ObservablePVM pvm;
};

class QuantumScenario {
public:
    Eigen::Index dimension() const noexcept { return dimension_; }
    const HamiltonianSchedule& schedule() const noexcept { return schedule_; }
    const DensityOperator& state() const noexcept { return state_; }
    const ObservablePVM& pvm() const noexcept { return pvm_; }
    double horizon() const noexcept { return schedule_.horizon(); }
    const std::string& fingerprint() const noexcept { return fingerprint_; }

    RawScenario raw() const;

private:
    friend QuantumScenario validate_scenario(const RawScenario&, const Tolerances&);
    QuantumScenario() = default;

    Eigen::Index dimension_ = 0;
    HamiltonianSchedule schedule_;
    DensityOperator state_;
    ObservablePVM pvm_;
    std::string fingerprint_;
};

// Collects every violated invariant; throws ValidationError if any.
QuantumScenario validate_scenario(const RawScenario& raw, const Tolerances& tol = {});

std::vector<Violation> check_hermitian(const Matrix& m, const std::string& field, double tol);
std::vector<Violation> check_pvm(const ObservablePVM& pvm, Eigen::Index dim, const std::string& field,
                                 const Tolerances& tol = {});
std::vector<Violation> check_density(const Matrix& rho, Eigen::Index dim, const std::string& field,
                                     const Tolerances& tol = {});
std::vector<Violation> check_schedule(const HamiltonianSchedule& schedule, Eigen::Index dim,
                                      const std::string& field, const Tolerances& tol = {});

// Strictly increasing, positive measurement times t_1 < ... < t_n.
class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> times); // throws BadGrid

    const std::vector<double>& times() const noexcept { return times_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    double operator[](std::size_t i) const { return times_[i]; }
    double last() const { return times_.back(); }

    TimeGrid without(std::size_t index) const;
    bool contains(double t) const noexcept; // bitwise comparison
    void require_within(double horizon) const; // throws OutOfHorizon

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> times_;
};

struct OutcomeGroup {
    double label = 0.0;
    std::vector<double> members;
};

// P(g) = Σ_{f ∈ group g} P(f). Groups keep their declared order.
ObservablePVM coarse_grain_pvm(const ObservablePVM& pvm, const std::vector<OutcomeGroup>& groups);
// Groups ordered by first appearance in the PVM's declared order.
ObservablePVM coarse_grain_pvm(const ObservablePVM& pvm, const std::map<double, double>& grouping);

struct RandomScenarioOptions {
    double norm_cap = 1.0;      // ‖H‖_op ≤ norm_cap on every segment
    bool pure = false;          // pure initial state instead of full rank
    int segments = 1;           // piecewise-constant pieces
    double horizon = 1.0;
    std::size_t pvm_groups = 0; // 0: rank-1 PVM with d outcomes; else coarse-grain into this many
};

// Deterministic in (d, seed, options).
QuantumScenario random_scenario(Eigen::Index d, std::uint64_t seed, const RandomScenarioOptions& options = {});

// Haar-ish random unitary (QR of a complex Ginibre matrix, phases fixed).
Matrix random_unitary(Eigen::Index d, std::uint64_t seed);

// Random Hermitian matrix with spectral norm exactly `norm`.
Matrix random_hermitian(Eigen::Index d, std::uint64_t seed, double norm);

} // namespace bitraj
