#pragma once

#include "bitraj/biprob.hpp"

namespace bitraj {

// One PVM per grid slot, ascending time order.
class ObservableSequence {
public:
    ObservableSequence() = default;
    // Checks every PVM against dimension d (ValidationError).
    ObservableSequence(std::vector<ObservablePVM> slots, Eigen::Index d, const Tolerances& tol = {});

    std::size_t size() const noexcept { return slots_.size(); }
    const ObservablePVM& operator[](std::size_t slot) const { return slots_[slot]; }
    const std::vector<ObservablePVM>& slots() const noexcept { return slots_; }
    TupleLattice lattice() const;
    ObservableSequence without(std::size_t slot) const;

private:
    std::vector<ObservablePVM> slots_;
};

// Outcome values (latest first) to per-slot indices. SlotOutcomeMismatch.
BiOutcome multiobs_outcome(const ObservableSequence& seq, const std::vector<double>& plus,
                           const std::vector<double>& minus);

// tr[(Π_{j=n..1} P^{F_j}_{t_j}(f⁺_j)) ρ (Π_{j=1..n} P^{F_j}_{t_j}(f⁻_j))].
// SlotOutcomeMismatch when an index exceeds its slot's PVM, LengthMismatch
// when the sequence and grid differ in length.
Complex eval_multiobs(const QuantumScenario& scenario, const TimeGrid& grid, const ObservableSequence& seq,
                      const BiOutcome& outcome, const EvalOptions& options = {});

BiDistribution multiobs_distribution(const QuantumScenario& scenario, const TimeGrid& grid,
                                     const ObservableSequence& seq, const EvalOptions& options = {});

// Unitaries Û_1..Û_n in ascending slot order; indices k (0-based) latest
// first, as in BiOutcome.
struct GenericTuple {
    std::vector<Matrix> unitaries;
    OutcomeTuple plus;
    OutcomeTuple minus;
};

// δ_{k⁺_n k⁻_n} δ_{k⁺_1 k⁻_1} tr[(Π_{j=n..1} Û_j|k⁺_j⟩⟨k⁺_j|Û_j†)(Π_{j=1..n} Û_j|k⁻_j⟩⟨k⁻_j|Û_j†)].
// IndexOutOfRange, LengthMismatch.
Complex eval_generic(const GenericTuple& g);

// Full generic table over {0..d−1}^n pairs, lattice order. EnumerationTooLarge.
std::vector<Complex> generic_table(const std::vector<Matrix>& unitaries, std::size_t cap = std::size_t{1} << 20);
double generic_l1_norm(const std::vector<Matrix>& unitaries, std::size_t cap = std::size_t{1} << 20);

// Columns of U_F: orthonormal range bases of each projector in declared
// order; outcome_of[k] is the PVM index that column k belongs to.
struct EigenFrame {
    Matrix basis;
    std::vector<std::size_t> outcome_of;
};
EigenFrame pvm_frame(const ObservablePVM& pvm);
// Eigenvectors of ρ with eigenvalues sorted descending; ties broken by the
// lexicographic order of the eigenvector entries (real, then imaginary).
struct StateFrame {
    Matrix basis;
    std::vector<double> weights;
};
StateFrame state_frame(const Matrix& rho);

struct DecompositionRecord {
    Complex direct{};
    Complex reconstructed{};
};

// Rebuilds Q^F as Σ_k Π δ(outcome matches) √(ρ(k⁺₁)ρ(k⁻₁)) Q_generic over
// slots (Û_ρ, Û_{0,t_1}Û_{F_1}, …, Û_{0,t_n}Û_{F_n}). The sum runs over
// d^{2(n+1)} index pairs; EnumerationTooLarge above the cap.
DecompositionRecord decompose_multiobs(const QuantumScenario& scenario, const TimeGrid& grid,
                                       const ObservableSequence& seq, const BiOutcome& outcome,
                                       const EvalOptions& options = {});

// γ(τ) = T exp(−i∫_0^τ V(s) ds)·U₀ with piecewise-constant V.
struct PathSegment {
    double duration = 0.0;
    Matrix generator;
};

class UnitaryPath {
public:
    // Durations positive and summing to 1 (within 1e-12), generators
    // Hermitian, anchor unitary. InvalidArgument / NonHermitian.
    UnitaryPath(std::vector<PathSegment> segments, Matrix anchor);

    const std::vector<PathSegment>& segments() const noexcept { return segments_; }
    const Matrix& anchor() const noexcept { return anchor_; }
    Eigen::Index dimension() const noexcept { return anchor_.rows(); }

private:
    std::vector<PathSegment> segments_;
    Matrix anchor_;
};

Matrix path_unitary(const UnitaryPath& path, double tau); // OutOfHorizon outside [0, 1]
double path_length(const UnitaryPath& path);              // Σ duration·‖V‖_op

// First path on [0, w], second on [w, 1], generators rescaled so the same
// curves are traversed. The second anchor must equal the first endpoint.
UnitaryPath concatenate(const UnitaryPath& first, const UnitaryPath& second, double weight = 0.5);

// Path for a static Hamiltonian over [0, T]: single segment with V = sign·T·H.
UnitaryPath hamiltonian_path(const Matrix& h, double horizon, double sign = 1.0);

struct PathBoundRecord {
    double max_l1 = 0.0;
    double bound = 0.0;
};

// Each sample is an ascending list of path parameters in [0, 1]; the generic
// family at Û_j = γ(τ_j) is enumerated. bound = d²·exp[2(d−1)·Length(γ)].
PathBoundRecord path_bound_check(const UnitaryPath& path, const std::vector<std::vector<double>>& samples,
                                 std::size_t cap = std::size_t{1} << 20);

} // namespace bitraj
