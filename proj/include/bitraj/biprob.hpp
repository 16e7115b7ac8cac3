#pragma once

#include "bitraj/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bitraj {

// Outcome indices (declared PVM order), latest time first: (f_n, ..., f_1).
using OutcomeTuple = std::vector<std::size_t>;

struct BiOutcome {
    OutcomeTuple plus;
    OutcomeTuple minus;

    std::size_t size() const noexcept { return plus.size(); }
    // 1-based time slot j (time t_j) of either leg.
    std::size_t plus_at(std::size_t j) const { return plus[plus.size() - j]; }
    std::size_t minus_at(std::size_t j) const { return minus[minus.size() - j]; }

    friend bool operator==(const BiOutcome&, const BiOutcome&) = default;
};

// Converts outcome values (latest first) to a BiOutcome. LengthMismatch,
// UnknownOutcome.
BiOutcome outcome_from_values(const ObservablePVM& pvm, const std::vector<double>& plus,
                              const std::vector<double>& minus);

// Mixed-radix index over outcome tuples. Radices are given per slot in
// ascending time order; the latest slot is the most significant digit, so
// increasing index is lexicographic in (f_n, ..., f_1).
class TupleLattice {
public:
    TupleLattice() = default;
    explicit TupleLattice(std::vector<std::size_t> slot_radices);

    std::size_t slots() const noexcept { return radices_.size(); }
    std::size_t radix(std::size_t slot) const { return radices_[slot]; }
    const std::vector<std::size_t>& radices() const noexcept { return radices_; }
    std::size_t count() const noexcept { return count_; }

    std::size_t encode(const OutcomeTuple& tuple) const;
    OutcomeTuple decode(std::size_t index) const;
    // Digit of 0-based ascending slot.
    std::size_t digit(std::size_t index, std::size_t slot) const {
        return (index / strides_[slot]) % radices_[slot];
    }
    std::size_t stride(std::size_t slot) const { return strides_[slot]; }

    TupleLattice without(std::size_t slot) const;
    std::size_t drop(std::size_t index, std::size_t slot) const;

    friend bool operator==(const TupleLattice& a, const TupleLattice& b) { return a.radices_ == b.radices_; }

private:
    std::vector<std::size_t> radices_;
    std::vector<std::size_t> strides_;
    std::size_t count_ = 1;
};

// Dense bi-probability table on a time grid. Entry (a, b) at a·count + b, so
// the layout is lexicographic in (f⁺_n..f⁺_1, f⁻_n..f⁻_1) and the table reads
// directly as the count×count matrix M[f⁺, f⁻].
class BiDistribution {
public:
    BiDistribution() = default;
    BiDistribution(TimeGrid grid, std::vector<std::vector<double>> slot_outcomes, std::vector<Complex> table,
                   std::string fingerprint = {});

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t slots() const noexcept { return grid_.size(); }
    const TupleLattice& lattice() const noexcept { return lattice_; }
    const std::vector<std::vector<double>>& slot_outcomes() const noexcept { return slot_outcomes_; }
    std::size_t tuple_count() const noexcept { return lattice_.count(); }
    const std::vector<Complex>& table() const noexcept { return table_; }
    std::vector<Complex>& mutable_table() noexcept { return table_; }
    const std::string& fingerprint() const noexcept { return fingerprint_; }

    Complex at(std::size_t plus, std::size_t minus) const { return table_[plus * lattice_.count() + minus]; }
    Complex operator()(const BiOutcome& o) const;
    Complex diagonal(std::size_t tuple) const { return at(tuple, tuple); }
    Complex total() const;

private:
    TimeGrid grid_;
    std::vector<std::vector<double>> slot_outcomes_;
    TupleLattice lattice_;
    std::vector<Complex> table_;
    std::string fingerprint_;
};

struct EvalOptions {
    int substeps = 1;
    std::size_t enumeration_cap = std::size_t{1} << 20; // 4^10 entries
    double normalization_tol = 1e-8;
};

// Q for one density operator and per-slot Heisenberg projectors (ascending
// slots, [slot][outcome]). Shared by single- and multi-observable code.
class ChainEvaluator {
public:
    ChainEvaluator(Matrix rho, std::vector<std::vector<Matrix>> slot_projectors);

    const TupleLattice& lattice() const noexcept { return lattice_; }
    // tr[(Π_{j=n..1} P_{t_j}(f⁺_j)) ρ (Π_{j=1..n} P_{t_j}(f⁻_j))]
    Complex trace_formula(const BiOutcome& outcome) const;
    // Full table in lattice order; EnumerationTooLarge above cap.
    std::vector<Complex> table(std::size_t cap) const;

private:
    Matrix chain(std::size_t tuple) const; // P_{t_n}(f_n)···P_{t_1}(f_1)

    Matrix rho_;
    std::vector<std::vector<Matrix>> projectors_;
    TupleLattice lattice_;
};

ChainEvaluator make_evaluator(const QuantumScenario& scenario, const TimeGrid& grid, int substeps = 1);

void check_outcome(const TupleLattice& lattice, const BiOutcome& outcome);

Complex eval_biprob(const QuantumScenario& scenario, const TimeGrid& grid, const BiOutcome& outcome,
                    const EvalOptions& options = {});

// Amplitude-product route for rank-1 PVMs:
// Q = δ_{f⁺_n f⁻_n} Σ ⟨f₀⁺|ρ|f₀⁻⟩ Π ⟨f⁺_{j+1}|U|f⁺_j⟩⟨f⁻_{j+1}|U|f⁻_j⟩*.
// InvalidArgument when the PVM is not rank-1.
Complex eval_biprob_rank_one(const QuantumScenario& scenario, const TimeGrid& grid, const BiOutcome& outcome,
                             const EvalOptions& options = {});

BiDistribution full_distribution(const QuantumScenario& scenario, const TimeGrid& grid,
                                 const EvalOptions& options = {});

// P_{t_n}(f_n) = Q(f_n, f_n); `tuple` is latest first.
double diagonal_probability(const QuantumScenario& scenario, const TimeGrid& grid, const OutcomeTuple& tuple,
                            const EvalOptions& options = {});

// Sums over (f⁺_j, f⁻_j) jointly; j is the 1-based time slot. BadPosition.
BiDistribution marginalize(const BiDistribution& dist, std::size_t j);

// Test observable X(f⁺, f⁻) tabulated on a grid's outcome lattice.
class TupleFunction {
public:
    TupleFunction() = default;
    TupleFunction(std::vector<double> times, TupleLattice lattice, std::vector<Complex> values);

    static TupleFunction tabulate(const BiDistribution& like, const std::function<Complex(const BiOutcome&)>& fn);
    static TupleFunction tabulate(const std::vector<double>& times, const TupleLattice& lattice,
                                  const std::function<Complex(const BiOutcome&)>& fn);

    const std::vector<double>& times() const noexcept { return times_; }
    const TupleLattice& lattice() const noexcept { return lattice_; }
    Complex at(std::size_t plus, std::size_t minus) const { return values_[plus * lattice_.count() + minus]; }
    Complex operator()(const BiOutcome& o) const;

private:
    std::vector<double> times_;
    TupleLattice lattice_;
    std::vector<Complex> values_;
};

// Σ Q(f⁺, f⁻) X(f⁺, f⁻), accumulated in table order. DomainMismatch.
Complex average(const BiDistribution& dist, const TupleFunction& x);

} // namespace bitraj
