#pragma once

#include "bitraj/biprob.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bitraj {

struct PropertyCheck {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::optional<BiOutcome> witness; // argmax entry; on the reduced grid for Q4
    std::size_t slot = 0;             // 1-based time slot of the witness, 0 if not per-slot
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;

    bool all_pass() const;
    const PropertyCheck& get(const std::string& name) const; // InvalidArgument if absent
};

// Distribution on the grid with the 1-based slot j removed, computed
// directly rather than by summation.
using ReducedFamily = std::function<BiDistribution(std::size_t j)>;

// Q1 normalization, Q2 causality, Q3 positive semidefiniteness of M[f⁺, f⁻]
// (min eigenvalue ≥ −tol·‖M‖), Q4 bi-consistency for every j, P1 diagonal is
// a probability distribution, P2 |Q(f⁺,f⁻)| ≤ √(P(f⁺)P(f⁻)), P3 summing the
// last slot of P gives the shorter family, P4 measurement inconsistency for
// every j, and Hermitian symmetry.
PropertyReport check_properties(const BiDistribution& dist, const ReducedFamily& reduced, double tol = 1e-9);
PropertyReport check_properties(const BiDistribution& dist, const QuantumScenario& scenario, double tol = 1e-9,
                                const EvalOptions& options = {});

struct InconsistencyRecord {
    double lhs = 0.0;       // P(reduced tuple) − Σ_{f_j} P(f)
    Complex offdiag_sum{};  // Σ_{f⁺_j ≠ f⁻_j} Q(f, f; …; f⁺_j, f⁻_j; …)
};

// `tuple` is latest first, either of full length n (its entry at slot j is
// ignored) or n−1 with slot j already removed. Evaluated entry by entry,
// without the full table. BadPosition.
InconsistencyRecord inconsistency_decomposition(const QuantumScenario& scenario, const TimeGrid& grid,
                                                const OutcomeTuple& tuple, std::size_t j,
                                                const EvalOptions& options = {});

struct ClassicalityRecord {
    double consistency_deviation = 0.0; // max_j,f |Σ_{f_j} P(f) − P_reduced|
    double offdiagonal_mass = 0.0;      // Σ_{f⁺ ≠ f⁻} |Q|
};

ClassicalityRecord classicality_report(const BiDistribution& dist);

// Events are sets of diagonal tuples (latest first). μ(A) = Σ_{f⁺,f⁻ ∈ A} Q.
// Returns |μ(A₁⊔A₂⊔A₃) − μ(A₁⊔A₂) − μ(A₂⊔A₃) − μ(A₁⊔A₃) + μ(A₁) + μ(A₂) + μ(A₃)|.
// OverlappingEvents.
double grade2_check(const BiDistribution& dist, const std::vector<OutcomeTuple>& a1,
                    const std::vector<OutcomeTuple>& a2, const std::vector<OutcomeTuple>& a3);

// μ(A) for one event.
Complex event_measure(const BiDistribution& dist, const std::vector<OutcomeTuple>& event);

// Averages of X (defined on grids[0]) over each grid, X lifted by ignoring
// the added coordinates. NotNested, DomainMismatch.
std::vector<Complex> cauchy_stabilization(const QuantumScenario& scenario, const std::vector<TimeGrid>& grids,
                                          const TupleFunction& x, const EvalOptions& options = {});

// X on `coarse` lifted to `fine` ⊇ coarse.
TupleFunction lift(const TupleFunction& x, const TimeGrid& coarse, const TimeGrid& fine, const TupleLattice& fine_lattice);

} // namespace bitraj
