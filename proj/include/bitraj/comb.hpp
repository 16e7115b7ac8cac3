#pragma once

#include "bitraj/biprob.hpp"
#include "bitraj/superop.hpp"

namespace bitraj {

// A ↦ P_t(f⁺)·A·P_t(f⁻) with Heisenberg projectors. UnknownOutcome,
// OutOfHorizon.
Superoperator bi_instrument(const QuantumScenario& scenario, double f_plus, double f_minus, double t,
                            int substeps = 1);

// Applies the bi-instruments of slots 1..n to vec(ρ) in order and traces.
Complex comb_biprob(const QuantumScenario& scenario, const TimeGrid& grid, const BiOutcome& outcome,
                    const EvalOptions& options = {});

// Every (f⁺, f⁻) pair of the grid, lattice order, via the comb route.
// EnumerationTooLarge under the same rule as full_distribution.
std::vector<Complex> comb_table(const QuantumScenario& scenario, const TimeGrid& grid, const EvalOptions& options = {});

} // namespace bitraj
