#pragma once

#include "bitraj/biprob.hpp"
#include "bitraj/superop.hpp"

namespace bitraj {

// System O coupled to the environment scenario through λ·V_O⊗F, where
// F = Σ f P(f) is built from the environment PVM.
class OpenModel {
public:
    // ValidationError when H_O or V_O is not Hermitian or their shapes differ.
    OpenModel(Matrix h_sys, Matrix v_sys, double coupling, QuantumScenario environment);

    const Matrix& h_sys() const noexcept { return h_sys_; }
    const Matrix& v_sys() const noexcept { return v_sys_; }
    double coupling() const noexcept { return coupling_; }
    const QuantumScenario& environment() const noexcept { return env_; }
    Eigen::Index system_dimension() const noexcept { return h_sys_.rows(); }
    const Matrix& env_observable() const noexcept { return f_; }

    // e^{−iΔ(H_O + λ f V_O)}
    Matrix system_step(double f, double dt) const;

private:
    Matrix h_sys_;
    Matrix v_sys_;
    double coupling_ = 0.0;
    QuantumScenario env_;
    Matrix f_;
};

struct OpenOptions {
    int substeps = 1;
    std::size_t enumeration_cap = std::size_t{1} << 20;
};

// Bi-average over piecewise-constant trajectory pairs on the uniform grid
// t_j = j·t/n: f±(s) = f±_j on [t_{j−1}, t_j), pairs weighted by the
// environment bi-probability at t_1..t_n. The pair sum factorizes slot by
// slot, so it is contracted on O⊗E without enumerating the |Ω|^{2n} pairs.
Superoperator bitrajectory_map(const OpenModel& model, double t, std::size_t n_steps, const OpenOptions& options = {});

// Same sum, enumerated term by term from the full bi-distribution.
// EnumerationTooLarge when |Ω|^{2n} exceeds the cap.
Superoperator bitrajectory_map_enumerated(const OpenModel& model, double t, std::size_t n_steps,
                                          const OpenOptions& options = {});

// tr_E[Û_OE (ρ_O⊗ρ) Û_OE†] with H_OE = H_O⊗1 + 1⊗H(t) + λV_O⊗F.
// DimensionTooLarge when d_O·d exceeds 64.
Superoperator exact_joint_map(const OpenModel& model, double t, int substeps = 1);

struct ConvergenceRow {
    std::size_t n_steps = 0;
    double error = 0.0; // spectral norm of the superoperator difference
};

// InvalidArgument unless n_steps is strictly ascending and positive.
std::vector<ConvergenceRow> convergence_study(const OpenModel& model, double t, const std::vector<std::size_t>& n_steps,
                                              const OpenOptions& options = {});

// ‖Λ(ρ)† − Λ(ρ)‖ over the Hermitian basis {E_aa, E_ab + E_ba, i(E_ab − E_ba)}.
double hermiticity_preservation_defect(const Superoperator& map);

} // namespace bitraj
