#pragma once

#include "bitraj/linalg.hpp"

namespace bitraj {

// Linear map on d×d operators, acting on column-stacked vec(A):
// vec(A)[a + b·d] = A(a, b). The map A ↦ XAY is (Yᵀ⊗X).
class Superoperator {
public:
    Superoperator() = default;
    explicit Superoperator(Matrix matrix); // (d²)×(d²), DimensionMismatch otherwise

    static Superoperator identity(Eigen::Index d);
    static Superoperator sandwich(const Matrix& left, const Matrix& right); // A ↦ left·A·right
    static Superoperator conjugation(const Matrix& u) { return sandwich(u, u.adjoint()); }

    Eigen::Index dimension() const noexcept { return dim_; } // operator dimension d
    const Matrix& matrix() const noexcept { return matrix_; }

    Matrix apply(const Matrix& a) const;
    // this ∘ other: other acts first
    Superoperator after(const Superoperator& other) const;

    Superoperator& operator+=(const Superoperator& other);
    friend Superoperator operator-(const Superoperator& a, const Superoperator& b);
    friend Superoperator operator*(Complex c, const Superoperator& s);

    // Σ_ab E_ab ⊗ Λ(E_ab)
    Matrix choi() const;
    // ‖vec(1)†S − vec(1)†‖: trace preservation via the identity costate
    double trace_defect() const;

private:
    Matrix matrix_;
    Eigen::Index dim_ = 0;
};

Matrix vectorize(const Matrix& a);
Matrix unvectorize(const Matrix& v, Eigen::Index d);

// Largest singular value of the superoperator matrix.
double distance(const Superoperator& a, const Superoperator& b);

// tr_E of an operator on O⊗E, joint index o·d_E + e.
Matrix partial_trace_env(const Matrix& joint, Eigen::Index d_sys, Eigen::Index d_env);

} // namespace bitraj
