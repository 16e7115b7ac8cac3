#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace bitraj {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// Largest singular value.
double spectral_norm(const Matrix& m);

// ‖M − M†‖ in spectral norm.
double hermiticity_defect(const Matrix& m);

// e^{−iH·dt} for Hermitian H, via eigendecomposition (unitary to rounding).
Matrix expm_hermitian(const Matrix& h, double dt);

Matrix kron(const Matrix& a, const Matrix& b);

// Orthonormal basis of the range of a Hermitian projector, one column per
// eigenvalue above 1/2, in eigen-solver order.
Matrix projector_range(const Matrix& projector);

// Minimum eigenvalue of the Hermitian part (M + M†)/2.
double min_hermitian_eigenvalue(const Matrix& m);

// Pauli matrices and basis projectors, used by presets and tests.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix basis_projector(Eigen::Index dim, Eigen::Index k);

} // namespace bitraj
