#include "bitraj/linalg.hpp"

#include "bitraj/error.hpp"

namespace bitraj {

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double hermiticity_defect(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw Error(Errc::NonSquare, "hermiticity check needs a square matrix");
    }
    return spectral_norm(m - m.adjoint());
}

Matrix expm_hermitian(const Matrix& h, double dt) {
    if (h.rows() != h.cols()) {
        throw Error(Errc::NonSquare, "exponent must be square");
    }
    const Matrix herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    Vector phases(herm.rows());
    for (Eigen::Index k = 0; k < herm.rows(); ++k) {
        phases(k) = std::exp(-kI * es.eigenvalues()(k) * dt);
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix projector_range(const Matrix& projector) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (projector + projector.adjoint()));
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < projector.rows(); ++k) {
        if (es.eigenvalues()(k) > 0.5) {
            ++rank;
        }
    }
    Matrix basis(projector.rows(), rank);
    Eigen::Index col = 0;
    for (Eigen::Index k = 0; k < projector.rows(); ++k) {
        if (es.eigenvalues()(k) > 0.5) {
            basis.col(col++) = es.eigenvectors().col(k);
        }
    }
    return basis;
}

double min_hermitian_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0.0, -kI, kI, 0.0;
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix basis_projector(Eigen::Index dim, Eigen::Index k) {
    Matrix p = Matrix::Zero(dim, dim);
    p(k, k) = 1.0;
    return p;
}

} // namespace bitraj
