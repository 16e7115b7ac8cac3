#include "bitraj/superop.hpp"

#include "bitraj/error.hpp"

#include <cmath>

namespace bitraj {

Superoperator::Superoperator(Matrix matrix) : matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(matrix_.rows()))));
    if (matrix_.rows() != matrix_.cols() || d * d != matrix_.rows()) {
        throw Error(Errc::DimensionMismatch, "superoperator matrix must be d²×d²");
    }
    dim_ = d;
}

Superoperator Superoperator::identity(Eigen::Index d) {
    return Superoperator(Matrix::Identity(d * d, d * d));
}

Superoperator Superoperator::sandwich(const Matrix& left, const Matrix& right) {
    return Superoperator(kron(right.transpose(), left));
}

Matrix Superoperator::apply(const Matrix& a) const {
    if (a.rows() != dim_ || a.cols() != dim_) {
        throw Error(Errc::DimensionMismatch, "operator dimension differs from the superoperator");
    }
    return unvectorize(matrix_ * vectorize(a), dim_);
}

Superoperator Superoperator::after(const Superoperator& other) const {
    if (other.dim_ != dim_) {
        throw Error(Errc::DimensionMismatch, "cannot compose superoperators of different dimension");
    }
    return Superoperator(matrix_ * other.matrix_);
}

Superoperator& Superoperator::operator+=(const Superoperator& other) {
    if (other.dim_ != dim_) {
        throw Error(Errc::DimensionMismatch, "cannot add superoperators of different dimension");
    }
    matrix_ += other.matrix_;
    return *this;
}

Superoperator operator-(const Superoperator& a, const Superoperator& b) {
    if (a.dim_ != b.dim_) {
        throw Error(Errc::DimensionMismatch, "cannot subtract superoperators of different dimension");
    }
    return Superoperator(a.matrix_ - b.matrix_);
}

Superoperator operator*(Complex c, const Superoperator& s) {
    return Superoperator(c * s.matrix_);
}

Matrix Superoperator::choi() const {
    const Eigen::Index d = dim_;
    Matrix c = Matrix::Zero(d * d, d * d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            // Λ(E_ab) is column a + b·d of the matrix
            c.block(a * d, b * d, d, d) = unvectorize(matrix_.col(a + b * d), d);
        }
    }
    return c;
}

double Superoperator::trace_defect() const {
    const Matrix costate = vectorize(Matrix::Identity(dim_, dim_)).adjoint();
    return (costate * matrix_ - costate).norm();
}

Matrix vectorize(const Matrix& a) {
    Matrix v(a.size(), 1);
    for (Eigen::Index b = 0; b < a.cols(); ++b) {
        v.block(b * a.rows(), 0, a.rows(), 1) = a.col(b);
    }
    return v;
}

Matrix unvectorize(const Matrix& v, Eigen::Index d) {
    if (v.size() != d * d) {
        throw Error(Errc::DimensionMismatch, "vector length is not d²");
    }
    Matrix a(d, d);
    for (Eigen::Index b = 0; b < d; ++b) {
        for (Eigen::Index i = 0; i < d; ++i) {
            a(i, b) = v(i + b * d);
        }
    }
    return a;
}

double distance(const Superoperator& a, const Superoperator& b) {
    return spectral_norm((a - b).matrix());
}

Matrix partial_trace_env(const Matrix& joint, Eigen::Index d_sys, Eigen::Index d_env) {
    if (joint.rows() != d_sys * d_env || joint.cols() != d_sys * d_env) {
        throw Error(Errc::DimensionMismatch, "joint operator does not match d_sys·d_env");
    }
    Matrix r = Matrix::Zero(d_sys, d_sys);
    for (Eigen::Index i = 0; i < d_sys; ++i) {
        for (Eigen::Index j = 0; j < d_sys; ++j) {
            r(i, j) = joint.block(i * d_env, j * d_env, d_env, d_env).trace();
        }
    }
    return r;
}

} // namespace bitraj
