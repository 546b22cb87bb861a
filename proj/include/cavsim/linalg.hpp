// linalg.hpp — Dense/sparse complex linear algebra aliases and small helpers.

#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace cavsim {

using Complex = std::complex<double>;
using LinearOperator = Eigen::MatrixXcd;  // dense complex matrix on a composite space
using StateVector = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<Complex>;

inline constexpr Complex kImag{0.0, 1.0};

inline LinearOperator kron(const LinearOperator& a, const LinearOperator& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

inline LinearOperator identity(Eigen::Index n) { return LinearOperator::Identity(n, n); }

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.derived().cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const LinearOperator& m) {
    return max_abs(LinearOperator(m - m.adjoint()));
}

inline double unitarity_defect(const LinearOperator& u) {
    return max_abs(LinearOperator(u.adjoint() * u - identity(u.rows())));
}

// exp(scale * H) for Hermitian H, via eigendecomposition. Exact up to the
// eigensolver; `scale` may be any complex number (e.g. -i*t, or a complex
// propagator coefficient).
inline LinearOperator hermitian_expm(const LinearOperator& h, Complex scale) {
    Eigen::SelfAdjointEigenSolver<LinearOperator> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_expm: eigensolver failed");
    const Eigen::VectorXd& w = es.eigenvalues();
    StateVector phases(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::exp(scale * w(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// General matrix exponential (Pade scaling-and-squaring); used for the
// non-Hermitian generators S_x a and S_x a†.
inline LinearOperator expm(const LinearOperator& m) { return m.exp(); }

}  // namespace cavsim
