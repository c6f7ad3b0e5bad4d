// expm.hpp — real representation of hermiticity-preserving superoperators.
// Working in an orthonormal hermitian operator basis halves the cost of the
// large dense exponentials needed for composite-vs-derived comparisons.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "openbath/superoperator.hpp"

namespace openbath {

// Isometry B whose columns are vec'd orthonormal hermitian basis operators:
// diagonals E_ii, then (E_ij+E_ji)/√2 and i(E_ij−E_ji)/√2 for i<j.
inline Eigen::SparseMatrix<Complex> hermitian_basis(int d) {
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(2 * n);
    Eigen::Index k = 0;
    for (int i = 0; i < d; ++i) trip.emplace_back(static_cast<Eigen::Index>(i) * d + i, k++, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            trip.emplace_back(static_cast<Eigen::Index>(j) * d + i, k, r);
            trip.emplace_back(static_cast<Eigen::Index>(i) * d + j, k, r);
            ++k;
            trip.emplace_back(static_cast<Eigen::Index>(j) * d + i, k, Complex(0.0, r));
            trip.emplace_back(static_cast<Eigen::Index>(i) * d + j, k, Complex(0.0, -r));
            ++k;
        }
    Eigen::SparseMatrix<Complex> B(n, n);
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

struct RealifiedGenerator {
    Eigen::SparseMatrix<Complex> B;  // hermitian-basis isometry
    Eigen::MatrixXd R;               // B† M B, real for hermiticity-preserving M
    int d{0};

    Eigen::VectorXd to_real(const Mat& rho) const {
        const Vec y = B.adjoint() * vec(rho);
        return y.real();
    }
    Mat from_real(const Eigen::VectorXd& r) const {
        const Vec y = B * r.cast<Complex>();
        return unvec(y, d);
    }
};

inline RealifiedGenerator realify(const Eigen::SparseMatrix<Complex>& M, int d) {
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    if (M.rows() != n || M.cols() != n)
        throw std::invalid_argument("realify: generator/dimension mismatch");
    RealifiedGenerator g;
    g.d = d;
    g.B = hermitian_basis(d);
    const Eigen::SparseMatrix<Complex> MB = M * g.B;
    const Mat C = (g.B.adjoint() * MB).toDense();
    const double imag_max = C.imag().cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, C.real().cwiseAbs().maxCoeff());
    if (imag_max > 1e-9 * scale)
        throw std::runtime_error("realify: generator is not hermiticity-preserving");
    g.R = C.real();
    return g;
}

inline RealifiedGenerator realify(const Mat& M, int d) {
    return realify(Eigen::SparseMatrix<Complex>(M.sparseView()), d);
}

// Dense real matrix exponential (Padé scaling-and-squaring via Eigen; the
// products route through BLAS).
inline Eigen::MatrixXd expm_real(const Eigen::MatrixXd& A) { return A.exp(); }

}  // namespace openbath
