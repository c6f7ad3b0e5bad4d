// operators.hpp — finite-dimensional operators, density-matrix validation,
// truncated Fock-space operators.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "openbath/constants.hpp"

namespace openbath {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline bool is_hermitian(const Mat& a, double tol = 1e-12) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

// Safe even when assigned back to its own argument (no aliasing pitfalls).
inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

// Validated density matrix: hermitian, unit trace, eigenvalues >= -1e-10.
struct DensityMatrix {
    Mat rho;

    int dim() const { return static_cast<int>(rho.rows()); }

    // Hermitizes, checks trace and positivity.  A violation beyond tolerance
    // signals a generator or truncation failure and is an error, not a warning.
    static DensityMatrix checked(Mat a, double trace_tol = 1e-10, double eig_tol = 1e-10) {
        if (a.rows() != a.cols()) throw std::invalid_argument("DensityMatrix: not square");
        if (!is_hermitian(a, 1e-8))
            throw std::runtime_error("DensityMatrix: not hermitian within tolerance");
        Mat h = 0.5 * (a + a.adjoint());
        const double tr_err = std::abs(h.trace() - Complex(1.0, 0.0));
        if (tr_err > trace_tol)
            throw std::runtime_error("DensityMatrix: trace deviates from 1 by " +
                                     std::to_string(tr_err));
        Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < -eig_tol)
            throw std::runtime_error("DensityMatrix: negative eigenvalue " +
                                     std::to_string(min_eig));
        return DensityMatrix{std::move(h)};
    }
};

inline double trace_distance(const Mat& a, const Mat& b) {
    Mat d = hermitize(a - b);
    Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double purity(const Mat& rho) { return (rho * rho).trace().real(); }

// Truncated Fock operators for a mode of mass m and frequency omega.
// H0 is assembled from the q, p products so that truncation behavior matches
// the operator algebra (its corner deviates from diagonal hbar*omega*(n+1/2)).
struct FockOperators {
    Mat q, p, a, a_dagger, number, H0;
};

inline FockOperators fock_operators(int d, double m, double omega, Constants c = {}) {
    if (d < 2) throw std::invalid_argument("fock_operators: d must be >= 2");
    c.check();
    Mat a = Mat::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    FockOperators f;
    f.a = a;
    f.a_dagger = a.adjoint();
    f.number = f.a_dagger * f.a;
    f.q = std::sqrt(c.hbar / (2.0 * m * omega)) * (f.a + f.a_dagger);
    f.p = Complex(0.0, 1.0) * std::sqrt(c.hbar * m * omega / 2.0) * (f.a_dagger - f.a);
    f.H0 = f.p * f.p / (2.0 * m) + 0.5 * m * omega * omega * f.q * f.q;
    return f;
}

// Thermal (Gibbs) state of a truncated harmonic mode, diagonal occupation.
inline Mat thermal_state(int d, double hbar_omega_over_kT) {
    Eigen::VectorXd w(d);
    for (int n = 0; n < d; ++n) w(n) = std::exp(-hbar_omega_over_kT * n);
    w /= w.sum();
    Mat rho = Mat::Zero(d, d);
    for (int n = 0; n < d; ++n) rho(n, n) = w(n);
    return rho;
}

// Normalized coherent state |alpha> on the truncated space.
inline Vec coherent_state(int d, Complex alpha) {
    Vec v(d);
    Complex amp = 1.0;
    v(0) = amp;
    for (int n = 1; n < d; ++n) {
        amp *= alpha / std::sqrt(static_cast<double>(n));
        v(n) = amp;
    }
    v.normalize();
    return v;
}

}  // namespace openbath
