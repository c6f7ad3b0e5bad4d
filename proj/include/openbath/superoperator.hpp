// superoperator.hpp — column-stacking superoperator algebra, Lindblad
// generators, propagation, stationary states and CPTP diagnostics.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "openbath/operators.hpp"
#include "openbath/oscillator.hpp"

namespace openbath {

// vec is column-stacking (Eigen's native layout): vec(A rho B) = (B^T ⊗ A) vec(rho).
inline Vec vec(const Mat& a) {
    return Eigen::Map<const Vec>(a.data(), a.size());
}

inline Mat unvec(const Vec& v, int d) {
    if (v.size() != static_cast<Eigen::Index>(d) * d)
        throw std::invalid_argument("unvec: size mismatch");
    return Eigen::Map<const Mat>(v.data(), d, d);
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Mat spre(const Mat& a) {
    return kron(Mat::Identity(a.rows(), a.cols()), a);
}

inline Mat spost(const Mat& a) {
    return kron(a.transpose(), Mat::Identity(a.rows(), a.cols()));
}

// Generator of dρ/dt = -i/ħ [H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
inline Mat lindblad_generator(const Mat& H, const std::vector<Mat>& jumps,
                              const std::vector<double>& rates, double hbar = 1.0) {
    if (jumps.size() != rates.size())
        throw std::invalid_argument("lindblad_generator: jumps/rates size mismatch");
    const Complex i_unit(0.0, 1.0);
    Mat M = (-i_unit / hbar) * (spre(H) - spost(H));
    for (std::size_t k = 0; k < jumps.size(); ++k) {
        if (rates[k] < 0.0)
            throw std::invalid_argument("lindblad_generator: negative rate");
        const Mat& L = jumps[k];
        const Mat LdL = L.adjoint() * L;
        M += rates[k] * (kron(L.conjugate(), L) - 0.5 * (spre(LdL) + spost(LdL)));
    }
    return M;
}

namespace detail {

inline Mat com(const Mat& a) { return spre(a) - spost(a); }     // [a, .]
inline Mat acom(const Mat& a) { return spre(a) + spost(a); }    // {a, .}

}  // namespace detail

// Damped-mode generator on operators q, p acting on any Hilbert space:
//   dρ/dt = -i/ħ [H0,ρ] - i(λ+μ)/2ħ [q,{p,ρ}] + i(λ-μ)/2ħ [p,{q,ρ}]
//           - D_pp/ħ² [q,[q,ρ]] - D_qq/ħ² [p,[p,ρ]] + 2 D_pq/ħ² [q,[p,ρ]]
// Does not validate the diffusion constraints so that non-relaxing fixtures
// (e.g. λ = D = 0 closed dynamics) stay representable; callers that require a
// relaxing environment validate up front.
inline Mat sns_generator(const OscillatorParams& par, const Mat& q, const Mat& p,
                         const Mat& H0) {
    using detail::acom;
    using detail::com;
    const double hbar = par.constants.hbar;
    const Complex i_unit(0.0, 1.0);
    Mat M = (-i_unit / hbar) * com(H0);
    M += (-i_unit * (par.lambda + par.mu) / (2.0 * hbar)) * (com(q) * acom(p));
    M += (i_unit * (par.lambda - par.mu) / (2.0 * hbar)) * (com(p) * acom(q));
    const double h2 = hbar * hbar;
    M += (-par.D_pp / h2) * (com(q) * com(q));
    M += (-par.D_qq / h2) * (com(p) * com(p));
    M += (2.0 * par.D_pq / h2) * (com(q) * com(p));
    return M;
}

inline Mat sns_generator(const OscillatorParams& par, const FockOperators& f) {
    return sns_generator(par, f.q, f.p, f.H0);
}

// Propagate rho0 by e^{M t} and revalidate the result as a state.
inline DensityMatrix propagate(const Mat& M, const DensityMatrix& rho0, double t,
                               double eig_tol = 1e-10) {
    if (t < 0.0) throw std::invalid_argument("propagate: t must be >= 0");
    const int d = rho0.dim();
    if (M.rows() != static_cast<Eigen::Index>(d) * d || M.rows() != M.cols())
        throw std::invalid_argument("propagate: generator/state dimension mismatch");
    const Mat E = (M * t).exp();
    return DensityMatrix::checked(unvec(E * vec(rho0.rho), d), 1e-9, eig_tol);
}

// Heisenberg-picture evolution of an observable: A(t) = unvec(e^{M† t} vec(A)).
// M† is the Hilbert-Schmidt adjoint, which is the correct dual for any
// hermiticity-preserving generator in this vec convention.
inline Mat adjoint_propagate(const Mat& M, const Mat& A, double t) {
    if (t < 0.0) throw std::invalid_argument("adjoint_propagate: t must be >= 0");
    const int d = static_cast<int>(A.rows());
    if (M.rows() != static_cast<Eigen::Index>(d) * d || M.rows() != M.cols())
        throw std::invalid_argument("adjoint_propagate: dimension mismatch");
    const Mat E = (M.adjoint() * t).exp();
    return unvec(E * vec(A), d);
}

namespace detail {

// Smallest singular pair of M via inverse iteration on M†M (two triangular
// solves per step through one LU), deflated against `prior` vectors.
// Returns (sigma, vector).
inline std::pair<double, Vec> smallest_singular(const Eigen::PartialPivLU<Mat>& lu,
                                                const Mat& M, const std::vector<Vec>& prior,
                                                std::uint64_t seed, int max_iter = 200) {
    const Eigen::Index n = M.rows();
    Vec x(n);
    std::uint64_t s = seed;
    for (Eigen::Index i = 0; i < n; ++i) {  // deterministic pseudo-random start
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        x(i) = Complex(static_cast<double>(s >> 40) / (1 << 24) - 0.5,
                       static_cast<double>((s >> 16) & 0xffffff) / (1 << 24) - 0.5);
    }
    auto project = [&](Vec& v) {
        for (const Vec& p : prior) v -= p.dot(v) * p;
    };
    project(x);
    x.normalize();
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec y = lu.adjoint().solve(x);  // (M†M)^{-1} = M^{-1} M^{-†}
        y = lu.solve(y);
        project(y);
        y.normalize();
        const double new_sigma = (M * y).norm();
        const bool converged = it > 2 && std::abs(new_sigma - sigma) <= 1e-12 + 1e-6 * sigma;
        sigma = new_sigma;
        x = y;
        if (converged) break;
    }
    return {sigma, x};
}

}  // namespace detail

// Stationary state of the generator: the null singular vector of M,
// normalized to a state.  Errors out if the second singular value also
// vanishes (degenerate null space: the stationary state is not unique).
inline DensityMatrix stationary_state(const Mat& M, double tol = 1e-10) {
    const Eigen::Index n = M.rows();
    if (n != M.cols()) throw std::invalid_argument("stationary_state: not square");
    const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
    if (static_cast<Eigen::Index>(d) * d != n)
        throw std::invalid_argument("stationary_state: dimension is not a square");

    const double scale = M.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) throw std::runtime_error("stationary_state: zero generator");
    const Mat Ms = M + (1e-13 * scale) * Mat::Identity(n, n);  // keep LU well-posed at 0
    Eigen::PartialPivLU<Mat> lu(Ms);

    auto [s1, v1] = detail::smallest_singular(lu, M, {}, 0x9e3779b97f4a7c15ULL);
    if (s1 > tol * scale * static_cast<double>(d))
        throw std::runtime_error("stationary_state: no null vector found (not a generator?)");
    // A degenerate second null vector would dominate the deflated inverse
    // iteration within a few steps; 30 iterations suffice for the gap check
    // even when the nonzero spectrum is clustered (slow tail convergence
    // there only polishes a value already far above the threshold).
    auto [s2, v2] = detail::smallest_singular(lu, M, {v1}, 0xda942042e4dd58b5ULL, 30);
    (void)v2;
    if (s2 <= tol * scale * static_cast<double>(d))
        throw std::runtime_error(
            "stationary_state: null space is degenerate; stationary state not unique");

    Mat rho = hermitize(unvec(v1, d));
    const double tr = rho.trace().real();
    if (std::abs(tr) < 1e-12)
        throw std::runtime_error("stationary_state: traceless null vector");
    rho /= tr;
    return DensityMatrix::checked(rho, 1e-8, 1e-8);
}

struct CptpReport {
    double trace_preservation_error{0.0};  // max-norm of Σ_ij Tr[Φ(E_ij)] E_ij − I
    double min_choi_eigenvalue{0.0};
    bool completely_positive(double tol = 1e-10) const {
        return min_choi_eigenvalue >= -tol;
    }
    bool trace_preserving(double tol = 1e-10) const {
        return trace_preservation_error <= tol;
    }
};

// Choi-matrix diagnostics of a propagator P (a d²×d² superoperator matrix).
// Column j*d+i of P is vec(Φ(E_ij)) in this convention.
inline CptpReport cptp_check(const Mat& P) {
    const Eigen::Index n = P.rows();
    if (n != P.cols()) throw std::invalid_argument("cptp_check: not square");
    const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
    if (static_cast<Eigen::Index>(d) * d != n)
        throw std::invalid_argument("cptp_check: dimension is not a square");
    Mat choi(n, n);
    Mat tp_defect = -Mat::Identity(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const Mat blk = unvec(P.col(static_cast<Eigen::Index>(j) * d + i), d);
            choi.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d,
                       d, d) = blk;
            tp_defect(i, j) += blk.trace();
        }
    }
    CptpReport rep;
    rep.trace_preservation_error = tp_defect.cwiseAbs().maxCoeff();
    Mat ch = 0.5 * (choi + choi.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(ch, Eigen::EigenvaluesOnly);
    rep.min_choi_eigenvalue = es.eigenvalues().minCoeff();
    return rep;
}

}  // namespace openbath
