// composite.hpp — system ⊗ environment tensor algebra: partial trace, the P0
// projection, and sparse assembly of the composite generator.

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "openbath/superoperator.hpp"

namespace openbath {

using SparseMat = Eigen::SparseMatrix<Complex>;

// Composite Hilbert index convention: i = s * d_E + e (system major).
// Lifting a system operator is kron(A, I_E); an environment one kron(I_S, B).

inline Mat partial_trace(const Mat& rho, int d_S, int d_E, int keep) {
    if (rho.rows() != static_cast<Eigen::Index>(d_S) * d_E || rho.rows() != rho.cols())
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep != 0 && keep != 1)
        throw std::invalid_argument("partial_trace: keep must be 0 (system) or 1 (environment)");
    if (keep == 0) {
        Mat out = Mat::Zero(d_S, d_S);
        for (int s = 0; s < d_S; ++s)
            for (int t = 0; t < d_S; ++t)
                for (int e = 0; e < d_E; ++e)
                    out(s, t) += rho(s * d_E + e, t * d_E + e);
        return out;
    }
    Mat out = Mat::Zero(d_E, d_E);
    for (int e = 0; e < d_E; ++e)
        for (int f = 0; f < d_E; ++f)
            for (int s = 0; s < d_S; ++s)
                out(e, f) += rho(s * d_E + e, s * d_E + f);
    return out;
}

// P0[O] = Tr_E[O] ⊗ rho_tilde.
inline Mat project_p0(const Mat& O, const Mat& rho_tilde, int d_S, int d_E) {
    if (rho_tilde.rows() != d_E || rho_tilde.cols() != d_E)
        throw std::invalid_argument("project_p0: rho_tilde must live on the environment factor");
    return kron(partial_trace(O, d_S, d_E, 0), rho_tilde);
}

namespace detail {

// Lift a subsystem superoperator into the composite superoperator, acting as
// the identity on the other factor.  `before` and `after` are the dimensions
// of the identity factors to the left and right of the subsystem in the
// Hilbert index (system major: system has before=1, after=d_E).
inline void lift_superop(std::vector<Eigen::Triplet<Complex>>& trip, const Mat& L,
                         int d_sub, int before, int after) {
    const Eigen::Index D = static_cast<Eigen::Index>(before) * d_sub * after;
    const auto idx = [&](int b, int x, int a) -> Eigen::Index {
        return (static_cast<Eigen::Index>(b) * d_sub + x) * after + a;
    };
    // The identity factors are diagonal separately in the bra and ket indices:
    // element ((br,s1,ar),(bc,s2,ac)) couples to ((br,t1,ar),(bc,t2,ac)).
    for (int t2 = 0; t2 < d_sub; ++t2)          // input column index on subsystem
        for (int t1 = 0; t1 < d_sub; ++t1)      // input row index
            for (int s2 = 0; s2 < d_sub; ++s2)  // output column index
                for (int s1 = 0; s1 < d_sub; ++s1) {
                    const Complex v = L(s2 * d_sub + s1, t2 * d_sub + t1);
                    if (v == Complex(0.0)) continue;
                    for (int br = 0; br < before; ++br)
                        for (int bc = 0; bc < before; ++bc)
                            for (int ar = 0; ar < after; ++ar)
                                for (int ac = 0; ac < after; ++ac) {
                                    const Eigen::Index row =
                                        idx(bc, s2, ac) * D + idx(br, s1, ar);
                                    const Eigen::Index col =
                                        idx(bc, t2, ac) * D + idx(br, t1, ar);
                                    trip.emplace_back(row, col, v);
                                }
                }
}

// -(i/hbar) [U, .] for a (typically sparse) composite operator U.
inline void add_commutator(std::vector<Eigen::Triplet<Complex>>& trip, const Mat& U,
                           double hbar) {
    const Eigen::Index D = U.rows();
    const Complex c(-1.0 / hbar, 0.0);
    const Complex i_unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < D; ++i)
        for (Eigen::Index k = 0; k < D; ++k) {
            const Complex u = U(i, k);
            if (u == Complex(0.0)) continue;
            for (Eigen::Index j = 0; j < D; ++j) {
                // spre: rho(k,j) -> element (i,j);  spost: rho(j,i) -> element (j,k)
                trip.emplace_back(j * D + i, j * D + k, c * i_unit * u);
                trip.emplace_back(k * D + j, i * D + j, -c * i_unit * u);
            }
        }
}

}  // namespace detail

// L = L_S ⊗ 1 + 1 ⊗ L_E - (i/ħ)[U_I, ·], assembled sparse.  L_S acts on the
// d_S factor, L_E on the d_E factor; U_I is a hermitian composite operator.
inline SparseMat compose_composite_generator(const Mat& L_S, const Mat& L_E,
                                             const Mat& U_I, double hbar = 1.0) {
    const int d_S = static_cast<int>(std::llround(std::sqrt(static_cast<double>(L_S.rows()))));
    const int d_E = static_cast<int>(std::llround(std::sqrt(static_cast<double>(L_E.rows()))));
    if (static_cast<Eigen::Index>(d_S) * d_S != L_S.rows() || L_S.rows() != L_S.cols())
        throw std::invalid_argument("compose_composite_generator: L_S not a superoperator");
    if (static_cast<Eigen::Index>(d_E) * d_E != L_E.rows() || L_E.rows() != L_E.cols())
        throw std::invalid_argument("compose_composite_generator: L_E not a superoperator");
    const Eigen::Index D = static_cast<Eigen::Index>(d_S) * d_E;
    if (U_I.rows() != D || U_I.cols() != D)
        throw std::invalid_argument("compose_composite_generator: U_I dimension mismatch");
    if (!is_hermitian(U_I, 1e-10))
        throw std::invalid_argument("compose_composite_generator: U_I must be hermitian");

    std::vector<Eigen::Triplet<Complex>> trip;
    detail::lift_superop(trip, L_S, d_S, 1, d_E);
    detail::lift_superop(trip, L_E, d_E, d_S, 1);
    detail::add_commutator(trip, U_I, hbar);
    SparseMat M(D * D, D * D);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

}  // namespace openbath
