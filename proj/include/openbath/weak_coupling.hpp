// weak_coupling.hpp — derived master equations: Bohr-frequency sector
// decomposition, the simple double-commutator Markov generator, and the
// RWA Lindblad generator with Lamb shift.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "openbath/spectral.hpp"
#include "openbath/superoperator.hpp"

namespace openbath {

// One system coupling operator and its damped bath mode (coupling constant
// absorbed into v): interaction term v ⊗ q_bath.
struct CouplingTerm {
    Mat v;
    OscillatorParams bath_mode;
};

// V_{Δω}: the part of V connecting energy eigenstates with ε_row − ε_col = ħΔω.
// Under the system evolution it rotates as V_{Δω}(s) = e^{−iΔω s} V_{Δω}
// (interaction picture taken with e^{−iHs/ħ} · e^{+iHs/ħ}).
struct FrequencySector {
    double delta_omega{0.0};
    Mat v_sector;
};

struct MasterEquationSpec {
    Mat h_eff;               // H_S + Lamb shift
    std::vector<Mat> jumps;  // sector operators V_{n,Δω}
    std::vector<double> rates;
};

inline std::vector<FrequencySector> frequency_sectors(const Mat& H_S, const Mat& V,
                                                      double degeneracy_tol = 0.0,
                                                      double hbar = 1.0) {
    if (!is_hermitian(H_S, 1e-10))
        throw std::invalid_argument("frequency_sectors: H_S must be hermitian");
    const int d = static_cast<int>(H_S.rows());
    Eigen::SelfAdjointEigenSolver<Mat> es(H_S);
    const Eigen::VectorXd eps = es.eigenvalues();
    const Mat U = es.eigenvectors();
    const Mat W = U.adjoint() * V * U;

    if (degeneracy_tol <= 0.0)
        degeneracy_tol = 1e-9 * eps.cwiseAbs().maxCoeff() / hbar;

    // Collect and cluster Bohr frequencies (ε_i − ε_j)/ħ.
    std::vector<double> freqs;
    freqs.reserve(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) freqs.push_back((eps(i) - eps(j)) / hbar);
    std::sort(freqs.begin(), freqs.end());
    std::vector<double> centers;
    for (double f : freqs)
        if (centers.empty() || f - centers.back() > degeneracy_tol)
            centers.push_back(f);
        else
            centers.back() = 0.5 * (centers.back() + f);  // keep the cluster centered

    std::vector<FrequencySector> sectors;
    const double null_tol = 1e-13 * W.cwiseAbs().maxCoeff();  // rounding noise in U†VU
    for (double c : centers) {
        Mat v_sec = Mat::Zero(d, d);
        bool nonzero = false;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (std::abs((eps(i) - eps(j)) / hbar - c) <= degeneracy_tol) {
                    v_sec(i, j) = W(i, j);
                    if (std::abs(v_sec(i, j)) > null_tol) nonzero = true;
                }
        if (!nonzero) continue;
        sectors.push_back({c, U * v_sec * U.adjoint()});
    }
    return sectors;
}

// Simplest Markov generator: L_S ρ − (1/ħ²) Σ_n ⟨q_n²⟩∞ [V_n, [V_n, ρ]].
// Noise only; no dissipation (system energy grows without bound for V = q).
inline Mat simple_markov_generator(const Mat& H_S, const std::vector<CouplingTerm>& couplings) {
    using detail::com;
    if (!is_hermitian(H_S, 1e-10))
        throw std::invalid_argument("simple_markov_generator: H_S must be hermitian");
    double hbar = 1.0;
    if (!couplings.empty()) hbar = couplings.front().bath_mode.constants.hbar;
    const Complex i_unit(0.0, 1.0);
    Mat M = (-i_unit / hbar) * com(H_S);
    for (const auto& c : couplings) {
        require_valid(c.bath_mode, "simple_markov_generator");
        const double qq = asymptotic_moments(c.bath_mode).qq;
        const Mat cv = com(c.v);
        M -= (qq / (hbar * hbar)) * (cv * cv);
    }
    return M;
}

// RWA master equation.  For each coupling and sector Δω, the dissipator has
// jump operator V_{n,Δω} with rate 2 h_n(Δω)/ħ², and the Lamb shift is
// ΔH = Σ (S_n(Δω)/ħ) V_{n,Δω}† V_{n,Δω}.  This assignment puts the large
// h(−ω) weight on the lowering sectors, which is what drives the system
// toward the bath temperature; see the model reference in README.md.
inline std::pair<MasterEquationSpec, Mat> rwa_master_equation(
    const Mat& H_S, const std::vector<CouplingTerm>& couplings,
    double degeneracy_tol = 0.0) {
    if (!is_hermitian(H_S, 1e-10))
        throw std::invalid_argument("rwa_master_equation: H_S must be hermitian");
    double hbar = 1.0;
    if (!couplings.empty()) hbar = couplings.front().bath_mode.constants.hbar;

    MasterEquationSpec spec;
    const int d = static_cast<int>(H_S.rows());
    Mat delta_H = Mat::Zero(d, d);
    for (const auto& c : couplings) {
        require_valid(c.bath_mode, "rwa_master_equation");
        for (const auto& sec : frequency_sectors(H_S, c.v, degeneracy_tol, hbar)) {
            const SpectralPair sp = spectral_pair_closed(c.bath_mode, sec.delta_omega);
            if (sp.h < -1e-12)
                throw std::runtime_error(
                    "rwa_master_equation: negative spectral weight h — positivity violated");
            spec.jumps.push_back(sec.v_sector);
            spec.rates.push_back(2.0 * std::max(sp.h, 0.0) / (hbar * hbar));
            delta_H += (sp.S / hbar) * (sec.v_sector.adjoint() * sec.v_sector);
        }
    }
    spec.h_eff = H_S + 0.5 * (delta_H + delta_H.adjoint());
    Mat M = lindblad_generator(spec.h_eff, spec.jumps, spec.rates, hbar);
    return {std::move(spec), std::move(M)};
}

}  // namespace openbath
