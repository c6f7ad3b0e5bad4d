// linear_example.hpp — harmonic system linearly coupled to damped bath modes:
// sector operators, closed-form effective coefficients, thermal/resonance
// approximations.

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "openbath/weak_coupling.hpp"

namespace openbath {

// H_S = P²/2m_S + ½ m_S ω_S² Q², coupled as U_I = Σ_n C_n Q ⊗ q_n.
struct LinearModelSpec {
    double m_S{1.0};
    double omega_S{1.0};
    std::vector<std::pair<double, OscillatorParams>> bath;  // (C_n, mode)
    Constants constants{};
};

inline void require_valid(const LinearModelSpec& s) {
    if (!(s.m_S > 0.0) || !(s.omega_S > 0.0))
        throw std::invalid_argument("LinearModelSpec: m_S and omega_S must be positive");
    s.constants.check();
    for (const auto& [C, mode] : s.bath) {
        (void)C;
        require_valid(mode, "LinearModelSpec");
        if (mode.constants.hbar != s.constants.hbar)
            throw std::invalid_argument("LinearModelSpec: inconsistent hbar across modes");
    }
}

struct EffectiveCoefficients {
    double delta_omega_S{0.0};
    double delta_E{0.0};  // scalar energy shift; never enters the dynamics
    double lambda_eff{0.0};
    double D_pp_eff{0.0};
    double D_qq_eff{0.0};
    bool lambda_eff_nonpositive{false};  // surfaced, not asserted away
};

// The two sectors per bath mode: +ω_S ∝ a†, −ω_S ∝ a, both with coefficient
// C_n √(ħ/2 m_S ω_S).  Matches the generic frequency_sectors on C_n Q.
inline std::vector<std::pair<FrequencySector, FrequencySector>> linear_model_sectors(
    const LinearModelSpec& spec, int d) {
    require_valid(spec);
    const FockOperators f = fock_operators(d, spec.m_S, spec.omega_S, spec.constants);
    const double pref = std::sqrt(spec.constants.hbar / (2.0 * spec.m_S * spec.omega_S));
    std::vector<std::pair<FrequencySector, FrequencySector>> out;
    out.reserve(spec.bath.size());
    for (const auto& [C, mode] : spec.bath) {
        (void)mode;
        out.push_back({{+spec.omega_S, C * pref * f.a_dagger},
                       {-spec.omega_S, C * pref * f.a}});
    }
    return out;
}

// Closed-form effective coefficients from the spectral pair at ±ω_S.
// λ_eff uses h(−ω_S) − h(+ω_S): the detailed-balance asymmetry of h makes
// this positive for thermal baths.
inline EffectiveCoefficients effective_coefficients(const LinearModelSpec& spec) {
    require_valid(spec);
    const double hbar = spec.constants.hbar;
    const double ms = spec.m_S, ws = spec.omega_S;
    EffectiveCoefficients e;
    for (const auto& [C, mode] : spec.bath) {
        const double C2 = C * C;
        const SpectralPair plus = spectral_pair_closed(mode, +ws);
        const SpectralPair minus = spectral_pair_closed(mode, -ws);
        e.lambda_eff += C2 * (minus.h - plus.h) / (2.0 * hbar * ms * ws);
        e.D_pp_eff += 0.25 * C2 * (plus.h + minus.h);
        e.delta_omega_S += C2 * (plus.S + minus.S) / (2.0 * ms * ws * hbar);
        e.delta_E += C2 * (plus.S - minus.S) / (4.0 * ms * ws);
    }
    e.D_qq_eff = e.D_pp_eff / (ms * ws * ms * ws);
    e.lambda_eff_nonpositive = !(e.lambda_eff > 0.0);
    return e;
}

struct ThermalCoefficients {
    EffectiveCoefficients full;       // thermalized closed forms
    EffectiveCoefficients resonance;  // near-resonance approximation
    double rel_deviation_lambda{0.0};
    double rel_deviation_D_pp{0.0};
};

namespace detail {

// Recover coth(ħω/2k_BT) of a Gibbs-family mode; rejects non-Gibbs diffusion.
inline double gibbs_coth(const OscillatorParams& p) {
    if (p.D_pq != 0.0)
        throw std::invalid_argument("thermal coefficients: bath mode is not Gibbs-form (D_pq != 0)");
    const double hbar = p.constants.hbar;
    const double c1 = 2.0 * p.D_pp / ((p.lambda + p.mu) * hbar * p.m * p.omega);
    const double c2 = 2.0 * p.D_qq * p.m * p.omega / ((p.lambda - p.mu) * hbar);
    if (std::abs(c1 - c2) > 1e-10 * std::max(c1, c2) || !(c1 >= 1.0))
        throw std::invalid_argument("thermal coefficients: bath mode is not Gibbs-form");
    return c1;
}

}  // namespace detail

// Thermalized closed forms and the near-resonance approximation, with their
// relative deviation.  Bath modes must be Gibbs-form (gibbs_params output).
inline ThermalCoefficients thermal_weak_damping_coefficients(const LinearModelSpec& spec) {
    require_valid(spec);
    const double hbar = spec.constants.hbar;
    const double ms = spec.m_S, ws = spec.omega_S;
    ThermalCoefficients out;
    for (const auto& [C, mode] : spec.bath) {
        const double C2 = C * C;
        const double coth = detail::gibbs_coth(mode);
        const double lam = mode.lambda, mu = mode.mu, mn = mode.m, wn = mode.omega;
        const double Om2 = wn * wn - mu * mu;
        const double den = (lam * lam + (std::sqrt(Om2) - ws) * (std::sqrt(Om2) - ws)) *
                           (lam * lam + (std::sqrt(Om2) + ws) * (std::sqrt(Om2) + ws));
        out.full.lambda_eff += C2 * lam / (ms * mn * den);
        out.full.D_pp_eff += C2 * hbar * coth *
                             ((lam + mu) * (lam * lam + Om2) + (lam - mu) * ws * ws) /
                             (4.0 * mn * wn * den);
        out.full.delta_omega_S += C2 * (ws * ws - lam * lam - Om2) / (2.0 * ms * mn * ws * den);

        const double lam_res = C2 / (4.0 * ms * mn * ws * ws * lam);
        out.resonance.lambda_eff += lam_res;
        out.resonance.D_pp_eff += 0.5 * hbar * ms * ws * coth * lam_res;
    }
    out.full.D_qq_eff = out.full.D_pp_eff / (ms * ws * ms * ws);
    out.resonance.D_qq_eff = out.resonance.D_pp_eff / (ms * ws * ms * ws);
    out.full.lambda_eff_nonpositive = !(out.full.lambda_eff > 0.0);
    out.resonance.lambda_eff_nonpositive = !(out.resonance.lambda_eff > 0.0);
    out.rel_deviation_lambda =
        std::abs(out.resonance.lambda_eff - out.full.lambda_eff) / out.full.lambda_eff;
    out.rel_deviation_D_pp =
        std::abs(out.resonance.D_pp_eff - out.full.D_pp_eff) / out.full.D_pp_eff;
    return out;
}

// The RWA generator of the linear model as CouplingTerms (for cross-checks
// and the thermalization scenario).
inline std::vector<CouplingTerm> linear_model_couplings(const LinearModelSpec& spec, int d) {
    require_valid(spec);
    const FockOperators f = fock_operators(d, spec.m_S, spec.omega_S, spec.constants);
    std::vector<CouplingTerm> out;
    out.reserve(spec.bath.size());
    for (const auto& [C, mode] : spec.bath) out.push_back({C * f.q, mode});
    return out;
}

}  // namespace openbath
