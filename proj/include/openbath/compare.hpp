// compare.hpp — flagship validation experiment: exact composite dynamics,
// partial-traced, against the derived RWA reduced dynamics, with coupling-scale
// halving and correlated-vs-product initial-state twins.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "openbath/composite.hpp"
#include "openbath/expm.hpp"
#include "openbath/linear_example.hpp"

namespace openbath {

struct CompareSetup {
    double m_S{1.0};
    double omega_S{1.0};
    OscillatorParams bath;
    int d_S{8};
    int d_E{8};
    double epsilon{0.3};     // coupling scale: U_I = epsilon q_S ⊗ q_E
    int n_steps{200};
    double horizon{5.0};     // in units of 1/lambda_eff (1/lambda_bath if eps = 0)
    std::uint64_t seed{1};   // correlated initial state construction
};

struct ComparisonReport {
    double epsilon{0.0};
    double lambda_eff{0.0};
    std::vector<double> times;
    std::vector<double> trace_distance;         // reduced composite vs RWA
    std::vector<double> correlated_vs_product;  // twin reduced propagations
    double max_trace_distance{0.0};
};

namespace detail {

// Joint pure state with nonzero system-bath covariance, reproducible from the
// seed: seeded complex amplitudes with an energy-decaying envelope.
inline Mat correlated_pure_state(int d_S, int d_E, std::uint64_t seed) {
    Vec psi(d_S * d_E);
    std::uint64_t s = seed ^ 0x5851f42d4c957f2dULL;
    auto next = [&s]() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
    };
    for (int i = 0; i < d_S; ++i)
        for (int e = 0; e < d_E; ++e)
            psi(i * d_E + e) = std::exp(-0.3 * (i + e)) * Complex(next(), next());
    psi.normalize();
    return psi * psi.adjoint();
}

}  // namespace detail

// Propagates the full composite generator and the derived RWA generator from
// the same initial system state, reporting the trace-distance series, plus the
// correlated-vs-product twin series under the exact composite dynamics.
inline ComparisonReport compare_reduced_vs_derived(const CompareSetup& cfg) {
    if (cfg.d_S < 2 || cfg.d_E < 2 || cfg.d_S * cfg.d_E > 128)
        throw std::invalid_argument("compare_reduced_vs_derived: dimension budget is 2 <= d, d_S*d_E <= 128");
    if (cfg.epsilon < 0.0 || cfg.n_steps < 1 || !(cfg.horizon > 0.0))
        throw std::invalid_argument("compare_reduced_vs_derived: bad epsilon/n_steps/horizon");
    require_valid(cfg.bath, "compare_reduced_vs_derived");  // relaxing bath required

    const FockOperators fS = fock_operators(cfg.d_S, cfg.m_S, cfg.omega_S, cfg.bath.constants);
    const FockOperators fE = fock_operators(cfg.d_E, cfg.bath.m, cfg.bath.omega, cfg.bath.constants);
    const Mat L_E = sns_generator(cfg.bath, fE);
    const DensityMatrix rho_tilde = stationary_state(L_E);

    LinearModelSpec lm;
    lm.m_S = cfg.m_S;
    lm.omega_S = cfg.omega_S;
    lm.bath.push_back({cfg.epsilon, cfg.bath});
    lm.constants = cfg.bath.constants;
    const EffectiveCoefficients eff = effective_coefficients(lm);
    if (cfg.epsilon > 0.0 && eff.lambda_eff_nonpositive)
        throw std::runtime_error("compare_reduced_vs_derived: bath gives nonpositive effective damping");

    ComparisonReport rep;
    rep.epsilon = cfg.epsilon;
    rep.lambda_eff = eff.lambda_eff;
    const double t_end =
        cfg.horizon / (cfg.epsilon > 0.0 ? eff.lambda_eff : cfg.bath.lambda);
    const double dt = t_end / cfg.n_steps;

    // derived side
    const auto [me, M_rwa] =
        rwa_master_equation(fS.H0, {{cfg.epsilon * fS.q, cfg.bath}});
    const Mat E_rwa = (M_rwa * dt).exp();

    // exact composite side, realified for a single real matrix exponential
    const Mat L_S = lindblad_generator(fS.H0, {}, {}, cfg.bath.constants.hbar);
    const Mat U_I = cfg.epsilon * kron(fS.q, fE.q);
    const SparseMat L = compose_composite_generator(L_S, L_E, U_I, cfg.bath.constants.hbar);
    const int D = cfg.d_S * cfg.d_E;
    const RealifiedGenerator g = realify(L, D);
    const Eigen::MatrixXd E_full = expm_real(g.R * dt);

    // initial states: a fixed pure system state for the convergence run, and
    // the seeded correlated joint state with its equal-marginal product twin
    const Vec alpha = coherent_state(cfg.d_S, Complex(0.6, 0.0));
    const Mat rho_S0 = alpha * alpha.adjoint();
    const Mat rho_corr = detail::correlated_pure_state(cfg.d_S, cfg.d_E, cfg.seed);
    const Mat rho_corr_marginal = partial_trace(rho_corr, cfg.d_S, cfg.d_E, 0);

    Eigen::VectorXd r_full = g.to_real(kron(rho_S0, rho_tilde.rho));
    Eigen::VectorXd r_corr = g.to_real(rho_corr);
    Eigen::VectorXd r_twin = g.to_real(kron(rho_corr_marginal, rho_tilde.rho));
    Vec v_rwa = vec(rho_S0);

    for (int k = 0; k <= cfg.n_steps; ++k) {
        const Mat red = partial_trace(g.from_real(r_full), cfg.d_S, cfg.d_E, 0);
        const double td = trace_distance(red, unvec(v_rwa, cfg.d_S));
        const double td_twin =
            trace_distance(partial_trace(g.from_real(r_corr), cfg.d_S, cfg.d_E, 0),
                           partial_trace(g.from_real(r_twin), cfg.d_S, cfg.d_E, 0));
        if (!(td >= 0.0 && td <= 1.0 + 1e-9) || !(td_twin >= 0.0 && td_twin <= 1.0 + 1e-9))
            throw std::runtime_error("compare_reduced_vs_derived: trace distance left [0, 1]");
        rep.times.push_back(k * dt);
        rep.trace_distance.push_back(td);
        rep.correlated_vs_product.push_back(td_twin);
        if (td > rep.max_trace_distance) rep.max_trace_distance = td;
        if (k == cfg.n_steps) break;
        r_full = E_full * r_full;
        r_corr = E_full * r_corr;
        r_twin = E_full * r_twin;
        v_rwa = E_rwa * v_rwa;
    }
    return rep;
}

struct ConvergenceTable {
    std::vector<ComparisonReport> runs;  // epsilon, epsilon/2, ...
    std::vector<double> ratios;          // max-TD ratio per halving
};

inline ConvergenceTable convergence_experiment(CompareSetup cfg, int halvings) {
    if (halvings < 1)
        throw std::invalid_argument("convergence_experiment: halvings must be >= 1");
    ConvergenceTable tab;
    for (int k = 0; k <= halvings; ++k) {
        tab.runs.push_back(compare_reduced_vs_derived(cfg));
        cfg.epsilon *= 0.5;
    }
    for (int k = 0; k < halvings; ++k)
        tab.ratios.push_back(tab.runs[k].max_trace_distance /
                             tab.runs[k + 1].max_trace_distance);
    return tab;
}

}  // namespace openbath
