// spectral.hpp — half-line Fourier transform of the bath correlation:
// h + iS = \int_0^inf e^{-i dw s} <q(s)q> ds, closed form and quadrature oracle.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "openbath/oscillator.hpp"

namespace openbath {

struct SpectralPair {
    double h{0.0};
    double S{0.0};
    double delta_omega{0.0};
};

// Closed forms.  Re-derived from the defining integral and the correlation
// function; they differ from commonly printed variants in the sign of the
// odd h term (-m lambda hbar dw), an overall 1/m^2, the signs of the S
// coefficients c0 and c2, and a (lambda^2 + Omega^2) factor in the S
// denominator.  The quadrature oracle below is the ground truth used to fix
// these; see the model reference in README.md.
inline SpectralPair spectral_pair_closed(const OscillatorParams& p, double delta_omega) {
    require_valid(p, "spectral_pair_closed");
    const double lam = p.lambda, mu = p.mu, m = p.m, dw = delta_omega;
    const double hbar = p.constants.hbar;
    const double Om = p.Omega();
    const double Om2 = Om * Om;
    const double lp = lam + mu;
    const double den = (lam * lam + (Om + dw) * (Om + dw)) *
                       (lam * lam + (Om - dw) * (Om - dw));

    const double h_num = m * m * p.D_qq * (lp * lp + dw * dw) + p.D_pp +
                         2.0 * m * lp * p.D_pq - m * lam * hbar * dw;

    const double l2O2 = lam * lam + Om2;
    const double c0 = -hbar * lam * m * l2O2 * l2O2;
    const double c1 = ((Om2 - 3.0 * lam * lam) * lp * lp + l2O2 * l2O2) * m * m * p.D_qq +
                      (Om2 - 3.0 * lam * lam) * (2.0 * lp * m * p.D_pq + p.D_pp);
    const double c2 = hbar * lam * m * l2O2;
    const double c3 = -m * m * p.D_qq * (l2O2 + lp * lp) - 2.0 * p.D_pq * m * lp - p.D_pp;
    const double s_num = c0 + (c1 + (c2 + c3 * dw) * dw) * dw;

    return {h_num / (m * m * den), s_num / (2.0 * lam * m * m * l2O2 * den), dw};
}

namespace detail {

// Adaptive Gauss-Kronrod 15(7) for complex integrands on [a, b].
inline std::complex<double> gk15(const std::function<std::complex<double>(double)>& f,
                                 double a, double b, double& err) {
    static const double xk[8] = {0.0, 0.207784955007898, 0.405845151377397,
                                 0.586087235467691, 0.741531185599394,
                                 0.864864423359769, 0.949107912342759,
                                 0.991455371120813};
    static const double wk[8] = {0.209482141084728, 0.204432940075298,
                                 0.190350578064785, 0.169004726639267,
                                 0.140653259715525, 0.104790010322250,
                                 0.063092092629979, 0.022935322010529};
    static const double wg[4] = {0.417959183673469, 0.381830050505119,
                                 0.279705391489277, 0.129484966168870};
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    std::complex<double> resk = wk[0] * f(c);
    std::complex<double> resg = wg[0] * f(c);
    for (int j = 1; j < 8; ++j) {
        const std::complex<double> fv = f(c - hw * xk[j]) + f(c + hw * xk[j]);
        resk += wk[j] * fv;
        if (j % 2 == 0) resg += wg[j / 2] * fv;
    }
    err = std::abs(resk - resg) * hw;
    return resk * hw;
}

inline std::complex<double> adaptive_quad(const std::function<std::complex<double>(double)>& f,
                                          double a, double b, double tol, int depth = 0) {
    double err = 0.0;
    const std::complex<double> whole = gk15(f, a, b, err);
    if (err <= tol || depth >= 40) return whole;
    const double mid = 0.5 * (a + b);
    return adaptive_quad(f, a, mid, 0.5 * tol, depth + 1) +
           adaptive_quad(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

struct SpectralQuadratureResult {
    SpectralPair pair;
    double t_max{0.0};
    double truncation_bound{0.0};  // |tail| <= C e^{-lambda t_max} / lambda
};

// Direct numerical evaluation of the defining integral, truncated at
// t_max = 40 / lambda where the integrand has decayed below C e^{-40}.
inline SpectralQuadratureResult spectral_pair_quadrature(const OscillatorParams& p,
                                                         double delta_omega,
                                                         double rel_tol = 1e-10) {
    require_valid(p, "spectral_pair_quadrature");
    if (!(rel_tol > 0.0) || rel_tol > 1e-4)
        throw std::invalid_argument("spectral_pair_quadrature: rel_tol must be in (0, 1e-4]");
    const double t_max = 40.0 / p.lambda;
    const MomentState ms = asymptotic_moments(p);
    const double Om = p.Omega();
    const std::complex<double> pq_term(2.0 * ms.s_pq, -p.constants.hbar);
    const auto integrand = [&](double s) {
        const double decay = std::exp(-p.lambda * s);
        const std::complex<double> corr =
            ms.qq * (std::cos(Om * s) + p.mu / Om * std::sin(Om * s)) * decay +
            pq_term / (2.0 * p.m * Om) * std::sin(Om * s) * decay;
        return std::exp(std::complex<double>(0.0, -delta_omega * s)) * corr;
    };
    // Panels of roughly one oscillation period each keep the estimator honest.
    const double osc = std::max({p.Omega(), std::abs(delta_omega), p.lambda});
    const int n_panels = std::max(16, static_cast<int>(t_max * osc / 3.0) + 1);
    const double scale = bath_correlation_envelope(p) / p.lambda;
    const double tol = rel_tol * scale / n_panels;
    std::complex<double> total = 0.0;
    for (int k = 0; k < n_panels; ++k) {
        const double a = t_max * k / n_panels;
        const double b = t_max * (k + 1) / n_panels;
        total += detail::adaptive_quad(integrand, a, b, tol);
    }
    SpectralQuadratureResult r;
    r.pair = {total.real(), total.imag(), delta_omega};
    r.t_max = t_max;
    r.truncation_bound = bath_correlation_envelope(p) * std::exp(-40.0) / p.lambda;
    return r;
}

}  // namespace openbath
