// oscillator.hpp — single damped bath mode: parameter families, moment flows,
// asymptotic moments, Heisenberg coefficients and the two-time correlation.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "openbath/constants.hpp"

namespace openbath {

// Damped-mode master equation parameters: damping (lambda, mu) and diffusion
// (D_qq, D_pp, D_pq).  Relaxing environments require lambda > |mu| and
// omega > |mu| (underdamped, both first-moment rates positive).
struct OscillatorParams {
    double m{1.0};
    double omega{1.0};
    double lambda{0.1};
    double mu{0.0};
    double D_qq{0.0};
    double D_pp{0.0};
    double D_pq{0.0};
    Constants constants{};

    double Omega() const { return std::sqrt(omega * omega - mu * mu); }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool valid() const { return violations.empty(); }
};

// First and second moments of a mode state; s_pq = <{p,q}/2>.
struct MomentState {
    double mean_q{0.0};
    double mean_p{0.0};
    double qq{0.0};
    double pp{0.0};
    double s_pq{0.0};

    // Generalized uncertainty, meaningful for states (not intermediate arithmetic).
    bool satisfies_uncertainty(double hbar, double tol = 1e-12) const {
        return qq > 0.0 && pp > 0.0 &&
               qq * pp - s_pq * s_pq >= hbar * hbar / 4.0 - tol;
    }
};

// Reports every violated constraint; never throws.
inline ValidationReport validate_params(const OscillatorParams& p) {
    ValidationReport r;
    const double hbar = p.constants.hbar;
    if (!(p.D_qq > 0.0)) r.violations.push_back("D_qq>0");
    if (!(p.D_pp > 0.0)) r.violations.push_back("D_pp>0");
    const double bound = 0.25 * p.lambda * p.lambda * hbar * hbar;
    if (!(p.D_qq * p.D_pp - p.D_pq * p.D_pq >= bound))
        r.violations.push_back("determinant");
    if (!(p.omega > std::abs(p.mu))) r.violations.push_back("underdamping");
    if (!(p.lambda > std::abs(p.mu))) r.violations.push_back("relaxation");
    return r;
}

inline void require_valid(const OscillatorParams& p, const char* who) {
    const auto r = validate_params(p);
    if (!r.valid()) {
        std::string msg = std::string(who) + ": invalid oscillator parameters:";
        for (const auto& v : r.violations) msg += " " + v;
        throw std::invalid_argument(msg);
    }
}

// Diffusion coefficients for which the Gibbs state at temperature T is the
// asymptotic state.  Note: for mu > 0 the determinant constraint additionally
// requires coth(hbar*omega/2kT) >= lambda/sqrt(lambda^2-mu^2); the returned
// parameters are reported through validate_params rather than silently fixed.
inline OscillatorParams gibbs_params(double m, double omega, double lambda, double mu,
                                     double T, Constants constants = {}) {
    constants.check();
    if (!(T > 0.0)) throw std::invalid_argument("gibbs_params: T must be positive");
    if (!(lambda > mu) || !(mu >= 0.0))
        throw std::invalid_argument("gibbs_params: requires lambda > mu >= 0");
    const double coth = 1.0 / std::tanh(constants.hbar * omega / (2.0 * constants.k_B * T));
    OscillatorParams p;
    p.m = m;
    p.omega = omega;
    p.lambda = lambda;
    p.mu = mu;
    p.D_pp = 0.5 * (lambda + mu) * constants.hbar * m * omega * coth;
    p.D_qq = 0.5 * (lambda - mu) * constants.hbar / (m * omega) * coth;
    p.D_pq = 0.0;
    p.constants = constants;
    return p;
}

// Diffusion family admitting persistent pure states; saturates the
// determinant bound exactly.  Test fixture only — not a relaxing environment.
inline OscillatorParams persistent_pure_params(double m, double omega, double lambda,
                                               double mu, Constants constants = {}) {
    constants.check();
    if (!(omega > std::abs(mu)))
        throw std::invalid_argument("persistent_pure_params: requires omega > |mu|");
    const double Omega = std::sqrt(omega * omega - mu * mu);
    OscillatorParams p;
    p.m = m;
    p.omega = omega;
    p.lambda = lambda;
    p.mu = mu;
    p.D_qq = constants.hbar * lambda / (2.0 * m * Omega);
    p.D_pp = constants.hbar * lambda * m * omega * omega / (2.0 * Omega);
    p.D_pq = -constants.hbar * lambda * mu / (2.0 * Omega);
    p.constants = constants;
    return p;
}

// Stationary moments.  Closed forms re-derived from the moment ODEs; the
// common prefactor is 1/(2 lambda (lambda^2 + omega^2 - mu^2)).
inline MomentState asymptotic_moments(const OscillatorParams& p) {
    require_valid(p, "asymptotic_moments");
    const double lam = p.lambda, mu = p.mu, om = p.omega, m = p.m;
    const double P = 2.0 * lam * (lam * lam + om * om - mu * mu);
    MomentState ms;
    ms.mean_q = 0.0;
    ms.mean_p = 0.0;
    ms.pp = (m * m * om * om * om * om * p.D_qq +
             (2.0 * lam * (lam - mu) + om * om) * p.D_pp -
             2.0 * m * om * om * (lam - mu) * p.D_pq) / P;
    ms.qq = ((2.0 * lam * (lam + mu) + om * om) * m * m * p.D_qq + p.D_pp +
             2.0 * m * (lam + mu) * p.D_pq) / (P * m * m);
    ms.s_pq = ((lam - mu) * p.D_pp + 2.0 * m * (lam * lam - mu * mu) * p.D_pq -
               m * m * om * om * (lam + mu) * p.D_qq) / (P * m);
    return ms;
}

namespace detail {

// exp of an affine system dx/dt = M x + b via the augmented-block exponential;
// valid for singular M as well.
template <int N>
inline Eigen::Matrix<double, N, 1> affine_flow(const Eigen::Matrix<double, N, N>& M,
                                               const Eigen::Matrix<double, N, 1>& b,
                                               const Eigen::Matrix<double, N, 1>& x0,
                                               double t) {
    Eigen::Matrix<double, N + 1, N + 1> A = Eigen::Matrix<double, N + 1, N + 1>::Zero();
    A.template topLeftCorner<N, N>() = M;
    A.template topRightCorner<N, 1>() = b;
    const Eigen::Matrix<double, N + 1, N + 1> E = (A * t).exp();
    return E.template topLeftCorner<N, N>() * x0 + E.template topRightCorner<N, 1>();
}

}  // namespace detail

// Exact flow of the first- and second-moment linear ODEs.  Does not validate
// the parameter constraints (closed-system fixtures use lambda = mu = D = 0).
inline MomentState evolve_moments(const OscillatorParams& p, const MomentState& m0,
                                  double t) {
    if (t < 0.0) throw std::invalid_argument("evolve_moments: t must be >= 0");
    const double lam = p.lambda, mu = p.mu, om = p.omega, m = p.m;

    Eigen::Matrix2d A1;
    A1 << -(lam - mu), 1.0 / m,
          -m * om * om, -(lam + mu);
    Eigen::Vector2d x1(m0.mean_q, m0.mean_p);
    x1 = (A1 * t).exp() * x1;

    Eigen::Matrix3d A2;  // on (pp, qq, s_pq)
    A2 << -2.0 * (lam + mu), 0.0, -2.0 * m * om * om,
          0.0, -2.0 * (lam - mu), 2.0 / m,
          1.0 / m, -m * om * om, -2.0 * lam;
    Eigen::Vector3d b(2.0 * p.D_pp, 2.0 * p.D_qq, 2.0 * p.D_pq);
    Eigen::Vector3d x2 = detail::affine_flow<3>(A2, b, {m0.pp, m0.qq, m0.s_pq}, t);

    MomentState out;
    out.mean_q = x1(0);
    out.mean_p = x1(1);
    out.pp = x2(0);
    out.qq = x2(1);
    out.s_pq = x2(2);
    return out;
}

// q in the Heisenberg picture is c_q(t) q + c_p(t) p.
struct HeisenbergQ {
    double c_q;
    double c_p;
};

inline HeisenbergQ heisenberg_q_coefficients(const OscillatorParams& p, double t) {
    if (t < 0.0) throw std::invalid_argument("heisenberg_q_coefficients: t must be >= 0");
    const double Om = p.Omega();
    const double decay = std::exp(-p.lambda * t);
    return {(std::cos(Om * t) + p.mu / Om * std::sin(Om * t)) * decay,
            std::sin(Om * t) / (p.m * Om) * decay};
}

// Stationary two-time correlation <q(t) q>.
inline std::complex<double> bath_correlation(const OscillatorParams& p, double t) {
    if (t < 0.0) throw std::invalid_argument("bath_correlation: t must be >= 0");
    require_valid(p, "bath_correlation");
    const MomentState ms = asymptotic_moments(p);
    const double Om = p.Omega();
    const double decay = std::exp(-p.lambda * t);
    const std::complex<double> pq_term(2.0 * ms.s_pq, -p.constants.hbar);
    return ms.qq * (std::cos(Om * t) + p.mu / Om * std::sin(Om * t)) * decay +
           pq_term / (2.0 * p.m * Om) * std::sin(Om * t) * decay;
}

// Envelope constant for |<q(t)q>| <= C e^{-lambda t}.
inline double bath_correlation_envelope(const OscillatorParams& p) {
    const MomentState ms = asymptotic_moments(p);
    const double Om = p.Omega();
    return std::abs(ms.qq) * (1.0 + std::abs(p.mu) / Om) +
           (2.0 * std::abs(ms.s_pq) + p.constants.hbar) / (2.0 * p.m * Om);
}

}  // namespace openbath
