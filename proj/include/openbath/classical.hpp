// classical.hpp — classical analogue: system + damped noise-driven bath
// oscillators, dissipation kernel, Markov limit, seeded trajectory ensembles.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "openbath/constants.hpp"
#include "openbath/stats.hpp"

namespace openbath {

struct ClassicalSystemSpec {
    double m{1.0};
    std::function<double(double)> U;    // potential (diagnostics only)
    std::function<double(double)> dU;   // its derivative (enters the force)
    double x0{0.0};
    double v0{0.0};
};

inline ClassicalSystemSpec harmonic_system(double m, double omega0, double x0 = 0.0,
                                           double v0 = 0.0) {
    ClassicalSystemSpec s;
    s.m = m;
    s.U = [m, omega0](double x) { return 0.5 * m * omega0 * omega0 * x * x; };
    s.dU = [m, omega0](double x) { return m * omega0 * omega0 * x; };
    s.x0 = x0;
    s.v0 = v0;
    return s;
}

// One underdamped bath oscillator; coupling enters through a_mu(x).
struct ClassicalBathMode {
    double m_mu{1.0};
    double omega_mu{1.0};
    double gamma_mu{0.1};
    std::function<double(double)> a;    // coupling a_mu(x)
    std::function<double(double)> da;   // its derivative
    double q0{0.0};
    double v0{0.0};

    double Omega() const { return std::sqrt(omega_mu * omega_mu - gamma_mu * gamma_mu); }
};

inline ClassicalBathMode linear_mode(double m_mu, double omega_mu, double gamma_mu,
                                     double c, double q0 = 0.0, double v0 = 0.0) {
    if (!(omega_mu > gamma_mu) || !(gamma_mu > 0.0) || !(m_mu > 0.0))
        throw std::invalid_argument("linear_mode: requires m > 0, omega > gamma > 0");
    ClassicalBathMode b;
    b.m_mu = m_mu;
    b.omega_mu = omega_mu;
    b.gamma_mu = gamma_mu;
    b.a = [c](double x) { return c * x; };
    b.da = [c](double) { return c; };
    b.q0 = q0;
    b.v0 = v0;
    return b;
}

// Dissipation kernel: the sin-term prefactor is gamma/Omega (fixed by the
// quadrature identity int_0^inf eta dtau = eta_bar; a commonly printed
// Omega/gamma variant fails it — see the model reference in README.md).
inline double memory_kernel(const std::vector<ClassicalBathMode>& bath, double x_t,
                            double x_s, double t, double s) {
    if (t < s) throw std::invalid_argument("memory_kernel: requires t >= s");
    const double tau = t - s;
    double eta = 0.0;
    for (const auto& b : bath) {
        const double Om = b.Omega();
        eta += b.m_mu * b.omega_mu * b.omega_mu *
               (std::cos(Om * tau) + b.gamma_mu / Om * std::sin(Om * tau)) *
               std::exp(-b.gamma_mu * tau) * b.da(x_s) * b.da(x_t);
    }
    return eta;
}

// Markov limit eta_bar(x, x') = sum 2 m_mu gamma_mu a'(x) a'(x').
inline double markov_kernel(const std::vector<ClassicalBathMode>& bath, double x,
                            double x_prime) {
    double eta = 0.0;
    for (const auto& b : bath)
        eta += 2.0 * b.m_mu * b.gamma_mu * b.da(x) * b.da(x_prime);
    return eta;
}

namespace detail {

// Counter-based gaussian stream: splitmix64 keyed by (seed, stream, counter),
// Box-Muller on top.  Bit-reproducible across platforms.
struct GaussianStream {
    std::uint64_t key;
    std::uint64_t counter{0};
    bool have_spare{false};
    double spare{0.0};

    GaussianStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        key = mix(z);
    }
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() {  // in (0,1]
        const std::uint64_t u = mix(key ^ mix(counter++));
        return (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
    }
    double normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925287 * u2;
        spare = r * std::sin(th);
        have_spare = true;
        return r * std::cos(th);
    }
};

}  // namespace detail

struct Trajectory {
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> noise_force;  // sum m w^2 (q - a(x)) a'(x) at sample times
};

struct TrajectoryEnsemble {
    std::uint64_t seed{0};
    double dt{0.0};
    std::vector<double> times;
    std::vector<Trajectory> trajectories;
};

struct LangevinOptions {
    int record_stride{1};
    bool clamp_system{false};  // hold x fixed (noise-correlation experiment)
};

// Coupled system+bath integration: velocity half-kicks and position
// half-drifts around an exact Ornstein-Uhlenbeck velocity update per mode.
inline TrajectoryEnsemble simulate_composite_langevin(
    const ClassicalSystemSpec& sys, const std::vector<ClassicalBathMode>& bath, double T,
    double dt, double t_end, int n_traj, std::uint64_t seed, Constants constants = {},
    LangevinOptions opt = {}) {
    constants.check();
    if (!(T >= 0.0)) throw std::invalid_argument("simulate_composite_langevin: T < 0");
    double scale_min = 1e300;
    for (const auto& b : bath)
        scale_min = std::min({scale_min, 1.0 / b.omega_mu, 1.0 / b.gamma_mu});
    if (!(dt > 0.0) || (!bath.empty() && dt > 0.05 * scale_min))
        throw std::invalid_argument("simulate_composite_langevin: dt too large for bath scales");
    const int n_steps = static_cast<int>(std::llround(t_end / dt));
    const int n_modes = static_cast<int>(bath.size());

    TrajectoryEnsemble ens;
    ens.seed = seed;
    ens.dt = dt;
    for (int k = 0; k <= n_steps; k += opt.record_stride)
        ens.times.push_back(k * dt);
    ens.trajectories.resize(n_traj);

    const double kT = constants.k_B * T;
    std::vector<double> ou_c(n_modes), ou_s(n_modes);
    for (int j = 0; j < n_modes; ++j) {
        ou_c[j] = std::exp(-2.0 * bath[j].gamma_mu * dt);
        ou_s[j] = std::sqrt(kT / bath[j].m_mu * (1.0 - ou_c[j] * ou_c[j]));
    }

    for (int tr = 0; tr < n_traj; ++tr) {
        std::vector<detail::GaussianStream> rng;
        rng.reserve(n_modes);
        for (int j = 0; j < n_modes; ++j)
            rng.emplace_back(seed, static_cast<std::uint64_t>(tr) * 65536ULL + j);

        double x = sys.x0, v = sys.v0;
        std::vector<double> q(n_modes), u(n_modes);
        for (int j = 0; j < n_modes; ++j) {
            q[j] = bath[j].q0;
            u[j] = bath[j].v0;
        }
        auto sys_accel = [&]() {
            double f = -sys.dU(x);
            for (int j = 0; j < n_modes; ++j)
                f += bath[j].m_mu * bath[j].omega_mu * bath[j].omega_mu *
                     (q[j] - bath[j].a(x)) * bath[j].da(x);
            return f / sys.m;
        };
        auto noise_force = [&]() {
            double f = 0.0;
            for (int j = 0; j < n_modes; ++j)
                f += bath[j].m_mu * bath[j].omega_mu * bath[j].omega_mu *
                     (q[j] - bath[j].a(x)) * bath[j].da(x);
            return f;
        };
        Trajectory& out = ens.trajectories[tr];
        auto record = [&]() {
            out.x.push_back(x);
            out.v.push_back(v);
            out.noise_force.push_back(noise_force());
        };
        record();
        for (int k = 1; k <= n_steps; ++k) {
            if (!opt.clamp_system) v += 0.5 * dt * sys_accel();
            for (int j = 0; j < n_modes; ++j)
                u[j] += 0.5 * dt * bath[j].omega_mu * bath[j].omega_mu *
                        (bath[j].a(x) - q[j]);
            if (!opt.clamp_system) x += 0.5 * dt * v;
            for (int j = 0; j < n_modes; ++j) q[j] += 0.5 * dt * u[j];
            for (int j = 0; j < n_modes; ++j)
                u[j] = ou_c[j] * u[j] + ou_s[j] * rng[j].normal();
            if (!opt.clamp_system) x += 0.5 * dt * v;
            for (int j = 0; j < n_modes; ++j) q[j] += 0.5 * dt * u[j];
            for (int j = 0; j < n_modes; ++j)
                u[j] += 0.5 * dt * bath[j].omega_mu * bath[j].omega_mu *
                        (bath[j].a(x) - q[j]);
            if (!opt.clamp_system) v += 0.5 * dt * sys_accel();
            if (k % opt.record_stride == 0) record();
        }
    }
    return ens;
}

// Markov-limit Langevin: friction eta_bar, noise <F F> = 2 kT eta_bar delta.
inline TrajectoryEnsemble markov_langevin(const ClassicalSystemSpec& sys, double eta_bar,
                                          double T, double dt, double t_end, int n_traj,
                                          std::uint64_t seed, Constants constants = {},
                                          LangevinOptions opt = {}) {
    constants.check();
    if (!(dt > 0.0) || !(eta_bar >= 0.0) || !(T >= 0.0))
        throw std::invalid_argument("markov_langevin: bad arguments");
    const int n_steps = static_cast<int>(std::llround(t_end / dt));
    TrajectoryEnsemble ens;
    ens.seed = seed;
    ens.dt = dt;
    for (int k = 0; k <= n_steps; k += opt.record_stride)
        ens.times.push_back(k * dt);
    ens.trajectories.resize(n_traj);

    const double kT = constants.k_B * T;
    const double c = std::exp(-eta_bar / sys.m * dt);
    const double s = (eta_bar > 0.0) ? std::sqrt(kT / sys.m * (1.0 - c * c)) : 0.0;
    for (int tr = 0; tr < n_traj; ++tr) {
        detail::GaussianStream rng(seed, static_cast<std::uint64_t>(tr) * 65536ULL + 65535ULL);
        double x = sys.x0, v = sys.v0;
        Trajectory& out = ens.trajectories[tr];
        auto record = [&]() {
            out.x.push_back(x);
            out.v.push_back(v);
        };
        record();
        for (int k = 1; k <= n_steps; ++k) {
            v += -0.5 * dt * sys.dU(x) / sys.m;
            x += 0.5 * dt * v;
            v = c * v + s * rng.normal();
            x += 0.5 * dt * v;
            v += -0.5 * dt * sys.dU(x) / sys.m;
            if (k % opt.record_stride == 0) record();
        }
    }
    return ens;
}

struct EnsembleStatistics {
    Estimate mean_x, mean_v, var_x, var_v;
    std::vector<double> lags;             // lag times
    std::vector<Estimate> force_corr;     // effective-noise correlation estimate
};

// Stationary estimators after discarding an initial transient; jackknife
// error bars over trajectories.
inline EnsembleStatistics ensemble_statistics(const TrajectoryEnsemble& ens,
                                              double discard_time, int max_lag = 0) {
    if (ens.trajectories.empty())
        throw std::invalid_argument("ensemble_statistics: empty ensemble");
    const double dt_rec = ens.times.size() > 1 ? ens.times[1] - ens.times[0] : ens.dt;
    std::size_t i0 = 0;
    while (i0 < ens.times.size() && ens.times[i0] < discard_time) ++i0;
    if (i0 + 2 > ens.times.size())
        throw std::invalid_argument("ensemble_statistics: discard window too long");

    std::vector<double> mx, mv, mxx, mvv;
    std::vector<std::vector<double>> corr(max_lag + 1);
    for (const auto& tr : ens.trajectories) {
        double sx = 0.0, sv = 0.0, sxx = 0.0, svv = 0.0;
        const std::size_t n = tr.x.size();
        for (std::size_t i = i0; i < n; ++i) {
            sx += tr.x[i];
            sv += tr.v[i];
            sxx += tr.x[i] * tr.x[i];
            svv += tr.v[i] * tr.v[i];
        }
        const double cnt = static_cast<double>(n - i0);
        mx.push_back(sx / cnt);
        mv.push_back(sv / cnt);
        mxx.push_back(sxx / cnt);
        mvv.push_back(svv / cnt);
        if (max_lag > 0) {
            std::vector<double> f(tr.noise_force.begin() + static_cast<long>(i0),
                                  tr.noise_force.end());
            const auto lp = lag_products(f, max_lag);
            for (int k = 0; k <= max_lag; ++k) corr[k].push_back(lp[k]);
        }
    }
    EnsembleStatistics st;
    st.mean_x = jackknife(mx);
    st.mean_v = jackknife(mv);
    st.var_x = jackknife_variance(mx, mxx);
    st.var_v = jackknife_variance(mv, mvv);
    for (int k = 0; k <= max_lag; ++k) {
        st.lags.push_back(k * dt_rec);
        if (max_lag > 0) st.force_corr.push_back(jackknife(corr[k]));
    }
    return st;
}

}  // namespace openbath
