// stats.hpp — small ensemble estimators: means, jackknife errors,
// time-averaged autocorrelations.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace openbath {

struct Estimate {
    double value{0.0};
    double error{0.0};  // jackknife standard error over trajectories
};

// Jackknife mean/error from per-trajectory averages.
inline Estimate jackknife(const std::vector<double>& per_traj) {
    const std::size_t n = per_traj.size();
    if (n == 0) throw std::invalid_argument("jackknife: empty sample");
    double sum = 0.0;
    for (double v : per_traj) sum += v;
    const double mean = sum / static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : per_traj) {
        const double leave_out = (sum - v) / static_cast<double>(n - 1);
        ss += (leave_out - mean) * (leave_out - mean);
    }
    return {mean, std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n))};
}

// Variance from per-trajectory first and second moments, jackknifed over
// trajectories.  Using the pooled mean avoids the windowing bias of
// per-trajectory mean subtraction when the correlation time is not small
// against the trajectory length.
inline Estimate jackknife_variance(const std::vector<double>& mean1,
                                   const std::vector<double>& mean2) {
    const std::size_t n = mean1.size();
    if (n == 0 || mean2.size() != n)
        throw std::invalid_argument("jackknife_variance: bad sample");
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s1 += mean1[i];
        s2 += mean2[i];
    }
    const double nn = static_cast<double>(n);
    const double full = s2 / nn - (s1 / nn) * (s1 / nn);
    if (n == 1) return {full, 0.0};
    double rbar = 0.0;
    std::vector<double> rep(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m1 = (s1 - mean1[i]) / (nn - 1.0);
        const double m2 = (s2 - mean2[i]) / (nn - 1.0);
        rep[i] = m2 - m1 * m1;
        rbar += rep[i];
    }
    rbar /= nn;
    double ss = 0.0;
    for (double r : rep) ss += (r - rbar) * (r - rbar);
    return {full, std::sqrt(ss * (nn - 1.0) / nn)};
}

// Time-averaged lag-k products of a single series, <f(t+k) f(t)>.
inline std::vector<double> lag_products(const std::vector<double>& f, int max_lag) {
    std::vector<double> out(max_lag + 1, 0.0);
    const int n = static_cast<int>(f.size());
    for (int k = 0; k <= max_lag; ++k) {
        if (n - k <= 0) throw std::invalid_argument("lag_products: series too short");
        double s = 0.0;
        for (int t = 0; t + k < n; ++t) s += f[t + k] * f[t];
        out[k] = s / static_cast<double>(n - k);
    }
    return out;
}

}  // namespace openbath
