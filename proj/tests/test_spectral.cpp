// test_spectral.cpp — closed-form h/S vs the quadrature oracle, positivity,
// parity decomposition.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "openbath/spectral.hpp"

using namespace openbath;

namespace {

OscillatorParams random_valid(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    OscillatorParams p;
    p.m = 0.3 + 2.0 * u(rng);
    p.omega = 0.3 + 2.0 * u(rng);
    p.lambda = p.omega * (0.01 + 0.6 * u(rng));
    p.mu = p.lambda * 0.9 * (u(rng) - 0.5);
    const double coth = 1.0 + 3.0 * u(rng);
    p.D_pp = 0.5 * (p.lambda + p.mu) * p.m * p.omega * coth;
    p.D_qq = 0.5 * (p.lambda - p.mu) / (p.m * p.omega) * coth;
    const double slack = p.D_qq * p.D_pp - 0.25 * p.lambda * p.lambda;
    if (slack > 0.0) p.D_pq = (u(rng) - 0.5) * std::sqrt(slack);
    if (!validate_params(p).valid()) return random_valid(rng);
    return p;
}

OscillatorParams grid_params(double lam_frac, double mu_frac, bool thermal) {
    const double m = 1.0, om = 1.0, lam = lam_frac * om, mu = mu_frac * lam;
    if (thermal) return gibbs_params(m, om, lam, mu, 1.0);
    // non-thermal: scale the Gibbs diffusion asymmetrically and add D_pq
    OscillatorParams p = gibbs_params(m, om, lam, mu, 2.0);
    p.D_pp *= 1.7;
    p.D_qq *= 0.9;
    const double slack = p.D_qq * p.D_pp - 0.25 * lam * lam;
    p.D_pq = 0.5 * std::sqrt(slack);
    return p;
}

}  // namespace

TEST_CASE("closed form matches the quadrature oracle on the acceptance grid") {
    for (double lam_frac : {0.01, 0.1, 0.5}) {
        for (double mu_frac : {0.0, 0.5}) {
            for (bool thermal : {true, false}) {
                const auto p = grid_params(lam_frac, mu_frac, thermal);
                if (!validate_params(p).valid()) continue;
                const double scale = bath_correlation_envelope(p) / p.lambda;
                for (double dw = -3.0; dw <= 3.0 + 1e-9; dw += 0.5) {
                    const auto cf = spectral_pair_closed(p, dw * p.omega);
                    const auto qd = spectral_pair_quadrature(p, dw * p.omega, 1e-9);
                    CHECK(std::abs(cf.h - qd.pair.h) <= 1e-6 * scale);
                    CHECK(std::abs(cf.S - qd.pair.S) <= 1e-6 * scale);
                }
            }
        }
    }
}

TEST_CASE("quadrature basics") {
    const auto p = gibbs_params(1.0, 1.0, 0.2, 0.0, 1.0);
    SECTION("dw = 0, Gibbs, mu = 0: h(0) matches to 1e-8 relative") {
        const auto cf = spectral_pair_closed(p, 0.0);
        const auto qd = spectral_pair_quadrature(p, 0.0, 1e-9);
        CHECK(qd.pair.h == Catch::Approx(cf.h).epsilon(1e-8));
    }
    SECTION("truncation bound is documented and tiny") {
        const auto qd = spectral_pair_quadrature(p, 1.0);
        CHECK(qd.t_max == Catch::Approx(40.0 / p.lambda));
        CHECK(qd.truncation_bound < 1e-15);
    }
    SECTION("tolerance domain enforced") {
        CHECK_THROWS_AS(spectral_pair_quadrature(p, 0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(spectral_pair_quadrature(p, 0.0, 1e-3), std::invalid_argument);
    }
    SECTION("invalid params rejected") {
        OscillatorParams bad;
        CHECK_THROWS_AS(spectral_pair_quadrature(bad, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(spectral_pair_closed(bad, 0.0), std::invalid_argument);
    }
}

TEST_CASE("h positivity over random valid parameters") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_valid(rng);
        for (int k = -10; k <= 10; ++k) {
            const auto sp = spectral_pair_closed(p, k * p.omega);
            CHECK(sp.h >= -1e-12);
        }
    }
}

TEST_CASE("h parity decomposition") {
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_valid(rng);
        std::uniform_real_distribution<double> ud(0.1, 3.0);
        const double dw = ud(rng) * p.omega;
        const auto hp = spectral_pair_closed(p, dw);
        const auto hm = spectral_pair_closed(p, -dw);
        // odd part: -2 lambda hbar dw / (m * denominator); h(-w) > h(+w) for w > 0
        const double Om = p.Omega();
        const double den = (p.lambda * p.lambda + (Om + dw) * (Om + dw)) *
                           (p.lambda * p.lambda + (Om - dw) * (Om - dw));
        const double odd_expected = -2.0 * p.lambda * dw / (p.m * den);
        CHECK(hp.h - hm.h == Catch::Approx(odd_expected).margin(1e-12 + 1e-9 * std::abs(odd_expected)));
        CHECK(hm.h > hp.h);

        // even part is independent of the odd numerator term: compare with a
        // diffusion-identical copy evaluated at both signs (already implied),
        // and check evenness of h+h against direct symmetric evaluation.
        const double even = 0.5 * (hp.h + hm.h);
        OscillatorParams p2 = p;  // even part must be unchanged under dw -> -dw
        const auto hp2 = spectral_pair_closed(p2, -dw);
        const auto hm2 = spectral_pair_closed(p2, dw);
        CHECK(0.5 * (hp2.h + hm2.h) == Catch::Approx(even).epsilon(1e-12));
    }
}

TEST_CASE("S is odd-in-structure consistency: complex route agreement") {
    // h + iS must equal (A z + A mu + B Omega)/(z^2 + Omega^2) with
    // z = lambda + i dw, A = <q^2>_inf, B = (2<S_pq>_inf - i hbar)/(2 m Omega),
    // which is the correlation integral evaluated analytically.
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_valid(rng);
        std::uniform_real_distribution<double> ud(-4.0, 4.0);
        const double dw = ud(rng) * p.omega;
        const auto ms = asymptotic_moments(p);
        const double Om = p.Omega();
        const std::complex<double> z(p.lambda, dw);
        const std::complex<double> A(ms.qq, 0.0);
        const std::complex<double> B =
            std::complex<double>(2.0 * ms.s_pq, -1.0) / (2.0 * p.m * Om);
        const std::complex<double> ref = (A * z + A * p.mu + B * Om) / (z * z + Om * Om);
        const auto sp = spectral_pair_closed(p, dw);
        CHECK(sp.h == Catch::Approx(ref.real()).margin(1e-12 + 1e-10 * std::abs(ref.real())));
        CHECK(sp.S == Catch::Approx(ref.imag()).margin(1e-12 + 1e-10 * std::abs(ref.imag())));
    }
}
