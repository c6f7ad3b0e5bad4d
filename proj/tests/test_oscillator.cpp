// test_oscillator.cpp — parameter families, moment flows, correlations.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "openbath/oscillator.hpp"

using namespace openbath;

namespace {

// Random valid parameter draw: Gibbs-style base plus a D_pq perturbation that
// keeps the determinant constraint satisfied.
OscillatorParams random_valid(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    OscillatorParams p;
    p.m = 0.3 + 2.0 * u(rng);
    p.omega = 0.3 + 2.0 * u(rng);
    p.lambda = p.omega * (0.01 + 0.6 * u(rng));
    p.mu = p.lambda * 0.9 * (u(rng) - 0.5);
    const double coth = 1.0 + 3.0 * u(rng);
    const double hbar = 1.0;
    p.D_pp = 0.5 * (p.lambda + p.mu) * hbar * p.m * p.omega * coth;
    p.D_qq = 0.5 * (p.lambda - p.mu) * hbar / (p.m * p.omega) * coth;
    // add D_pq while keeping determinant slack positive
    const double slack = p.D_qq * p.D_pp - 0.25 * p.lambda * p.lambda * hbar * hbar;
    if (slack > 0.0) p.D_pq = (u(rng) - 0.5) * std::sqrt(slack);
    if (!validate_params(p).valid()) return random_valid(rng);
    return p;
}

}  // namespace

TEST_CASE("validate_params reports exactly the violated constraints") {
    OscillatorParams p = gibbs_params(1.0, 1.0, 0.1, 0.0, 1.0);
    CHECK(validate_params(p).valid());

    SECTION("determinant boundary") {
        OscillatorParams q = p;
        // scale D so the determinant lands at 0.99 of the bound
        const double det = q.D_qq * q.D_pp;
        const double target = 0.99 * 0.25 * q.lambda * q.lambda;
        const double s = std::sqrt(target / det);
        q.D_qq *= s;
        q.D_pp *= s;
        const auto r = validate_params(q);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0] == "determinant");
    }
    SECTION("mu = omega reports underdamping") {
        OscillatorParams q = p;
        q.mu = q.omega;
        const auto r = validate_params(q);
        CHECK(std::find(r.violations.begin(), r.violations.end(), "underdamping") !=
              r.violations.end());
    }
    SECTION("nonpositive diffusion") {
        OscillatorParams q = p;
        q.D_pp = 0.0;
        const auto r = validate_params(q);
        CHECK(std::find(r.violations.begin(), r.violations.end(), "D_pp>0") !=
              r.violations.end());
    }
}

TEST_CASE("gibbs_params family") {
    SECTION("classical limit: friction-noise balance D_pp -> lambda m kT") {
        const double T = 1e6;
        const auto p = gibbs_params(1.0, 1.0, 0.1, 0.0, T);
        CHECK(p.D_pp / T == Catch::Approx(0.1 * 1.0).epsilon(1e-6));
    }
    SECTION("mu = 0 closed forms") {
        const auto p = gibbs_params(2.0, 1.5, 0.2, 0.0, 0.7);
        const double coth = 1.0 / std::tanh(1.5 / (2.0 * 0.7));
        CHECK(p.D_pp == Catch::Approx(0.5 * 0.2 * 2.0 * 1.5 * coth).epsilon(1e-14));
        CHECK(p.D_qq == Catch::Approx(p.D_pp / (2.0 * 1.5) / (2.0 * 1.5)).epsilon(1e-14));
        CHECK(p.D_pq == 0.0);
    }
    SECTION("valid across a T, lambda grid (mu = 0)") {
        for (double T : {0.05, 0.3, 1.0, 10.0})
            for (double lam : {0.01, 0.1, 0.5})
                CHECK(validate_params(gibbs_params(1.0, 1.0, lam, 0.0, T)).valid());
    }
    SECTION("mu > 0 at low T can violate the determinant bound (reported, not hidden)") {
        const auto p = gibbs_params(1.0, 1.0, 0.1, 0.05, 0.05);
        const auto r = validate_params(p);
        CHECK_FALSE(r.valid());
    }
    SECTION("rejects lambda <= mu") {
        CHECK_THROWS_AS(gibbs_params(1.0, 1.0, 0.1, 0.1, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(gibbs_params(1.0, 1.0, 0.1, 0.0, -1.0), std::invalid_argument);
    }
}

TEST_CASE("persistent_pure_params saturates the determinant bound") {
    const auto p = persistent_pure_params(1.3, 0.9, 0.25, 0.1);
    CHECK(p.D_qq == Catch::Approx(0.25 / (2.0 * 1.3 * p.Omega())).epsilon(1e-14));
    const double det = p.D_qq * p.D_pp - p.D_pq * p.D_pq;
    CHECK(det == Catch::Approx(0.25 * p.lambda * p.lambda).epsilon(1e-12));
    CHECK(validate_params(p).valid());

    const auto p0 = persistent_pure_params(1.0, 1.0, 0.3, 0.0);
    CHECK(p0.D_pq == 0.0);
    CHECK(p0.D_qq == Catch::Approx(0.3 / 2.0).epsilon(1e-14));
}

TEST_CASE("asymptotic_moments closed forms") {
    SECTION("Gibbs params give thermal moments, any mu") {
        for (double mu_frac : {0.0, 0.5}) {
            const double lam = 0.2, om = 1.3, m = 0.8, T = 1.5;
            const auto p = gibbs_params(m, om, lam, mu_frac * lam, T);
            const auto ms = asymptotic_moments(p);
            const double coth = 1.0 / std::tanh(om / (2.0 * T));
            CHECK(ms.pp == Catch::Approx(0.5 * m * om * coth).epsilon(1e-12));
            CHECK(ms.qq == Catch::Approx(0.5 / (m * om) * coth).epsilon(1e-12));
            CHECK(std::abs(ms.s_pq) < 1e-14);
        }
    }
    SECTION("uncertainty bound over random valid params") {
        std::mt19937_64 rng(1234);
        for (int i = 0; i < 1000; ++i) {
            const auto p = random_valid(rng);
            const auto ms = asymptotic_moments(p);
            CHECK(ms.satisfies_uncertainty(1.0, 1e-10));
        }
    }
    SECTION("invalid params rejected") {
        OscillatorParams p;  // default has D = 0
        CHECK_THROWS_AS(asymptotic_moments(p), std::invalid_argument);
    }
}

TEST_CASE("evolve_moments") {
    const auto p = gibbs_params(1.0, 1.0, 0.15, 0.05, 0.8);
    MomentState m0;
    m0.mean_q = 1.0;
    m0.mean_p = -0.5;
    m0.qq = 1.0;
    m0.pp = 0.6;
    m0.s_pq = 0.1;

    SECTION("t = 0 is the identity") {
        const auto m1 = evolve_moments(p, m0, 0.0);
        CHECK(m1.mean_q == Catch::Approx(m0.mean_q));
        CHECK(m1.qq == Catch::Approx(m0.qq));
    }
    SECTION("closed system rotates moments, conserving the energy combination") {
        OscillatorParams c;  // lambda = mu = D = 0, m = omega = 1
        c.lambda = 0.0;
        const double e0 = m0.pp + m0.qq;
        for (double t : {0.3, 1.7, 6.0}) {
            const auto m1 = evolve_moments(c, m0, t);
            CHECK(m1.pp + m1.qq == Catch::Approx(e0).epsilon(1e-10));
        }
    }
    SECTION("long-time limit equals asymptotic_moments") {
        const auto m1 = evolve_moments(p, m0, 40.0 / (p.lambda - p.mu));
        const auto ms = asymptotic_moments(p);
        CHECK(std::abs(m1.qq - ms.qq) < 1e-10);
        CHECK(std::abs(m1.pp - ms.pp) < 1e-10);
        CHECK(std::abs(m1.s_pq - ms.s_pq) < 1e-10);
        CHECK(std::abs(m1.mean_q) < 1e-10);
    }
    SECTION("semigroup property") {
        const auto a = evolve_moments(p, evolve_moments(p, m0, 0.7), 1.9);
        const auto b = evolve_moments(p, m0, 2.6);
        CHECK(a.qq == Catch::Approx(b.qq).margin(1e-9));
        CHECK(a.pp == Catch::Approx(b.pp).margin(1e-9));
        CHECK(a.s_pq == Catch::Approx(b.s_pq).margin(1e-9));
        CHECK(a.mean_p == Catch::Approx(b.mean_p).margin(1e-9));
    }
    SECTION("negative time rejected") {
        CHECK_THROWS_AS(evolve_moments(p, m0, -1.0), std::invalid_argument);
    }
}

TEST_CASE("heisenberg_q_coefficients") {
    const auto p = gibbs_params(1.2, 0.9, 0.2, 0.08, 1.0);
    SECTION("t = 0") {
        const auto c = heisenberg_q_coefficients(p, 0.0);
        CHECK(c.c_q == Catch::Approx(1.0));
        CHECK(c.c_p == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("decay at large t") {
        const auto c = heisenberg_q_coefficients(p, 200.0);
        CHECK(std::abs(c.c_q) < 1e-12);
        CHECK(std::abs(c.c_p) < 1e-12);
    }
    SECTION("matches the first-moment flow with mean_p = 0") {
        // <q(t)> from the moment ODE with (q0, p0) = (1, 0) equals c_q(t).
        MomentState m0;
        m0.mean_q = 1.0;
        m0.qq = m0.pp = 1.0;  // irrelevant
        for (double t : {0.5, 2.0, 7.0}) {
            const auto c = heisenberg_q_coefficients(p, t);
            // The Heisenberg coefficients evolve with the transposed-in-time
            // first-moment matrix; check via the two-point flows.
            MomentState mq = m0;
            const auto m1 = evolve_moments(p, mq, t);
            MomentState mp;
            mp.mean_p = 1.0;
            mp.qq = mp.pp = 1.0;
            const auto m2 = evolve_moments(p, mp, t);
            // <q(t)q + p(t)p duality>: Tr[q rho(t)] = Tr[q_H(t) rho]
            // q_H(t) = c_q q + c_p p pairs with the first column of the flow.
            CHECK(c.c_q == Catch::Approx(m1.mean_q).margin(1e-10));
            CHECK(c.c_p == Catch::Approx(m2.mean_q).margin(1e-10));
        }
    }
}

TEST_CASE("bath_correlation") {
    const auto p = gibbs_params(1.1, 1.4, 0.3, 0.1, 0.9);
    const auto ms = asymptotic_moments(p);
    SECTION("t = 0 gives <q^2>_inf") {
        const auto c = bath_correlation(p, 0.0);
        CHECK(c.real() == Catch::Approx(ms.qq).epsilon(1e-14));
        CHECK(c.imag() == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("imaginary part at quarter period is state-independent") {
        const double Om = p.Omega();
        const double t = M_PI / (2.0 * Om);
        const auto c = bath_correlation(p, t);
        CHECK(c.imag() ==
              Catch::Approx(-std::exp(-p.lambda * t) / (2.0 * p.m * Om)).epsilon(1e-12));
    }
    SECTION("imaginary part independent of diffusion coefficients") {
        std::mt19937_64 rng(77);
        const auto q = random_valid(rng);
        OscillatorParams q2 = q;
        q2.D_pp *= 2.3;
        q2.D_qq *= 2.3;
        q2.D_pq = 0.0;
        for (double t : {0.2, 1.0, 4.0}) {
            CHECK(bath_correlation(q, t).imag() ==
                  Catch::Approx(bath_correlation(q2, t).imag()).margin(1e-13));
        }
    }
    SECTION("envelope bound and decay") {
        std::mt19937_64 rng(99);
        for (int i = 0; i < 200; ++i) {
            const auto q = random_valid(rng);
            const double C = bath_correlation_envelope(q);
            std::uniform_real_distribution<double> ut(0.0, 30.0 / q.lambda);
            const double t = ut(rng);
            CHECK(std::abs(bath_correlation(q, t)) <= C * std::exp(-q.lambda * t) + 1e-14);
        }
    }
    SECTION("negative time rejected") {
        CHECK_THROWS_AS(bath_correlation(p, -0.1), std::invalid_argument);
    }
}
