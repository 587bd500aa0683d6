#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "levmir/params.hpp"

using namespace levmir;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("physical constants") {
    physical_constants pc;
    CHECK(pc.c == 3.0e8);
    CHECK_THAT(pc.hbar, WithinRel(6.62607015e-34 / (2.0 * std::numbers::pi), 1e-15));
    CHECK(physical_constants::codata().c == 2.99792458e8);
    CHECK(physical_constants::codata().hbar == pc.hbar);
}

TEST_CASE("laser_frequency") {
    const double c = 3.0e8;
    // 2 pi c / lambda at the reference wavelength, frozen from a 50-digit
    // evaluation: 1.79519580205131046...e15 rad/s.
    CHECK_THAT(laser_frequency(1050e-9, c), WithinRel(1.7951958020513105e15, 1e-14));

    // Doubling the wavelength halves the frequency exactly (power-of-two
    // scaling commutes with rounding).
    const double lam = 1050e-9;
    CHECK(laser_frequency(2.0 * lam, c) == laser_frequency(lam, c) / 2.0);

    CHECK_THROWS_AS(laser_frequency(0.0, c), std::domain_error);
    CHECK_THROWS_AS(laser_frequency(-1e-6, c), std::domain_error);
}

TEST_CASE("mode_index") {
    const double c = 3.0e8;
    const double Omega_L = laser_frequency(1050e-9, c);
    // round(2 * 0.05 / 1050e-9) = round(95238.095...)
    CHECK(mode_index(0.05, Omega_L, c) == 95238);

    // Exact resonance L = j lambda / 2 recovers j.
    const double lam = 1e-6;
    const long long j_exact = 1000;
    CHECK(mode_index(static_cast<double>(j_exact) * lam / 2.0, laser_frequency(lam, c), c) == j_exact);

    // Sub-half-wavelength cavity has no mode.
    CHECK_THROWS_AS(mode_index(1e-9, Omega_L, c), std::domain_error);
    CHECK_THROWS_AS(mode_index(0.0, Omega_L, c), std::domain_error);

    SECTION("monotone in L and Omega_L") {
        long long prev = 0;
        for (double L = 0.01; L < 0.10; L += 0.0007) {
            const long long j = mode_index(L, Omega_L, c);
            CHECK(j >= prev);
            prev = j;
        }
        prev = 0;
        for (double f = 0.5e15; f < 3e15; f += 0.31e14) {
            const long long j = mode_index(0.05, f, c);
            CHECK(j >= prev);
            prev = j;
        }
    }
}

TEST_CASE("input_photon_rate") {
    const double c = 3.0e8, g = 9.81, m = 1e-3;
    const double hbar = physical_constants{}.hbar;
    const double Omega_L = laser_frequency(1050e-9, c);

    // p_tilde = 1: the drive's photon momentum flux carries the weight,
    // N_in hbar Omega_L = m g c.
    const double N1 = input_photon_rate(1.0, m, g, c, Omega_L, hbar);
    CHECK_THAT(N1 * hbar * Omega_L, WithinRel(m * g * c, 1e-14));

    // Round trip through the inverse map.
    const double N = input_photon_rate(0.0017, m, g, c, Omega_L, hbar);
    CHECK_THAT(dimensionless_power(N, m, g, c, Omega_L, hbar), WithinRel(0.0017, 1e-14));

    // Frozen from a 50-digit evaluation at the reference point.
    CHECK_THAT(N, WithinRel(2.6427202857186775e22, 1e-10));

    // Linear in the mass (power-of-two factor is exact).
    CHECK(input_photon_rate(0.0017, 2.0 * m, g, c, Omega_L, hbar) == 2.0 * N);

    CHECK_THROWS_AS(input_photon_rate(-0.1, m, g, c, Omega_L, hbar), std::domain_error);
}

TEST_CASE("derive") {
    const auto p = system_params::reference();
    const auto d = derive(p);
    CHECK_THAT(d.Omega_L, WithinRel(1.7951958020513105e15, 1e-14));
    CHECK(d.j == 95238);
    CHECK_THAT(d.N_in, WithinRel(2.6427202857186775e22, 1e-10));
    CHECK_THAT(d.N_in_tilde, WithinRel(d.N_in / (p.m_ref * p.g), 1e-15));

    // Deterministic: a second evaluation is bit identical.
    const auto d2 = derive(p);
    CHECK(std::memcmp(&d, &d2, sizeof d) == 0);
}

TEST_CASE("validate") {
    auto p = system_params::reference();
    CHECK_NOTHROW(p.validate());

    SECTION("boundary values that remain legal") {
        p.Gamma = 0.0;  // undamped mirror is allowed
        CHECK_NOTHROW(p.validate());
        p = system_params::reference();
        p.p_tilde = 1.0;
        CHECK_NOTHROW(p.validate());
    }

    SECTION("each invariant violation throws") {
        auto expect_throw = [](system_params bad) {
            CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        };
        auto q = system_params::reference();
        q.L = 0.0;
        expect_throw(q);
        q = system_params::reference();
        q.lambda_L = 0.0;
        expect_throw(q);
        q = system_params::reference();
        q.lambda_L = q.L;  // wavelength must fit inside the cavity
        expect_throw(q);
        q = system_params::reference();
        q.kappa = 0.0;
        expect_throw(q);
        q = system_params::reference();
        q.Gamma = -1.0;
        expect_throw(q);
        q = system_params::reference();
        q.g = 0.0;
        expect_throw(q);
        q = system_params::reference();
        q.p_tilde = 0.0;
        expect_throw(q);
        q = system_params::reference();
        q.p_tilde = 1.1;
        expect_throw(q);
        q = system_params::reference();
        q.m_ref = 0.0;
        expect_throw(q);
        q = system_params::reference();
        q.L = std::numeric_limits<double>::infinity();
        expect_throw(q);
    }
}

TEST_CASE("validate_regime") {
    const auto p = system_params::reference();

    SECTION("reference point passes with r1 ~ 7.5e-9") {
        const auto r = validate_regime(p, -9.6e6, 5e-8);
        CHECK_THAT(r.r1, WithinRel(p.kappa / 1.7951958020513105e15, 1e-12));
        CHECK(r.r1 > 1e-9);
        CHECK(r.r1 < 1e-8);
        CHECK(r.r1_ok);
        CHECK(r.r2_ok);
        CHECK(r.ok());
    }

    SECTION("zero detuning gives r2 = 0") {
        const auto r = validate_regime(p, 0.0, 0.0);
        CHECK(r.r2 == 0.0);
        CHECK(r.r2_ok);
    }

    SECTION("kappa = Omega_L fails r1") {
        auto q = p;
        q.kappa = laser_frequency(q.lambda_L, q.consts.c);
        const auto r = validate_regime(q, -9.6e6, 5e-8);
        CHECK_THAT(r.r1, WithinAbs(1.0, 1e-12));
        CHECK_FALSE(r.r1_ok);
        CHECK_FALSE(r.ok());
    }
}
