#pragma once

// System parameters and the handful of scalars derived directly from them.
//
// Conventions used throughout the library:
//   - SI units everywhere (m, s, kg, rad/s); photon numbers and the drive
//     power p_tilde are dimensionless.
//   - q is the downward sag of the levitated mirror, so the cavity length
//     is L - q and the mode frequency is Omega_c(q) = j*pi*c/(L - q).
//   - Detuning Delta = Omega_c - Omega_L.  Delta < 0 is the "blue" branch
//     (laser above the mode), Delta > 0 the "red" one.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "levmir/errors.hpp"

namespace levmir {

struct physical_constants {
    // hbar = h / (2 pi) with the exact SI value of h.
    double hbar = 6.62607015e-34 / (2.0 * std::numbers::pi);
    // Speed of light.  The rounded 3e8 is what the rest of the reference
    // operating point was tuned against; use codata() when the exact
    // value matters.
    double c = 3.0e8;

    static physical_constants codata() {
        physical_constants pc;
        pc.c = 2.99792458e8;
        return pc;
    }
};

struct system_params {
    double L;               // resting cavity length [m]
    double lambda_L;        // laser wavelength [m]
    double kappa;           // cavity amplitude decay rate *2 (energy decay) [rad/s]
    double Gamma;           // mechanical damping rate [rad/s]
    double g = 9.81;         // gravitational acceleration [m/s^2]
    double p_tilde;         // dimensionless drive power, in (0, 1]
    double m_ref = 1.0e-3;  // mirror mass [kg]; cancels from all reported quantities
    physical_constants consts{};

    // Throws std::invalid_argument on the first violated invariant.
    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("system_params: " + msg); };
        if (!(L > 0.0) || !std::isfinite(L)) fail("L must be positive and finite");
        if (!(lambda_L > 0.0) || !std::isfinite(lambda_L)) fail("lambda_L must be positive and finite");
        if (!(lambda_L < L)) fail("lambda_L must be smaller than L");
        if (!(kappa > 0.0) || !std::isfinite(kappa)) fail("kappa must be positive and finite");
        if (!(Gamma >= 0.0) || !std::isfinite(Gamma)) fail("Gamma must be non-negative and finite");
        if (!(g > 0.0) || !std::isfinite(g)) fail("g must be positive and finite");
        if (!(p_tilde > 0.0 && p_tilde <= 1.0)) fail("p_tilde must lie in (0, 1]");
        if (!(m_ref > 0.0) || !std::isfinite(m_ref)) fail("m_ref must be positive and finite");
        if (!(consts.hbar > 0.0) || !(consts.c > 0.0)) fail("physical constants must be positive");
    }

    // Reference operating point of the levitation scheme: 5 cm cavity,
    // 1050 nm laser, kappa = 1.35e7, Gamma = 1e4, p_tilde = 0.0017.
    static system_params reference() {
        system_params p;
        p.L = 0.05;
        p.lambda_L = 1050e-9;
        p.kappa = 1.35e7;
        p.Gamma = 1.0e4;
        p.g = 9.81;
        p.p_tilde = 0.0017;
        p.m_ref = 1.0e-3;
        return p;
    }
};

// Laser angular frequency Omega_L = 2 pi c / lambda.
inline double laser_frequency(double lambda_L, double c) {
    if (!(lambda_L > 0.0)) throw std::domain_error("laser_frequency: lambda_L must be positive");
    return 2.0 * std::numbers::pi * c / lambda_L;
}

// Longitudinal mode index nearest to resonance with the laser at q = 0,
// i.e. j = round(Omega_L * L / (pi c)), halves rounding away from zero.
inline long long mode_index(double L, double Omega_L, double c) {
    if (!(L > 0.0)) throw std::domain_error("mode_index: L must be positive");
    const long long j = std::llround(Omega_L * L / (std::numbers::pi * c));
    if (j < 1) throw std::domain_error("mode_index: rounded index is below 1 (cavity shorter than half a wavelength)");
    return j;
}

// Input photon rate corresponding to the dimensionless power p_tilde:
//   N_in = p_tilde * m g c / (hbar Omega_L).
// p_tilde = 1 is the rate at which the full photon momentum flux of the
// drive would support the weight m g on its own.
inline double input_photon_rate(double p_tilde, double m, double g, double c,
                                double Omega_L, double hbar) {
    if (!(p_tilde >= 0.0)) throw std::domain_error("input_photon_rate: p_tilde must be non-negative");
    return p_tilde * m * g * c / (hbar * Omega_L);
}

// Inverse of input_photon_rate.
inline double dimensionless_power(double N_in, double m, double g, double c,
                                  double Omega_L, double hbar) {
    return N_in * hbar * Omega_L / (m * g * c);
}

struct derived_scalars {
    double Omega_L;     // laser angular frequency [rad/s]
    long long j;        // longitudinal mode index
    double N_in;        // input photon rate [1/s]
    double N_in_tilde;  // N_in / (m_ref g): mass-free photon rate per unit weight
};

inline derived_scalars derive(const system_params& p) {
    p.validate();
    derived_scalars d;
    d.Omega_L = laser_frequency(p.lambda_L, p.consts.c);
    d.j = mode_index(p.L, d.Omega_L, p.consts.c);
    d.N_in = input_photon_rate(p.p_tilde, p.m_ref, p.g, p.consts.c, d.Omega_L, p.consts.hbar);
    d.N_in_tilde = d.N_in / (p.m_ref * p.g);
    return d;
}

// Small-parameter checks behind the single-mode, adiabatic-coupling model:
//   r1 = kappa / Omega_L        (resolved mode: linewidth << optical frequency)
//   r2 = |Delta| (L - q) / (pi c)  (detuning small vs. free spectral range)
// Both should be well below ~1e-3 for the model to be trustworthy.
struct regime_report {
    double r1;
    double r2;
    bool r1_ok;
    bool r2_ok;
    bool ok() const { return r1_ok && r2_ok; }
};

inline regime_report validate_regime(const system_params& p, double Delta, double q,
                                     double r1_threshold = 1e-3, double r2_threshold = 1e-3) {
    const double Omega_L = laser_frequency(p.lambda_L, p.consts.c);
    regime_report r;
    r.r1 = p.kappa / Omega_L;
    r.r2 = std::abs(Delta) * (p.L - q) / (std::numbers::pi * p.consts.c);
    r.r1_ok = r.r1 < r1_threshold;
    r.r2_ok = r.r2 < r2_threshold;
    return r;
}

} // namespace levmir
