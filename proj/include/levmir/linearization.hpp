#pragma once

// Linearized quantum dynamics around a semiclassical branch.
//
// Fluctuation operators b (mechanics) and a (cavity field) obey
//   d/dt (b, b+, a, a+)^T = A (b, b+, a, a+)^T + inputs,
// with the drift matrix
//       [ -G/2 - i W_M      0          -i g_C      -i g_C  ]
//   A = [      0       -G/2 + i W_M   +i g_C      +i g_C  ]
//       [   -i g_C        -i g_C    -k/2 - i D       0    ]
//       [   +i g_C        +i g_C         0      -k/2 + i D]
// (G = Gamma, W_M = Omega_M, k = kappa, D = Delta).  The branch is stable
// when every eigenvalue of A has a non-positive real part.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "levmir/errors.hpp"
#include "levmir/params.hpp"
#include "levmir/steady_state.hpp"

namespace levmir {

// Effective mechanical frequency of the optical trap:
//   Omega_M = sqrt(2 hbar Omega_c^3 N_c / (m (j pi c)^2)).
// At force balance this reduces to sqrt(2 Omega_c g / (j pi c)), which the
// tests use as an independent check.
inline double mechanical_frequency(const steady_state_branch& b, const system_params& p) {
    if (!(b.N_c > 0.0)) throw std::domain_error("mechanical_frequency: N_c must be positive");
    const auto k = detail::make_context(p);
    const long double jpc = static_cast<long double>(k.j) * k.pi * k.c;
    const long double Oc = b.Omega_c;
    return static_cast<double>(std::sqrt(2.0L * k.hbar * Oc * Oc * Oc * static_cast<long double>(b.N_c) / (k.m * jpc * jpc)));
}

// Field-enhanced optomechanical coupling:
//   g_C = (dOmega_c/dq) x_zpf alpha = Omega_c/(L - q) sqrt(hbar/(2 m Omega_M)) alpha.
// alpha = 0 gives g_C = 0 without touching the Omega_M > 0 precondition.
inline double coupling_strength(const steady_state_branch& b, const system_params& p) {
    if (b.N_c == 0.0) return 0.0;
    const double Omega_M = mechanical_frequency(b, p);
    const auto k = detail::make_context(p);
    const long double dOc_dq = static_cast<long double>(b.Omega_c) / (k.L - static_cast<long double>(b.q));
    const long double x_zpf = std::sqrt(k.hbar / (2.0L * k.m * static_cast<long double>(Omega_M)));
    return static_cast<double>(dOc_dq * x_zpf * static_cast<long double>(b.alpha));
}

inline Eigen::Matrix4cd drift_matrix(double Omega_M, double g_C, double Delta,
                                     double kappa, double Gamma) {
    const std::complex<double> i(0.0, 1.0);
    Eigen::Matrix4cd A;
    A << -Gamma / 2.0 - i * Omega_M, 0.0, -i * g_C, -i * g_C,
         0.0, -Gamma / 2.0 + i * Omega_M, i * g_C, i * g_C,
         -i * g_C, -i * g_C, -kappa / 2.0 - i * Delta, 0.0,
         i * g_C, i * g_C, 0.0, -kappa / 2.0 + i * Delta;
    return A;
}

struct linearized_model {
    double Omega_M;
    double g_C;
    double Delta;
    double kappa;
    double Gamma;
    Eigen::Matrix4cd A;
};

inline linearized_model linearize(const steady_state_branch& b, const system_params& p) {
    linearized_model m;
    m.Omega_M = mechanical_frequency(b, p);
    m.g_C = coupling_strength(b, p);
    m.Delta = b.Delta;
    m.kappa = p.kappa;
    m.Gamma = p.Gamma;
    m.A = drift_matrix(m.Omega_M, m.g_C, m.Delta, m.kappa, m.Gamma);
    return m;
}

struct stability_verdict {
    bool stable;
    double max_real_part;
    std::array<std::complex<double>, 4> eigenvalues;  // sorted by (Re, Im)
};

// Eigenvalue test with a small relative slack so that marginal modes at
// numerical zero (e.g. Gamma = 0 exactly) are not misclassified by rounding.
inline stability_verdict stability(const Eigen::Matrix4cd& A, double slack_scale = 1e-9) {
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw numerical_error("stability: eigensolver failed to converge");
    }
    stability_verdict v;
    for (int n = 0; n < 4; ++n) v.eigenvalues[n] = es.eigenvalues()(n);
    std::sort(v.eigenvalues.begin(), v.eigenvalues.end(),
              [](const std::complex<double>& x, const std::complex<double>& y) {
                  if (x.real() != y.real()) return x.real() < y.real();
                  return x.imag() < y.imag();
              });
    v.max_real_part = v.eigenvalues[3].real();
    const double norm_inf = A.cwiseAbs().rowwise().sum().maxCoeff();
    v.stable = v.max_real_part <= slack_scale * norm_inf;
    return v;
}

inline stability_verdict stability(const linearized_model& m, double slack_scale = 1e-9) {
    return stability(m.A, slack_scale);
}

// Stability classification over a (kappa, Gamma) grid at fixed drive power.
// Cells where the drive is below threshold are reported as
// no_steady_state, distinct from dynamically unstable; solver breakdowns
// become numerical_error instead of aborting the map.
enum class cell_status { ok, no_steady_state, numerical_error };

inline const char* to_string(cell_status s) {
    switch (s) {
        case cell_status::ok: return "ok";
        case cell_status::no_steady_state: return "no_steady_state";
        default: return "numerical_error";
    }
}

struct map_cell {
    double kappa;
    double Gamma;
    cell_status status;
    bool stable;           // meaningful only when status == ok
    double max_real_part;  // NaN unless status == ok
};

// Row-major over the grid: outer loop kappa, inner loop Gamma.
inline std::vector<map_cell> stability_map(const system_params& base,
                                           const std::vector<double>& kappas,
                                           const std::vector<double>& Gammas,
                                           branch_label which = branch_label::blue) {
    std::vector<map_cell> cells;
    cells.reserve(kappas.size() * Gammas.size());
    for (double kap : kappas) {
        for (double Gam : Gammas) {
            map_cell cell;
            cell.kappa = kap;
            cell.Gamma = Gam;
            cell.stable = false;
            cell.max_real_part = std::numeric_limits<double>::quiet_NaN();
            try {
                system_params p = base;
                p.kappa = kap;
                p.Gamma = Gam;
                const auto branches = solve_branches(p);
                const auto& b = which == branch_label::blue ? branches.blue : branches.red;
                const auto verdict = stability(linearize(b, p));
                cell.status = cell_status::ok;
                cell.stable = verdict.stable;
                cell.max_real_part = verdict.max_real_part;
            } catch (const no_real_steady_state&) {
                cell.status = cell_status::no_steady_state;
            } catch (const std::exception&) {
                cell.status = cell_status::numerical_error;
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

} // namespace levmir
