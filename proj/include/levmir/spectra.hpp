#pragma once

// Frequency-space solution of the linearized dynamics.
//
// The drift equation is solved by v(w) = T(w) v_in-terms with
// T(w) = (-i w I - A)^{-1}.  Input-output relations (o_out = o_in - sqrt(rate) o)
// then give each output operator as a linear combination of the vacuum
// inputs; the eight coefficient functions are
//   B^+-_{a_out}(w) = -(T31 +- T41) sqrt(kappa Gamma)
//   A^+-_{a_out}(w) = -[kappa (T33 +- T43) - 1]
//   B^+-_{b_out}(w) = -[Gamma (T11 +- T21) - 1]
//   A^+-_{b_out}(w) = -sqrt(kappa Gamma) (T13 +- T23)
// (1-based matrix indices).  Columns 2 and 4 of T reproduce the same
// functions through conjugated "starred" identities; those are evaluated
// as a transcription cross-check and never used as primary values.
//
// Everything here is templated on the real scalar.  The default is long
// double: covariance entries downstream reach ~1e8 while purity and
// entropy identities are needed at 1e-6 absolute, which double precision
// cannot deliver near the optomechanical resonance.

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "levmir/errors.hpp"

namespace levmir {

template <typename Real = long double>
struct transfer_data {
    using cmat = Eigen::Matrix<std::complex<Real>, 4, 4>;
    Real omega;
    cmat T_plus;         // T(+omega)
    cmat T_minus;        // T(-omega)
    Real residual_plus;  // ||M T - I||_inf / (||M||_inf ||T||_inf), backward-stable certificate
    Real residual_minus;
    Real cond_plus;      // ||M||_inf ||T||_inf condition estimate
    Real cond_minus;
};

namespace detail {

template <typename Real>
Real inf_norm(const Eigen::Matrix<std::complex<Real>, 4, 4>& m) {
    Real best = 0;
    for (int r = 0; r < 4; ++r) {
        Real s = 0;
        for (int c = 0; c < 4; ++c) s += std::abs(m(r, c));
        best = std::max(best, s);
    }
    return best;
}

// One-sided solve for T(nu) = (-i nu I - A)^{-1} with certificate.
template <typename Real>
void solve_resolvent(const Eigen::Matrix<std::complex<Real>, 4, 4>& A, Real nu,
                     Real omega_for_msg,
                     Eigen::Matrix<std::complex<Real>, 4, 4>& T,
                     Real& residual, Real& cond) {
    using cmat = Eigen::Matrix<std::complex<Real>, 4, 4>;
    const std::complex<Real> minus_i_nu(Real(0), -nu);
    cmat M = -A;
    for (int d = 0; d < 4; ++d) M(d, d) += minus_i_nu;
    Eigen::PartialPivLU<cmat> lu(M);
    T = lu.solve(cmat::Identity());
    if (!T.allFinite()) {
        throw numerical_error("transfer_matrix: resolvent solve produced non-finite entries",
                              static_cast<double>(omega_for_msg));
    }
    const Real nM = inf_norm<Real>(M);
    const Real nT = inf_norm<Real>(T);
    cond = nM * nT;
    residual = inf_norm<Real>((M * T - cmat::Identity()).eval()) / (nM * nT);
    if (cond > Real(1e12)) {
        throw numerical_error("transfer_matrix: resolvent condition estimate exceeds 1e12",
                              static_cast<double>(omega_for_msg));
    }
    if (residual > Real(1e-12)) {
        throw numerical_error("transfer_matrix: resolvent residual certificate failed",
                              static_cast<double>(omega_for_msg));
    }
}

} // namespace detail

// Resolvent at both +omega and -omega.  A arrives in double precision from
// the linearization and is promoted to the working scalar here.
template <typename Real = long double>
transfer_data<Real> transfer_matrix(const Eigen::Matrix4cd& A, Real omega) {
    Eigen::Matrix<std::complex<Real>, 4, 4> Ar;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            Ar(r, c) = std::complex<Real>(static_cast<Real>(A(r, c).real()),
                                          static_cast<Real>(A(r, c).imag()));
    transfer_data<Real> out;
    out.omega = omega;
    detail::solve_resolvent<Real>(Ar, omega, omega, out.T_plus, out.residual_plus, out.cond_plus);
    detail::solve_resolvent<Real>(Ar, -omega, omega, out.T_minus, out.residual_minus, out.cond_minus);
    return out;
}

// All eight coefficient functions at both frequency arguments.
// Index convention: [s][n] with s = 0 for the '+' superscript, 1 for '-',
// and n = 0 for argument +omega, 1 for -omega.
template <typename Real = long double>
struct io_coefficient_set {
    using cplx = std::complex<Real>;
    Real omega;
    cplx B_a[2][2];  // a_out from b_in
    cplx A_a[2][2];  // a_out from a_in
    cplx B_b[2][2];  // b_out from b_in
    cplx A_b[2][2];  // b_out from a_in
    Real max_consistency_dev;
};

template <typename Real>
io_coefficient_set<Real> io_coefficients(const transfer_data<Real>& td, Real kappa, Real Gamma,
                                         Real consistency_tol = Real(1e-8)) {
    using cplx = std::complex<Real>;
    const Real sqkG = std::sqrt(kappa * Gamma);
    io_coefficient_set<Real> io;
    io.omega = td.omega;

    const typename transfer_data<Real>::cmat* Ts[2] = {&td.T_plus, &td.T_minus};
    for (int n = 0; n < 2; ++n) {
        const auto& T = *Ts[n];
        for (int s = 0; s < 2; ++s) {
            const Real sg = s == 0 ? Real(1) : Real(-1);
            io.B_a[s][n] = -(T(2, 0) + sg * T(3, 0)) * sqkG;
            io.A_a[s][n] = -(kappa * (T(2, 2) + sg * T(3, 2)) - cplx(1));
            io.B_b[s][n] = -(Gamma * (T(0, 0) + sg * T(1, 0)) - cplx(1));
            io.A_b[s][n] = -sqkG * (T(0, 2) + sg * T(1, 2));
        }
    }

    // Starred identities: columns 2 and 4 of T(nu) must reproduce the
    // conjugated coefficients at -nu, with the sign pattern
    //   -(T32 +- T42) sqrt(kG)      = +- B^+-_a(-nu)*
    //   -[kappa (T34 +- T44) -+ 1]  = +- A^+-_a(-nu)*
    //   -[Gamma (T12 +- T22) -+ 1]  = +- B^+-_b(-nu)*
    //   -sqrt(kG) (T14 +- T24)      = +- A^+-_b(-nu)*
    Real dev = 0;
    auto track = [&dev](cplx lhs, cplx rhs) { dev = std::max(dev, std::abs(lhs - rhs)); };
    for (int n = 0; n < 2; ++n) {
        const auto& T = *Ts[n];
        const int other = 1 - n;  // coefficients at the opposite argument
        for (int s = 0; s < 2; ++s) {
            const Real sg = s == 0 ? Real(1) : Real(-1);
            track(-(T(2, 1) + sg * T(3, 1)) * sqkG, sg * std::conj(io.B_a[s][other]));
            track(-(kappa * (T(2, 3) + sg * T(3, 3)) - sg * cplx(1)), sg * std::conj(io.A_a[s][other]));
            track(-(Gamma * (T(0, 1) + sg * T(1, 1)) - sg * cplx(1)), sg * std::conj(io.B_b[s][other]));
            track(-sqkG * (T(0, 3) + sg * T(1, 3)), sg * std::conj(io.A_b[s][other]));
        }
    }
    io.max_consistency_dev = dev;
    if (dev > consistency_tol) {
        throw consistency_error("io_coefficients: starred consistency relations violated",
                                static_cast<double>(dev));
    }
    return io;
}

// Commutator normalization of one output mode, mode 0 = b_out, 1 = a_out:
//   [o(w), o(w)+] = (1/4)(|B+(w)+B-(w)|^2 - |B+(-w)-B-(-w)|^2 + same in A) = 1
// for any vacuum-preserving stable system.
template <typename Real>
Real output_commutator(const io_coefficient_set<Real>& io, int mode) {
    const auto& B = mode == 0 ? io.B_b : io.B_a;
    const auto& A = mode == 0 ? io.A_b : io.A_a;
    const Real t1 = std::norm(B[0][0] + B[1][0]);
    const Real t2 = std::norm(B[0][1] - B[1][1]);
    const Real t3 = std::norm(A[0][0] + A[1][0]);
    const Real t4 = std::norm(A[0][1] - A[1][1]);
    return (t1 - t2 + t3 - t4) / Real(4);
}

} // namespace levmir
