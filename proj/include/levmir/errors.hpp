#pragma once

// Exception types used across the library.  Everything derives from
// std::runtime_error so callers can catch coarsely; the subclasses carry
// the diagnostic payload (discriminant, frequency, deviation) that the
// sweep drivers turn into row status codes instead of aborting.

#include <cstdio>
#include <stdexcept>
#include <string>

namespace levmir {

namespace detail {
inline std::string fmt_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}
} // namespace detail

// Drive power below threshold: the semiclassical quadratic has no real
// detuning root.  Carries the (negative) discriminant so callers can see
// how far below threshold they are.
class no_real_steady_state : public std::runtime_error {
public:
    no_real_steady_state(double discriminant_, double p_tilde_)
        : std::runtime_error("no real steady state: discriminant D = " +
                             detail::fmt_sci(discriminant_) + " < 0 at p_tilde = " +
                             detail::fmt_sci(p_tilde_)),
          discriminant(discriminant_), p_tilde(p_tilde_) {}

    double discriminant; // D < 0
    double p_tilde;      // dimensionless power that was requested
};

// Threshold search found no sign change of D on the bracket (0, 1].
class threshold_not_found : public std::runtime_error {
public:
    explicit threshold_not_found(const std::string& what_) : std::runtime_error(what_) {}
};

// Linear-algebra failure (singular/ill-conditioned resolvent, eigensolver
// breakdown).  Carries the frequency at which it happened when relevant.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what_, double omega_ = 0.0)
        : std::runtime_error(what_), omega(omega_) {}

    double omega;
};

// Redundant analytic identities disagreed beyond tolerance.  This always
// indicates a bug (or severe conditioning loss), never a physics regime.
class consistency_error : public std::runtime_error {
public:
    consistency_error(const std::string& what_, double deviation_)
        : std::runtime_error(what_ + " (deviation " + detail::fmt_sci(deviation_) + ")"),
          deviation(deviation_) {}

    double deviation;
};

// A state that should be a valid quantum covariance matrix is not
// (symplectic determinant below one beyond tolerance).
class unphysical_state : public std::runtime_error {
public:
    unphysical_state(const std::string& what_, double det_value_)
        : std::runtime_error(what_ + " (det(2*sigma) = " + detail::fmt_sci(det_value_) + ")"),
          det_value(det_value_) {}

    double det_value;
};

} // namespace levmir
