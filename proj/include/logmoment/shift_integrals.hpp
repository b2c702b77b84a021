#pragma once

// Moments of the shifted exponential E - t, t >= 0:
//
//   m_s(t) = E|E - t|^s = I(s, t) + e^{-t} Γ(s+1),   I(s, t) = ∫_0^t e^{x-t} x^s dx.
//
// I is computed as t^{s+1} J with
//
//   J = 1/(s+1) ∫_0^∞ exp(-z - t (1 - e^{-z/(s+1)})) dz,
//
// (substituting x = t e^{-z/(s+1)}), whose integrand is bounded by e^{-z}
// for every order s. This keeps the quadrature well conditioned for large s,
// where x^s is sharply peaked at x = t, and lets every quantity be carried in
// log space.

#include "logmoment/numerics.hpp"

namespace logmoment {

/// A positive quantity stored as its logarithm together with a relative error
/// bound from the quadrature that produced it.
struct LogValue {
  double log_value = 0.0;
  double relative_error = 0.0;
};

/// log I(s, t); -inf at t = 0. Requires s > 0, t >= 0.
LogValue log_shift_integral(double s, double t, const ToleranceConfig& cfg);

/// log m_s(t). Requires s > 0, t >= 0.
LogValue log_shifted_moment(double s, double t, const ToleranceConfig& cfg);

/// I(s, t) in linear scale, with absolute error estimate.
QuadResult shift_integral(double s, double t, const ToleranceConfig& cfg);

/// m_s(t) in linear scale, with absolute error estimate.
QuadResult shifted_moment(double s, double t, const ToleranceConfig& cfg);

}  // namespace logmoment
