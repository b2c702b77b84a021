#pragma once

#include <cstdint>

namespace logmoment {

/// Γ(x + 1) for x >= 0. Returns +inf once the result leaves double range
/// (x above roughly 171.62). Relative error is a few ulps.
double gamma_p1(double x);

/// log Γ(x + 1) for x >= 0.
double log_gamma_p1(double x);

/// The Stirling remainder μ(x) in Γ(x+1) = (x/e)^x sqrt(2πx) e^{μ(x)}, x > 0.
/// Evaluated from the asymptotic series (after shifting the argument above 15
/// with the recurrence), so it keeps full relative precision for large x
/// where log Γ minus its Stirling part would cancel.
double stirling_correction(double x);

/// g(x) = Γ(x+1) (x/e)^{-x} = sqrt(2πx) e^{μ(x)}, x > 0.
double gamma_growth(double x);

/// Principal branch of the Lambert function on [0, inf): w >= 0 with
/// w e^w = y.
double lambert_w(double y);

/// ‖E‖_s = Γ(s+1)^{1/s} for the unit exponential E, s > 0.
double exponential_norm(double s);

/// log ‖E‖_s.
double log_exponential_norm(double s);

/// !n = n! Σ_{k<=n} (-1)^k / k!, exact. Throws Error(overflow) past n = 20.
std::uint64_t subfactorial(unsigned n);

struct SharpConstants {
  double w_inv_e;  // W(1/e)
  double c0;       // e^{W(1/e)}
  double r0;       // e W(1/e) = 1 / c0
  double lambda0;  // sqrt(2) / c0
};

const SharpConstants& sharp_constants();

}  // namespace logmoment
