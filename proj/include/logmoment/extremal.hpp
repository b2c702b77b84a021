#pragma once

// Shifted-exponential quantities and the two extremal searches.
//
// Throughout, E is a unit exponential and m_s(t) = E|E - t|^s (see
// shift_integrals.hpp).

#include <cstdint>
#include <utility>
#include <vector>

#include "logmoment/distributions.hpp"
#include "logmoment/shift_integrals.hpp"

namespace logmoment {

/// d/dt m_q(t) = t^q - m_q(t), for q >= 1 and t >= 0.
double shifted_moment_derivative(double q, double t, const ToleranceConfig& cfg);

/// The unique minimizer of t -> m_q(t) on [0, inf), q >= 1. At that point
/// m_q(t) = t^q.
double minimizing_shift(double q, const ToleranceConfig& cfg);

/// Root of u^q = e^{-u} Γ(q+1), q >= 1.
double balance_point(double q, const ToleranceConfig& cfg);

/// Positive root of x^{q+1} - (q+1) x - q, q > 0.
double truncation_bound(double q, const ToleranceConfig& cfg);

/// (α+1) t^{t/(t+α)} / (t+α) for t, α > 0.
double mixture_bound(double t, double alpha);

/// sqrt(2πp/e), p > 0.
double norm_scale(double p);

struct ShiftRoots {
  double q = 0.0;
  double minimizing_shift = 0.0;
  double balance_point = 0.0;
  double excess = 0.0;             // balance_point - q W(1/e)
  double moment_at_minimum = 0.0;  // m_q at the minimizing shift
};

ShiftRoots shift_roots(double q, const ToleranceConfig& cfg);

/// ‖E - t‖_p / ‖E - t‖_q for t >= 0, computed in log space.
RatioValue shifted_exp_ratio(double p, double q, double t, const ToleranceConfig& cfg);

struct ShiftScanResult {
  double p = 0.0;
  double q = 0.0;
  double t_hi = 0.0;
  double t_star = 0.0;
  double ratio_star = 0.0;
  double normalized = 0.0;  // ratio_star * q / p
  std::vector<std::pair<double, double>> profile;  // (t, ratio)
};

/// Default upper end of the shift search: 10 max(1, ‖E‖_p).
double default_shift_bound(double p);

/// Maximizes t -> ‖E - t‖_p / ‖E - t‖_q over [0, t_hi] (t_hi <= 0 selects
/// default_shift_bound(p)). With profile_points > 1 the ratio is also
/// sampled on a uniform grid including both ends. Requires p > q > 0.
ShiftScanResult max_ratio_shifted_exp(double p, double q, const ToleranceConfig& cfg,
                                      double t_hi = 0.0, std::size_t profile_points = 0);

struct TruncBox {
  Interval alpha{-5.0, 5.0};
  Interval a{0.01, 50.0};
  Interval b{0.01, 50.0};
};

struct TruncScanResult {
  double p = 0.0;
  double q = 0.0;
  TruncBox box;
  TruncatedExponential best;
  double ratio = 0.0;
  double normalized = 0.0;
  bool a_at_upper_edge = false;
  std::size_t evaluations = 0;
};

/// Multi-start search of ‖X‖_p / ‖X‖_q over densities proportional to
/// e^{αx} on [-a, b] inside the box. The ratio is invariant under x -> -x,
/// so the reported maximizer is given in the orientation with α >= 0 (the
/// mirror image is reported only if it stays inside the box). If moving a
/// to its upper bound does not lower the ratio beyond the quadrature error,
/// the point is moved there. Requires p > q > 0.
TruncScanResult max_ratio_trunc_exp(double p, double q, const TruncBox& box, std::size_t starts,
                                    const ToleranceConfig& cfg, std::uint64_t seed = kDefaultSeed);

}  // namespace logmoment
