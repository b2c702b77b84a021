#pragma once

// Adaptive quadrature, bracketed root finding and bounded maximization.
//
// Everything here is a pure function of its arguments. Integrands and
// objectives are passed as std::function so callers can capture state freely.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace logmoment {

struct ToleranceConfig {
  double quad_rel_tol = 1e-10;
  double quad_abs_tol = 1e-12;
  double root_tol = 1e-12;  // on the argument
  double opt_tol = 1e-9;    // on the argument
  std::size_t max_subdivisions = 10'000;
  // Semi-infinite integrals are cut where the integrand drops below
  // exp(-tail_cut_log) times the largest value seen.
  double tail_cut_log = 40.0;

  /// Throws Error(invalid_argument) unless every tolerance is strictly
  /// positive and max_subdivisions >= 1.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t subdivisions_used = 0;
};

using RealFunction = std::function<double(double)>;

/// Integrates f over [lo, hi]; hi may be +infinity.
///
/// With singular_at_lo the lower endpoint may carry an integrable power
/// singularity |f| <= C (x - lo)^-g, g < 1. The panel next to lo is mapped
/// through x = lo + u^2, which removes the singularity for g <= 1/2 and
/// weakens it otherwise. When the exponent is known use
/// integrate_power_singular instead.
///
/// Semi-infinite ranges are truncated at a point T found by outward doubling
/// where |f(T)| < exp(-tail_cut_log) * peak. The discarded tail is bounded by
/// |f(T)| / k, k the secant slope of -log|f| just left of T; the bound is
/// rigorous for integrands that are log-concave beyond T and is added to the
/// error estimate.
///
/// Errors: invalid_interval (lo >= hi), non_finite (NaN or inf from f at an
/// interior node), non_convergence (subdivision budget exhausted).
QuadResult integrate(const RealFunction& f, double lo, double hi,
                     bool singular_at_lo, const ToleranceConfig& cfg);

inline QuadResult integrate(const RealFunction& f, double lo, double hi,
                            const ToleranceConfig& cfg) {
  return integrate(f, lo, hi, false, cfg);
}

/// Like integrate, for integrands behaving as (x - lo)^-gamma near lo with
/// 0 <= gamma < 1. Substitutes x = lo + u^(1/(1-gamma)), which turns the
/// leading power into a constant. A kink of the form (x - lo)^s with
/// 0 < s < 1 is handled with gamma = 1 - s.
QuadResult integrate_power_singular(const RealFunction& f, double lo,
                                    double hi, double gamma,
                                    const ToleranceConfig& cfg);

/// Brent's method on a sign-changing bracket. The returned point lies in a
/// final bracket of width <= root_tol that still contains a sign change (or
/// is an exact zero of f).
///
/// Errors: no_sign_change, non_finite.
double find_root(const RealFunction& f, double lo, double hi,
                 const ToleranceConfig& cfg);

struct Maximum1d {
  double argmax = 0.0;
  double max = 0.0;
};

/// Uniform scan with `probes` points (endpoints included), then golden-section
/// refinement inside the two cells around the best probe. Returns the best
/// probe if refinement does not improve on it.
Maximum1d maximize_1d(const RealFunction& f, double lo, double hi,
                      const ToleranceConfig& cfg, std::size_t probes = 64);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

using VectorFunction = std::function<double(std::span<const double>)>;

struct MaximumNd {
  std::vector<double> argmax;
  double max = 0.0;
  std::size_t evaluations = 0;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Multi-start Nelder-Mead on -f inside a box. Start points are successive
/// Halton points (offset by seed) in the box interior; vertices are clamped to
/// the box. Deterministic for fixed arguments.
MaximumNd maximize_nd(const VectorFunction& f, std::span<const Interval> box,
                      std::size_t starts, const ToleranceConfig& cfg,
                      std::uint64_t seed = kDefaultSeed);

/// i-th point of the Halton sequence in [0,1)^dim (prime bases 2, 3, 5, ...).
std::vector<double> halton_point(std::uint64_t index, std::size_t dim);

/// log(exp(a) + exp(b)) without overflow; either argument may be -inf.
double log_add_exp(double a, double b) noexcept;

}  // namespace logmoment
