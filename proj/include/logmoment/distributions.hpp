#pragma once

// Log-concave distribution families and their moments.
//
// Every family is an exact special case of PiecewiseLinearPotential (density
// proportional to e^{-V} with V convex and piecewise linear), and
// to_potential() performs that conversion. Closed forms are used wherever
// they exist; the generic quadrature route always goes through the potential.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "logmoment/numerics.hpp"

namespace logmoment {

/// rate e^{-rate x} on [0, inf).
struct Exponential {
  double rate = 1.0;

  bool operator==(const Exponential&) const = default;
};

/// E - t for a unit exponential E: density e^{-(x+t)} on [-t, inf).
struct ShiftedExponential {
  double t = 0.0;

  bool operator==(const ShiftedExponential&) const = default;
};

/// e^{alpha x + beta} on [-a, b]; beta is always recomputed from (a, b, alpha).
struct TruncatedExponential {
  double a = 1.0;
  double b = 1.0;
  double alpha = 0.0;

  bool operator==(const TruncatedExponential&) const = default;
};

/// E - 1: density e^{-(x+1)} on [-1, inf). Mean zero, variance one.
struct GammaShift {
  bool operator==(const GammaShift&) const = default;
};

/// 1/(2a) on [-a, a].
struct SymmetricUniform {
  double a = 1.0;

  bool operator==(const SymmetricUniform&) const = default;
};

struct Knot {
  double x = 0.0;
  double v = 0.0;

  bool operator==(const Knot&) const = default;
};

/// Density proportional to e^{-V}, V interpolating the knots linearly and
/// continued with left_slope / right_slope beyond them. A slope of -inf on
/// the left (+inf on the right) is a wall: the support ends at that knot.
struct PiecewiseLinearPotential {
  std::vector<Knot> knots;
  double left_slope = -1.0;
  double right_slope = 1.0;

  bool operator==(const PiecewiseLinearPotential&) const = default;
};

using Distribution = std::variant<Exponential, ShiftedExponential, TruncatedExponential,
                                  GammaShift, SymmetricUniform, PiecewiseLinearPotential>;

/// Throws Error(domain) if parameters are out of range, the potential is not
/// convex, or the density is not integrable.
void validate(const Distribution& d);

std::string_view family_name(const Distribution& d);

/// Exact piecewise-linear-potential form of any family.
PiecewiseLinearPotential to_potential(const Distribution& d);

/// Normalized density; 0 outside the support.
double density(const Distribution& d, double x);

/// Potential V(x) of a piecewise-linear-potential density (unnormalized);
/// +inf outside the support.
double potential(const PiecewiseLinearPotential& plc, double x);

/// Exact for every family (segment-wise closed forms for the potential).
double mean(const Distribution& d);
double variance(const Distribution& d);

enum class MomentMethod { closed_form, quadrature };

struct MomentValue {
  double s = 0.0;
  double value = 0.0;  // E|X|^s
  double abs_error_estimate = 0.0;
  MomentMethod method = MomentMethod::closed_form;
};

enum class MomentRoute {
  automatic,   // closed forms or specialised integrals where available
  quadrature,  // always integrate |x|^s against the density
};

/// E|X|^s together with its logarithm; used where E|X|^s leaves double range.
struct LogMoment {
  double s = 0.0;
  double log_value = 0.0;
  double relative_error = 0.0;
  MomentMethod method = MomentMethod::closed_form;
};

LogMoment log_abs_moment(const Distribution& d, double s, const ToleranceConfig& cfg,
                         MomentRoute route = MomentRoute::automatic);

MomentValue abs_moment(const Distribution& d, double s, const ToleranceConfig& cfg,
                       MomentRoute route = MomentRoute::automatic);

/// ‖X‖_s = (E|X|^s)^{1/s}.
double norm(const Distribution& d, double s, const ToleranceConfig& cfg);

struct RatioValue {
  double value = 1.0;           // ‖X‖_p / ‖X‖_q
  double relative_error = 0.0;  // propagated from the two moments
};

RatioValue ratio_with_error(const Distribution& d, double p, double q, const ToleranceConfig& cfg,
                            MomentRoute route = MomentRoute::automatic);

/// ‖X‖_p / ‖X‖_q. Requires p >= q > 0; exactly 1 when p == q.
double ratio(const Distribution& d, double p, double q, const ToleranceConfig& cfg);

/// P(X < 0), in closed form for every family.
double prob_negative(const Distribution& d);

/// E h(X) by quadrature, split at every knot and at 0.
QuadResult expectation(const Distribution& d, const RealFunction& h, const ToleranceConfig& cfg);

/// The same shape translated to mean zero.
Distribution center(const Distribution& d);

bool is_symmetric(const Distribution& d);
bool is_nonnegative(const Distribution& d);

/// Seeded random convex piecewise-linear potential with complexity + 1 knots
/// drawn on [-5, 5]; walls appear on either side with probability 1/5.
PiecewiseLinearPotential random_log_concave(std::uint64_t seed, unsigned complexity);

/// Seeded random even potential: a knot at 0 and `complexity` mirrored pairs.
PiecewiseLinearPotential random_symmetric_log_concave(std::uint64_t seed, unsigned complexity);

/// Parses the distribution mini-grammar:
///   exp[:rate=R] | shiftexp:t=T | truncexp:a=A,b=B,alpha=L | gamma-shift |
///   uniform:a=A | plc:file=PATH
/// Errors name the offending token and its character offset.
Distribution parse_distribution(std::string_view spec);

/// Reads {"knots":[[x,v],...],"left_slope":..,"right_slope":..}; null (or
/// "-inf"/"inf") marks a wall.
PiecewiseLinearPotential parse_potential_json(std::string_view text);

/// Canonical mini-grammar string; potentials are rendered as their JSON body
/// after "plc:" since they have no inline grammar.
std::string describe(const Distribution& d);

}  // namespace logmoment
