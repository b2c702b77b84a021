#include "logmoment/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "logmoment/error.hpp"
#include "logmoment/shift_integrals.hpp"
#include "logmoment/specfun.hpp"

namespace logmoment {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string number_text(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

// One linear piece of the potential: V(x) = anchor_v + slope (x - anchor_x)
// on [lo, hi].
struct Segment {
  double lo;
  double hi;
  double anchor_x;
  double anchor_v;
  double slope;

  double value_at(double x) const { return anchor_v + slope * (x - anchor_x); }
};

std::vector<Segment> segments_of(const PiecewiseLinearPotential& p) {
  const auto& k = p.knots;
  std::vector<Segment> out;
  out.reserve(k.size() + 1);
  if (std::isfinite(p.left_slope)) out.push_back({-kInf, k.front().x, k.front().x, k.front().v, p.left_slope});
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    out.push_back({k[i].x, k[i + 1].x, k[i].x, k[i].v, (k[i + 1].v - k[i].v) / (k[i + 1].x - k[i].x)});
  }
  if (std::isfinite(p.right_slope)) out.push_back({k.back().x, kInf, k.back().x, k.back().v, p.right_slope});
  return out;
}

// φ_i(y) = ∫_0^1 u^i e^{-y u} du for y >= 0, i = 0, 1, 2.
double phi(int i, double y) {
  if (y < 1.0) {
    double term = 1.0;  // (-y)^n / n!
    double sum = 0.0;
    for (int n = 0; n < 40; ++n) {
      const double contribution = term / (n + i + 1);
      sum += contribution;
      if (std::abs(contribution) < 1e-18 * std::abs(sum)) break;
      term *= -y / (n + 1);
    }
    return sum;
  }
  const double ey = std::exp(-y);
  switch (i) {
    case 0: return -std::expm1(-y) / y;
    case 1: return (1.0 - ey * (1.0 + y)) / (y * y);
    default: return (2.0 - ey * (y * y + 2.0 * y + 2.0)) / (y * y * y);
  }
}

// ∫_l^h (x - c)^j e^{-V(x)} dx = exp(log_scale) * j_j, for j = 0, 1, 2, on a
// sub-interval of one segment. The anchor is the endpoint where V is
// smallest so every exponential decays away from it.
struct PieceMoments {
  double log_scale;
  double j0;
  double j1;
  double j2;
};

PieceMoments piece_moments(const Segment& s, double l, double h, double c) {
  const bool forward = s.slope >= 0.0;
  const double xa = forward ? l : h;
  const double va = s.value_at(xa);
  const double kappa = std::abs(s.slope);
  const double sigma = forward ? 1.0 : -1.0;
  const double length = h - l;

  double m0;
  double m1;
  double m2;
  if (std::isinf(length)) {
    m0 = 1.0 / kappa;
    m1 = m0 / kappa;
    m2 = 2.0 * m1 / kappa;
  } else {
    const double y = kappa * length;
    m0 = length * phi(0, y);
    m1 = length * length * phi(1, y);
    m2 = length * length * length * phi(2, y);
  }
  const double d = xa - c;
  return {-va, m0, d * m0 + sigma * m1, d * d * m0 + 2.0 * d * sigma * m1 + m2};
}

double log_normalizer(const std::vector<Segment>& segs) {
  double log_z = -kInf;
  for (const Segment& s : segs) {
    const PieceMoments pm = piece_moments(s, s.lo, s.hi, 0.0);
    log_z = log_add_exp(log_z, pm.log_scale + std::log(pm.j0));
  }
  return log_z;
}

// Σ over segments of the normalized central moment of order j about c.
double potential_moment(const PiecewiseLinearPotential& p, int order, double c) {
  const auto segs = segments_of(p);
  const double log_z = log_normalizer(segs);
  double sum = 0.0;
  for (const Segment& s : segs) {
    const PieceMoments pm = piece_moments(s, s.lo, s.hi, c);
    const double w = std::exp(pm.log_scale - log_z);
    sum += w * (order == 0 ? pm.j0 : order == 1 ? pm.j1 : pm.j2);
  }
  return sum;
}

double potential_mass_below_zero(const PiecewiseLinearPotential& p) {
  const auto segs = segments_of(p);
  const double log_z = log_normalizer(segs);
  double mass = 0.0;
  for (const Segment& s : segs) {
    if (s.lo >= 0.0) continue;
    const double hi = std::min(s.hi, 0.0);
    if (!(hi > s.lo)) continue;
    const PieceMoments pm = piece_moments(s, s.lo, hi, 0.0);
    mass += std::exp(pm.log_scale - log_z) * pm.j0;
  }
  return mass;
}

void require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorCode::domain, message);
}

void validate_potential(const PiecewiseLinearPotential& p) {
  require(!p.knots.empty(), "potential needs at least one knot");
  for (std::size_t i = 0; i < p.knots.size(); ++i) {
    require(std::isfinite(p.knots[i].x) && std::isfinite(p.knots[i].v), "knots must be finite");
    if (i > 0) require(p.knots[i].x > p.knots[i - 1].x, "knot abscissas must be strictly increasing");
  }
  require(p.left_slope < 0.0 && !std::isnan(p.left_slope),
          "left slope must be negative (or -inf for a wall) for integrability");
  require(p.right_slope > 0.0 && !std::isnan(p.right_slope),
          "right slope must be positive (or +inf for a wall) for integrability");
  require(p.knots.size() >= 2 || std::isfinite(p.left_slope) || std::isfinite(p.right_slope),
          "a potential walled on both sides needs two knots");

  double previous = p.left_slope;
  const auto segs = segments_of(p);
  std::vector<double> slopes;
  for (const Segment& s : segs) {
    if (std::isfinite(s.lo) && std::isfinite(s.hi)) slopes.push_back(s.slope);
  }
  slopes.push_back(p.right_slope);
  for (double slope : slopes) {
    const double slack = 1e-9 * (1.0 + std::abs(slope) + (std::isfinite(previous) ? std::abs(previous) : 0.0));
    require(slope >= previous - slack, "potential is not convex: slopes must be nondecreasing");
    previous = slope;
  }
}

Distribution shifted_potential(PiecewiseLinearPotential p, double shift) {
  for (Knot& k : p.knots) k.x += shift;
  return p;
}

// |x|^s against the normalized density of one piece [l, h], h > l.
QuadResult piece_quadrature(const Segment& seg, double l, double h, double log_z,
                            const RealFunction& weight, double kink_exponent,
                            const ToleranceConfig& cfg) {
  const auto integrand = [&seg, log_z, &weight](double x) {
    return weight(x) * std::exp(-seg.value_at(x) - log_z);
  };
  const bool reflect = h <= 0.0;
  const RealFunction f = reflect ? RealFunction([&integrand](double y) { return integrand(-y); })
                                 : RealFunction(integrand);
  const double lo = reflect ? -h : l;
  const double hi = reflect ? -l : h;
  if (lo == 0.0 && kink_exponent > 0.0 && kink_exponent < 1.0) {
    return integrate_power_singular(f, lo, hi, 1.0 - kink_exponent, cfg);
  }
  return integrate(f, lo, hi, cfg);
}

QuadResult potential_quadrature(const PiecewiseLinearPotential& p, const RealFunction& weight,
                                double kink_exponent, const ToleranceConfig& cfg) {
  const auto segs = segments_of(p);
  const double log_z = log_normalizer(segs);
  QuadResult total;
  for (const Segment& s : segs) {
    std::vector<std::pair<double, double>> pieces;
    if (s.lo < 0.0 && s.hi > 0.0) {
      pieces = {{s.lo, 0.0}, {0.0, s.hi}};
    } else {
      pieces = {{s.lo, s.hi}};
    }
    for (const auto& [l, h] : pieces) {
      const QuadResult r = piece_quadrature(s, l, h, log_z, weight, kink_exponent, cfg);
      total.value += r.value;
      total.abs_error_estimate += r.abs_error_estimate;
      total.subdivisions_used += r.subdivisions_used;
    }
  }
  return total;
}

void require_order(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    std::ostringstream msg;
    msg << "moment order must be positive and finite, got " << s;
    fail(ErrorCode::domain, msg.str());
  }
}

}  // namespace

void validate(const Distribution& d) {
  std::visit(Overloaded{
                 [](const Exponential& e) { require(e.rate > 0.0 && std::isfinite(e.rate), "exponential rate must be positive"); },
                 [](const ShiftedExponential& e) { require(std::isfinite(e.t), "shift must be finite"); },
                 [](const TruncatedExponential& e) {
                   require(e.a > 0.0 && e.b > 0.0 && std::isfinite(e.a) && std::isfinite(e.b),
                           "truncated exponential needs a > 0 and b > 0");
                   require(std::isfinite(e.alpha), "alpha must be finite");
                 },
                 [](const GammaShift&) {},
                 [](const SymmetricUniform& u) { require(u.a > 0.0 && std::isfinite(u.a), "uniform half-width must be positive"); },
                 [](const PiecewiseLinearPotential& p) { validate_potential(p); },
             },
             d);
}

std::string_view family_name(const Distribution& d) {
  return std::visit(Overloaded{
                        [](const Exponential&) { return std::string_view("exp"); },
                        [](const ShiftedExponential&) { return std::string_view("shiftexp"); },
                        [](const TruncatedExponential&) { return std::string_view("truncexp"); },
                        [](const GammaShift&) { return std::string_view("gamma-shift"); },
                        [](const SymmetricUniform&) { return std::string_view("uniform"); },
                        [](const PiecewiseLinearPotential&) { return std::string_view("plc"); },
                    },
                    d);
}

PiecewiseLinearPotential to_potential(const Distribution& d) {
  validate(d);
  return std::visit(
      Overloaded{
          [](const Exponential& e) {
            return PiecewiseLinearPotential{{{0.0, -std::log(e.rate)}}, -kInf, e.rate};
          },
          [](const ShiftedExponential& e) {
            return PiecewiseLinearPotential{{{-e.t, 0.0}}, -kInf, 1.0};
          },
          [](const TruncatedExponential& e) {
            return PiecewiseLinearPotential{{{-e.a, e.alpha * e.a}, {e.b, -e.alpha * e.b}}, -kInf, kInf};
          },
          [](const GammaShift&) { return PiecewiseLinearPotential{{{-1.0, 0.0}}, -kInf, 1.0}; },
          [](const SymmetricUniform& u) {
            return PiecewiseLinearPotential{{{-u.a, 0.0}, {u.a, 0.0}}, -kInf, kInf};
          },
          [](const PiecewiseLinearPotential& p) { return p; },
      },
      d);
}

double potential(const PiecewiseLinearPotential& p, double x) {
  const auto& k = p.knots;
  if (x < k.front().x) return std::isfinite(p.left_slope) ? k.front().v + p.left_slope * (x - k.front().x) : kInf;
  if (x > k.back().x) return std::isfinite(p.right_slope) ? k.back().v + p.right_slope * (x - k.back().x) : kInf;
  const auto it = std::upper_bound(k.begin(), k.end(), x, [](double value, const Knot& knot) { return value < knot.x; });
  if (it == k.end()) return k.back().v;
  const Knot& right = *it;
  const Knot& left = *(it - 1);
  return left.v + (right.v - left.v) * (x - left.x) / (right.x - left.x);
}

double density(const Distribution& d, double x) {
  validate(d);
  return std::visit(Overloaded{
                        [x](const Exponential& e) { return x < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * x); },
                        [x](const ShiftedExponential& e) { return x < -e.t ? 0.0 : std::exp(-(x + e.t)); },
                        [x](const GammaShift&) { return x < -1.0 ? 0.0 : std::exp(-(x + 1.0)); },
                        [x](const SymmetricUniform& u) { return std::abs(x) > u.a ? 0.0 : 0.5 / u.a; },
                        [x, &d](const auto&) {
                          const PiecewiseLinearPotential p = to_potential(d);
                          const double v = potential(p, x);
                          if (std::isinf(v)) return 0.0;
                          return std::exp(-v - log_normalizer(segments_of(p)));
                        },
                    },
                    d);
}

double mean(const Distribution& d) {
  validate(d);
  return std::visit(Overloaded{
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const ShiftedExponential& e) { return 1.0 - e.t; },
                        [](const GammaShift&) { return 0.0; },
                        [](const SymmetricUniform&) { return 0.0; },
                        [&d](const auto&) { return potential_moment(to_potential(d), 1, 0.0); },
                    },
                    d);
}

double variance(const Distribution& d) {
  validate(d);
  return std::visit(Overloaded{
                        [](const Exponential& e) { return 1.0 / (e.rate * e.rate); },
                        [](const ShiftedExponential&) { return 1.0; },
                        [](const GammaShift&) { return 1.0; },
                        [](const SymmetricUniform& u) { return u.a * u.a / 3.0; },
                        [&d](const auto&) {
                          const PiecewiseLinearPotential p = to_potential(d);
                          return potential_moment(p, 2, potential_moment(p, 1, 0.0));
                        },
                    },
                    d);
}

LogMoment log_abs_moment(const Distribution& d, double s, const ToleranceConfig& cfg, MomentRoute route) {
  validate(d);
  require_order(s);
  if (route == MomentRoute::automatic) {
    if (const auto* e = std::get_if<Exponential>(&d)) {
      return {s, log_gamma_p1(s) - s * std::log(e->rate), 0.0, MomentMethod::closed_form};
    }
    if (const auto* u = std::get_if<SymmetricUniform>(&d)) {
      return {s, s * std::log(u->a) - std::log1p(s), 0.0, MomentMethod::closed_form};
    }
    double shift = -1.0;
    if (const auto* e = std::get_if<ShiftedExponential>(&d); e != nullptr && e->t >= 0.0) shift = e->t;
    if (std::holds_alternative<GammaShift>(d)) shift = 1.0;
    if (shift >= 0.0) {
      const LogValue v = log_shifted_moment(s, shift, cfg);
      return {s, v.log_value, v.relative_error, MomentMethod::quadrature};
    }
  }
  const RealFunction weight = [s](double x) { return x == 0.0 ? 0.0 : std::exp(s * std::log(std::abs(x))); };
  const QuadResult r = potential_quadrature(to_potential(d), weight, s, cfg);
  if (!(r.value > 0.0)) fail(ErrorCode::non_convergence, "moment quadrature returned a non-positive value");
  return {s, std::log(r.value), r.abs_error_estimate / r.value, MomentMethod::quadrature};
}

MomentValue abs_moment(const Distribution& d, double s, const ToleranceConfig& cfg, MomentRoute route) {
  const LogMoment lm = log_abs_moment(d, s, cfg, route);
  const double value = std::exp(lm.log_value);
  return {s, value, value * lm.relative_error, lm.method};
}

double norm(const Distribution& d, double s, const ToleranceConfig& cfg) {
  return std::exp(log_abs_moment(d, s, cfg).log_value / s);
}

RatioValue ratio_with_error(const Distribution& d, double p, double q, const ToleranceConfig& cfg,
                            MomentRoute route) {
  require_order(q);
  require_order(p);
  if (p < q) fail(ErrorCode::domain, "ratio requires p >= q");
  if (p == q) {
    validate(d);
    return {1.0, 0.0};
  }
  const LogMoment mp = log_abs_moment(d, p, cfg, route);
  const LogMoment mq = log_abs_moment(d, q, cfg, route);
  const double value = std::exp(mp.log_value / p - mq.log_value / q);
  return {value, mp.relative_error / p + mq.relative_error / q};
}

double ratio(const Distribution& d, double p, double q, const ToleranceConfig& cfg) {
  return ratio_with_error(d, p, q, cfg).value;
}

double prob_negative(const Distribution& d) {
  validate(d);
  return std::visit(Overloaded{
                        [](const Exponential&) { return 0.0; },
                        [](const ShiftedExponential& e) { return e.t > 0.0 ? -std::expm1(-e.t) : 0.0; },
                        [](const GammaShift&) { return -std::expm1(-1.0); },
                        [](const SymmetricUniform&) { return 0.5; },
                        [&d](const auto&) { return potential_mass_below_zero(to_potential(d)); },
                    },
                    d);
}

QuadResult expectation(const Distribution& d, const RealFunction& h, const ToleranceConfig& cfg) {
  return potential_quadrature(to_potential(d), h, 0.0, cfg);
}

Distribution center(const Distribution& d) {
  validate(d);
  return std::visit(Overloaded{
                        [](const Exponential& e) -> Distribution {
                          if (e.rate == 1.0) return ShiftedExponential{1.0};
                          return shifted_potential(to_potential(e), -1.0 / e.rate);
                        },
                        [](const ShiftedExponential&) -> Distribution { return ShiftedExponential{1.0}; },
                        [](const TruncatedExponential& e) -> Distribution {
                          const double m = mean(e);
                          return TruncatedExponential{e.a + m, e.b - m, e.alpha};
                        },
                        [](const GammaShift& g) -> Distribution { return g; },
                        [](const SymmetricUniform& u) -> Distribution { return u; },
                        [](const PiecewiseLinearPotential& p) -> Distribution {
                          // A second pass removes the rounding left by the first.
                          Distribution out = shifted_potential(p, -potential_moment(p, 1, 0.0));
                          const auto& once = std::get<PiecewiseLinearPotential>(out);
                          return shifted_potential(once, -potential_moment(once, 1, 0.0));
                        },
                    },
                    d);
}

bool is_symmetric(const Distribution& d) {
  validate(d);
  return std::visit(Overloaded{
                        [](const SymmetricUniform&) { return true; },
                        [](const TruncatedExponential& e) { return e.a == e.b && e.alpha == 0.0; },
                        [](const PiecewiseLinearPotential& p) {
                          const auto& k = p.knots;
                          const std::size_t n = k.size();
                          double scale = 1.0;
                          for (const Knot& knot : k) scale = std::max({scale, std::abs(knot.x), std::abs(knot.v)});
                          const double tol = 1e-12 * scale;
                          for (std::size_t i = 0; i < n; ++i) {
                            if (std::abs(k[i].x + k[n - 1 - i].x) > tol) return false;
                            if (std::abs(k[i].v - k[n - 1 - i].v) > tol) return false;
                          }
                          return p.left_slope == -p.right_slope ||
                                 std::abs(p.left_slope + p.right_slope) <= 1e-12 * (1.0 + std::abs(p.right_slope));
                        },
                        [](const auto&) { return false; },
                    },
                    d);
}

bool is_nonnegative(const Distribution& d) {
  validate(d);
  return std::visit(Overloaded{
                        [](const Exponential&) { return true; },
                        [](const ShiftedExponential& e) { return e.t <= 0.0; },
                        [](const PiecewiseLinearPotential& p) {
                          return std::isinf(p.left_slope) && p.knots.front().x >= 0.0;
                        },
                        [](const auto&) { return false; },
                    },
                    d);
}

PiecewiseLinearPotential random_log_concave(std::uint64_t seed, unsigned complexity) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> position(-5.0, 5.0);
  std::exponential_distribution<double> increment(1.0);
  std::bernoulli_distribution wall(0.2);
  std::uniform_real_distribution<double> log_scale(std::log(0.2), std::log(3.0));

  const std::size_t n = static_cast<std::size_t>(complexity) + 1;
  std::vector<double> xs(n);
  for (double& x : xs) x = position(rng);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < n; ++i) xs[i] = std::max(xs[i], xs[i - 1] + 1e-3);

  // n + 1 nondecreasing slopes (left tail, n - 1 segments, right tail),
  // straddling zero.
  std::vector<double> cumulative(n + 1);
  double running = 0.0;
  for (double& c : cumulative) {
    running += increment(rng);
    c = running;
  }
  std::uniform_real_distribution<double> offset_draw(cumulative.front(), cumulative.back());
  const double offset = offset_draw(rng);
  const double scale = std::exp(log_scale(rng));
  std::vector<double> slopes(n + 1);
  for (std::size_t j = 0; j <= n; ++j) slopes[j] = scale * (cumulative[j] - offset);
  slopes.front() = std::min(slopes.front(), -0.05);
  slopes.back() = std::max(slopes.back(), 0.05);

  bool left_wall = wall(rng);
  bool right_wall = wall(rng);
  if (n == 1 && left_wall && right_wall) right_wall = false;

  PiecewiseLinearPotential p;
  p.knots.resize(n);
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) v += slopes[i] * (xs[i] - xs[i - 1]);
    p.knots[i] = {xs[i], v};
  }
  const double v_min = std::min_element(p.knots.begin(), p.knots.end(), [](const Knot& a, const Knot& b) {
                         return a.v < b.v;
                       })->v;
  for (Knot& k : p.knots) k.v -= v_min;
  p.left_slope = left_wall ? -kInf : slopes.front();
  p.right_slope = right_wall ? kInf : slopes.back();
  return p;
}

PiecewiseLinearPotential random_symmetric_log_concave(std::uint64_t seed, unsigned complexity) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> position(0.0, 5.0);
  std::exponential_distribution<double> increment(1.0);
  std::bernoulli_distribution wall(0.2);
  std::uniform_real_distribution<double> log_scale(std::log(0.2), std::log(3.0));

  const std::size_t m = complexity;
  std::vector<double> ys(m);
  for (double& y : ys) y = position(rng);
  std::sort(ys.begin(), ys.end());
  double previous = 0.0;
  for (double& y : ys) {
    y = std::max(y, previous + 1e-3);
    previous = y;
  }

  // m segment slopes on (0, y_m] plus the tail slope, all >= 0 and nondecreasing.
  const double scale = std::exp(log_scale(rng));
  std::vector<double> slopes(m + 1);
  double running = 0.0;
  for (double& s : slopes) {
    running += increment(rng);
    s = scale * running;
  }
  slopes.back() = std::max(slopes.back(), 0.05);
  const bool walled = m > 0 && wall(rng);

  std::vector<Knot> half{{0.0, 0.0}};
  for (std::size_t i = 0; i < m; ++i) {
    const double width = ys[i] - (i == 0 ? 0.0 : ys[i - 1]);
    half.push_back({ys[i], half.back().v + slopes[i] * width});
  }
  PiecewiseLinearPotential p;
  for (auto it = half.rbegin(); it != half.rend() - 1; ++it) p.knots.push_back({-it->x, it->v});
  p.knots.insert(p.knots.end(), half.begin(), half.end());
  p.right_slope = walled ? kInf : slopes.back();
  p.left_slope = -p.right_slope;
  return p;
}

namespace {

[[noreturn]] void parse_error(std::string_view spec, std::size_t offset, const std::string& what) {
  std::ostringstream msg;
  msg << "cannot parse distribution '" << spec << "' at offset " << offset << ": " << what;
  fail(ErrorCode::parse, msg.str());
}

double parse_number(std::string_view spec, std::size_t offset, std::string_view token) {
  const std::string text(token);
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    parse_error(spec, offset, "expected a number, found '" + text + "'");
  }
  return value;
}

double slope_from_json(const nlohmann::json& j, double wall) {
  if (j.is_null()) return wall;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "-inf") return wall;
    fail(ErrorCode::parse, "slope must be a number, null, or \"inf\"/\"-inf\"");
  }
  if (!j.is_number()) fail(ErrorCode::parse, "slope must be a number or null");
  return j.get<double>();
}

}  // namespace

PiecewiseLinearPotential parse_potential_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, std::string("potential JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("knots")) fail(ErrorCode::parse, "potential JSON needs a \"knots\" array");
  PiecewiseLinearPotential p;
  for (const auto& k : doc.at("knots")) {
    if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
      fail(ErrorCode::parse, "each knot must be a two-element [x, v] array");
    }
    p.knots.push_back({k[0].get<double>(), k[1].get<double>()});
  }
  p.left_slope = slope_from_json(doc.value("left_slope", nlohmann::json()), -kInf);
  p.right_slope = slope_from_json(doc.value("right_slope", nlohmann::json()), kInf);
  validate(p);
  return p;
}

Distribution parse_distribution(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::vector<std::pair<std::string, std::pair<std::string_view, std::size_t>>> args;
  if (colon != std::string_view::npos) {
    std::size_t pos = colon + 1;
    if (pos >= spec.size()) parse_error(spec, pos, "missing parameters after ':'");
    while (pos <= spec.size()) {
      std::size_t comma = spec.find(',', pos);
      if (comma == std::string_view::npos) comma = spec.size();
      const std::string_view item = spec.substr(pos, comma - pos);
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) parse_error(spec, pos, "expected key=value, found '" + std::string(item) + "'");
      args.push_back({std::string(item.substr(0, eq)), {item.substr(eq + 1), pos + eq + 1}});
      pos = comma + 1;
    }
  }

  std::vector<bool> used(args.size(), false);
  auto take = [&](const std::string& key, bool required, double fallback) {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].first == key) {
        used[i] = true;
        return parse_number(spec, args[i].second.second, args[i].second.first);
      }
    }
    if (required) parse_error(spec, spec.size(), "missing parameter '" + key + "'");
    return fallback;
  };
  auto finish = [&](Distribution d) {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (!used[i]) {
        parse_error(spec, args[i].second.second - args[i].first.size() - 1,
                    "unknown parameter '" + args[i].first + "' for " + std::string(name));
      }
    }
    try {
      validate(d);
    } catch (const Error& e) {
      parse_error(spec, colon == std::string_view::npos ? 0 : colon + 1, e.what());
    }
    return d;
  };

  if (name == "exp") return finish(Exponential{take("rate", false, 1.0)});
  if (name == "shiftexp") return finish(ShiftedExponential{take("t", true, 0.0)});
  if (name == "truncexp") {
    const double a = take("a", true, 0.0);
    const double b = take("b", true, 0.0);
    return finish(TruncatedExponential{a, b, take("alpha", true, 0.0)});
  }
  if (name == "gamma-shift") return finish(GammaShift{});
  if (name == "uniform") return finish(SymmetricUniform{take("a", true, 0.0)});
  if (name == "plc") {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].first != "file") {
        parse_error(spec, args[i].second.second - args[i].first.size() - 1, "unknown parameter '" + args[i].first + "' for plc");
      }
    }
    if (args.size() != 1) parse_error(spec, spec.size(), "plc needs exactly one file=PATH parameter");
    const std::string path(args[0].second.first);
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open potential file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_potential_json(buffer.str());
  }
  parse_error(spec, 0, "unknown family '" + std::string(name) + "'");
}

std::string describe(const Distribution& d) {
  return std::visit(Overloaded{
                        [](const Exponential& e) { return "exp:rate=" + number_text(e.rate); },
                        [](const ShiftedExponential& e) { return "shiftexp:t=" + number_text(e.t); },
                        [](const TruncatedExponential& e) {
                          return "truncexp:a=" + number_text(e.a) + ",b=" + number_text(e.b) + ",alpha=" + number_text(e.alpha);
                        },
                        [](const GammaShift&) { return std::string("gamma-shift"); },
                        [](const SymmetricUniform& u) { return "uniform:a=" + number_text(u.a); },
                        [](const PiecewiseLinearPotential& p) {
                          nlohmann::json knots = nlohmann::json::array();
                          for (const Knot& k : p.knots) knots.push_back({k.x, k.v});
                          nlohmann::json doc = {{"knots", knots},
                                                {"left_slope", std::isinf(p.left_slope) ? nlohmann::json() : nlohmann::json(p.left_slope)},
                                                {"right_slope", std::isinf(p.right_slope) ? nlohmann::json() : nlohmann::json(p.right_slope)}};
                          return "plc:" + doc.dump();
                        },
                    },
                    d);
}

}  // namespace logmoment
