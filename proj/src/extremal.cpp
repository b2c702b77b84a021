#include "logmoment/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "logmoment/error.hpp"
#include "logmoment/specfun.hpp"

namespace logmoment {

namespace {

void require(bool ok, const char* what, double value) {
  if (!ok) {
    std::ostringstream msg;
    msg << what << " (got " << value << ")";
    fail(ErrorCode::domain, msg.str());
  }
}

void require_pair(double p, double q) {
  require(q > 0.0 && std::isfinite(q), "q must be positive", q);
  require(p > q && std::isfinite(p), "p must exceed q", p);
}

double log_moment_at(double q, double t, const ToleranceConfig& cfg) {
  return log_shifted_moment(q, t, cfg).log_value;
}

}  // namespace

double shifted_moment_derivative(double q, double t, const ToleranceConfig& cfg) {
  require(q >= 1.0 && std::isfinite(q), "q must be at least 1", q);
  require(t >= 0.0, "t must be nonnegative", t);
  const double power = t == 0.0 ? 0.0 : std::pow(t, q);
  return power - shifted_moment(q, t, cfg).value;
}

double balance_point(double q, const ToleranceConfig& cfg) {
  require(q >= 1.0 && std::isfinite(q), "q must be at least 1", q);
  const double log_gamma = log_gamma_p1(q);
  // Increasing in u; negative at q W(1/e) / 2 and positive at Γ(q+1)^{1/q}.
  const auto h = [q, log_gamma](double u) { return q * std::log(u) + u - log_gamma; };
  const double lo = 0.5 * q * sharp_constants().w_inv_e;
  const double hi = exponential_norm(q);
  return find_root(h, lo, hi, cfg);
}

double minimizing_shift(double q, const ToleranceConfig& cfg) {
  require(q >= 1.0 && std::isfinite(q), "q must be at least 1", q);
  // Same sign as m_q'(t) = t^q - m_q(t), evaluated in log space.
  const auto h = [q, &cfg](double t) { return q * std::log(t) - log_moment_at(q, t, cfg); };
  const double lo = 0.5 * balance_point(q, cfg);
  double hi = 1.01 * exponential_norm(q) + 0.01;
  for (int grow = 0; h(hi) <= 0.0; ++grow) {
    if (grow > 60) fail(ErrorCode::no_sign_change, "could not bracket the minimizing shift");
    hi *= 2.0;
  }
  return find_root(h, lo, hi, cfg);
}

double truncation_bound(double q, const ToleranceConfig& cfg) {
  require(q > 0.0 && std::isfinite(q), "q must be positive", q);
  // x^{q+1} = (q+1) x + q compared in log form; negative at x = 1.
  const auto h = [q](double x) { return (q + 1.0) * std::log(x) - std::log((q + 1.0) * x + q); };
  double hi = 2.0;
  while (h(hi) <= 0.0) hi *= 2.0;
  double x = find_root(h, 1.0, hi, cfg);
  // One Newton step on the polynomial itself tightens the residual.
  const double f = std::pow(x, q + 1.0) - (q + 1.0) * x - q;
  const double df = (q + 1.0) * (std::pow(x, q) - 1.0);
  if (df > 0.0) {
    const double polished = x - f / df;
    if (std::abs(polished - x) <= cfg.root_tol) x = polished;
  }
  return x;
}

double mixture_bound(double t, double alpha) {
  require(t > 0.0 && std::isfinite(t), "t must be positive", t);
  require(alpha > 0.0 && std::isfinite(alpha), "alpha must be positive", alpha);
  const double s = t + alpha;
  return (alpha + 1.0) * std::exp(t / s * std::log(t) - std::log(s));
}

double norm_scale(double p) {
  require(p > 0.0 && std::isfinite(p), "p must be positive", p);
  return std::sqrt(2.0 * std::numbers::pi * p / std::numbers::e);
}

ShiftRoots shift_roots(double q, const ToleranceConfig& cfg) {
  ShiftRoots r;
  r.q = q;
  r.minimizing_shift = minimizing_shift(q, cfg);
  r.balance_point = balance_point(q, cfg);
  r.excess = r.balance_point - q * sharp_constants().w_inv_e;
  r.moment_at_minimum = shifted_moment(q, r.minimizing_shift, cfg).value;
  return r;
}

RatioValue shifted_exp_ratio(double p, double q, double t, const ToleranceConfig& cfg) {
  require(t >= 0.0 && std::isfinite(t), "t must be nonnegative", t);
  return ratio_with_error(ShiftedExponential{t}, p, q, cfg);
}

double default_shift_bound(double p) { return 10.0 * std::max(1.0, exponential_norm(p)); }

ShiftScanResult max_ratio_shifted_exp(double p, double q, const ToleranceConfig& cfg, double t_hi,
                                      std::size_t profile_points) {
  require_pair(p, q);
  cfg.validate();
  ShiftScanResult out;
  out.p = p;
  out.q = q;
  out.t_hi = t_hi > 0.0 ? t_hi : default_shift_bound(p);
  const auto log_ratio = [p, q, &cfg](double t) {
    return log_moment_at(p, t, cfg) / p - log_moment_at(q, t, cfg) / q;
  };
  const Maximum1d best = maximize_1d(log_ratio, 0.0, out.t_hi, cfg);
  out.t_star = best.argmax;
  out.ratio_star = std::exp(best.max);
  out.normalized = out.ratio_star * q / p;
  if (profile_points > 1) {
    out.profile.reserve(profile_points);
    for (std::size_t i = 0; i < profile_points; ++i) {
      const double t = out.t_hi * static_cast<double>(i) / static_cast<double>(profile_points - 1);
      out.profile.emplace_back(t, std::exp(log_ratio(t)));
    }
  }
  return out;
}

TruncScanResult max_ratio_trunc_exp(double p, double q, const TruncBox& box, std::size_t starts,
                                    const ToleranceConfig& cfg, std::uint64_t seed) {
  require_pair(p, q);
  cfg.validate();
  require(box.a.lo > 0.0 && box.a.hi > box.a.lo, "a range must be positive and nonempty", box.a.lo);
  require(box.b.lo > 0.0 && box.b.hi > box.b.lo, "b range must be positive and nonempty", box.b.lo);
  require(box.alpha.hi > box.alpha.lo, "alpha range must be nonempty", box.alpha.lo);

  const auto evaluate = [p, q, &cfg](double alpha, double a, double b) {
    return ratio_with_error(TruncatedExponential{a, b, alpha}, p, q, cfg, MomentRoute::quadrature);
  };
  const VectorFunction objective = [&evaluate](std::span<const double> x) {
    return std::log(evaluate(x[0], x[1], x[2]).value);
  };
  const Interval dims[3] = {box.alpha, box.a, box.b};
  const MaximumNd found = maximize_nd(objective, dims, starts, cfg, seed);

  double alpha = found.argmax[0];
  double a = found.argmax[1];
  double b = found.argmax[2];
  if (alpha < 0.0 && -alpha <= box.alpha.hi && -alpha >= box.alpha.lo && b <= box.a.hi && a <= box.b.hi &&
      b >= box.a.lo && a >= box.b.lo) {
    alpha = -alpha;
    std::swap(a, b);
  }
  RatioValue best = evaluate(alpha, a, b);
  if (a < box.a.hi) {
    const RatioValue edge = evaluate(alpha, box.a.hi, b);
    const double noise = (best.relative_error + edge.relative_error) * best.value +
                         16.0 * std::numeric_limits<double>::epsilon() * best.value;
    if (edge.value >= best.value - noise) {
      a = box.a.hi;
      best = edge;
    }
  }

  TruncScanResult out;
  out.p = p;
  out.q = q;
  out.box = box;
  out.best = TruncatedExponential{a, b, alpha};
  out.ratio = best.value;
  out.normalized = best.value * q / p;
  out.a_at_upper_edge = a >= box.a.hi;
  out.evaluations = found.evaluations;
  return out;
}

}  // namespace logmoment
