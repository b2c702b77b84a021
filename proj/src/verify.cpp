#include "logmoment/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "logmoment/error.hpp"
#include "logmoment/extremal.hpp"
#include "logmoment/specfun.hpp"

namespace logmoment {

namespace {

using Params = std::vector<std::pair<std::string, double>>;
using Records = std::vector<VerificationReport>;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kCenteringTolerance = 1e-8;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> out = linspace(std::log(lo), std::log(hi), n);
  for (double& x : out) x = std::exp(x);
  out.front() = lo;
  out.back() = hi;
  return out;
}

// Runs f(0..n-1) on up to `jobs` threads; results keep index order. The
// exception from the lowest failing index is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) fail(code, message);
}

void require_centered(const Distribution& d) {
  const double m = mean(d);
  if (!(std::abs(m) <= kCenteringTolerance)) {
    std::ostringstream msg;
    msg << "distribution is not centered: mean = " << m << " exceeds " << kCenteringTolerance;
    fail(ErrorCode::not_centered, msg.str());
  }
}

// Ratio relative error converted to the scale of the normalized ratio.
double ratio_caveat(const RatioValue& r, double scale) { return r.value * r.relative_error * scale; }

double log_g(double q) { return 0.5 * std::log(2.0 * std::numbers::pi * q) + stirling_correction(q); }

// t^{-q} I(q, t), the mass fraction that drives the reduced inequality.
LogValue log_integral_fraction(double q, double t, const ToleranceConfig& cfg) {
  const LogValue i = log_shift_integral(q, t, cfg);
  return {i.log_value - q * std::log(t), i.relative_error};
}

// --- grid checks -----------------------------------------------------------

Records gamma_root_ratio_decreasing(const ToleranceConfig&) {
  const std::string id = "gamma-root-ratio-decreasing";
  Records out;
  double prev_p = 1.0;
  double prev = exponential_norm(prev_p) / prev_p;
  for (int k = 1; k <= 990; ++k) {
    const double p = 1.0 + 0.1 * k;
    const double v = exponential_norm(p) / p;
    out.push_back(make_report(id, {{"p_prev", prev_p}, {"p", p}}, v, prev, 0.0));
    prev = v;
    prev_p = p;
  }
  return out;
}

Records stirling_remainder_decreasing(const ToleranceConfig&) {
  const std::string id = "stirling-remainder-decreasing";
  Records out;
  const auto xs = logspace(0.01, 1000.0, 400);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double mu = stirling_correction(xs[i]);
    out.push_back(make_report(id, {{"x", xs[i]}}, 0.0, mu, 0.0, "positive"));
    if (i + 1 < xs.size()) {
      out.push_back(make_report(id, {{"x", xs[i]}, {"x_next", xs[i + 1]}}, stirling_correction(xs[i + 1]), mu, 0.0,
                                "decreasing"));
    }
  }
  return out;
}

Records gamma_growth_scaling(const ToleranceConfig&) {
  const std::string id = "gamma-growth-scaling";
  Records out;
  for (double lambda : {1.5, 2.0, 3.0, 4.0}) {
    for (int x = 1; x <= 50; ++x) {
      out.push_back(make_report(id, {{"x", x}, {"lambda", lambda}}, gamma_growth(lambda * x),
                                std::sqrt(lambda) * gamma_growth(x), 0.0));
    }
  }
  return out;
}

// A_p^{-1/x} ‖E‖_x / x decreases just below x = p, which is the only place
// it is used; on the whole of (0, p] it does not (it rises for small x).
Records norm_scale_local_decrease(const ToleranceConfig&) {
  const std::string id = "norm-scale-local-decrease";
  Records out;
  for (double p : {2.0, 5.0, 10.0, 50.0}) {
    const double log_a = std::log(norm_scale(p));
    const auto f = [log_a](double x) { return std::exp(-log_a / x + log_exponential_norm(x) - std::log(x)); };
    const auto xs = linspace(p - 0.25, p, 26);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      out.push_back(make_report(id, {{"p", p}, {"x", xs[i]}, {"x_next", xs[i + 1]}}, f(xs[i + 1]), f(xs[i]), 0.0));
    }
  }
  return out;
}

Records mixture_bound_check(const ToleranceConfig&) {
  const std::string id = "mixture-bound";
  Records out;
  const double alpha_lo = 1.0 / (std::numbers::e - 1.0);
  for (double p : linspace(1.0, 60.0, 119)) {
    const double bound = norm_scale(p);
    for (double alpha : linspace(alpha_lo, 1.0, 41)) {
      const double t_low = std::exp(p * std::log(alpha) - log_gamma_p1(p));
      out.push_back(make_report(id, {{"p", p}, {"alpha", alpha}, {"t", t_low}}, mixture_bound(t_low, alpha), bound,
                                0.0, "lower shift"));
      const double log_t_high = p * std::log(alpha * p);
      if (log_t_high >= 0.0) {
        const double t_high = std::exp(log_t_high);
        out.push_back(make_report(id, {{"p", p}, {"alpha", alpha}, {"t", t_high}}, mixture_bound(t_high, alpha),
                                  bound, 0.0, "upper shift"));
      }
    }
  }
  return out;
}

Records endpoint_argmax(const ToleranceConfig&) {
  const std::string id = "endpoint-argmax";
  Records out;
  const double alpha_lo = 1.0 / (std::numbers::e - 1.0);
  const auto alphas = linspace(alpha_lo, 1.0, 1000);
  for (double p : linspace(2.0, 40.0, 39)) {
    const auto h = [p](double alpha) {
      const double x = std::exp((p - 1.0) * std::log(alpha) - log_gamma_p1(p));
      return (1.0 + x * x) / (1.0 + x);
    };
    double best = -std::numeric_limits<double>::infinity();
    double best_alpha = alpha_lo;
    for (double a : alphas) {
      const double v = h(a);
      if (v > best) {
        best = v;
        best_alpha = a;
      }
    }
    out.push_back(make_report(id, {{"p", p}, {"grid_argmax", best_alpha}}, best, h(alpha_lo), 1e-12));
  }
  return out;
}

Records square_root_bound(const ToleranceConfig&) {
  const std::string id = "square-root-bound";
  Records out;
  for (int k = 1; k <= 1000; ++k) {
    const double c = k / 3000.0;
    out.push_back(make_report(id, {{"c", c}}, 1.0 + c * c, std::sqrt(1.0 + c), 0.0));
  }
  return out;
}

Records right_endpoint_bound(const ToleranceConfig& cfg) {
  const std::string id = "right-endpoint-bound";
  Records out;
  for (double q : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double m = truncation_bound(q, cfg);
    const double residual = std::pow(m, q + 1.0) - (q + 1.0) * m - q;
    out.push_back(make_report(id, {{"q", q}, {"root", m}}, std::abs(residual), 1e-9, 0.0, "root residual"));
    for (double alpha : {0.0, 0.5, 2.0}) {
      for (double a : {0.1, 1.0, 5.0}) {
        for (double b : {0.1, 1.0, 5.0}) {
          const LogMoment lm = log_abs_moment(TruncatedExponential{a, b, alpha}, q, cfg);
          const double scaled_b = b * std::exp(-lm.log_value / q);
          out.push_back(make_report(id, {{"q", q}, {"alpha", alpha}, {"a", a}, {"b", b}}, scaled_b, m,
                                    scaled_b * lm.relative_error / q + cfg.root_tol, "scaled right end"));
        }
      }
    }
  }
  return out;
}

Records shift_root_ordering(const ToleranceConfig& cfg) {
  const std::string id = "shift-root-ordering";
  const double w = sharp_constants().w_inv_e;
  Records out;
  for (double q : logspace(1.0, 100.0, 40)) {
    const ShiftRoots r = shift_roots(q, cfg);
    const double root_slack = 2.0 * cfg.root_tol * (1.0 + r.minimizing_shift);
    out.push_back(make_report(id, {{"q", q}}, r.balance_point, r.minimizing_shift, root_slack,
                              "minimizer >= balance point"));
    out.push_back(make_report(id, {{"q", q}}, q * w, r.balance_point, root_slack, "balance point >= q W(1/e)"));
    const LogValue m = log_shifted_moment(q, r.minimizing_shift, cfg);
    const double deviation = std::abs(std::expm1(m.log_value - q * std::log(r.minimizing_shift)));
    out.push_back(make_report(id, {{"q", q}}, deviation, 1e-8,
                              m.relative_error + q * cfg.root_tol / r.minimizing_shift,
                              "moment at minimizer equals t^q"));
  }
  const double t2 = minimizing_shift(2.0, cfg);
  out.push_back(make_report(id, {{"q", 2.0}, {"t", t2}}, std::abs(t2 - 1.0), cfg.root_tol, 0.0, "minimizer at q=2 is 1"));
  return out;
}

Records excess_identity(const ToleranceConfig& cfg) {
  const std::string id = "excess-identity";
  const double w = sharp_constants().w_inv_e;
  Records out;
  for (double q : linspace(2.0, 40.0, 39)) {
    const double delta = balance_point(q, cfg) - q * w;
    const double log_lhs = delta + q * std::log1p(delta / (q * w));
    const double deviation = std::abs(std::expm1(log_lhs - log_g(q)));
    out.push_back(make_report(id, {{"q", q}, {"excess", delta}}, deviation, 1e-6, 8.0 * cfg.root_tol));
  }
  return out;
}

Records excess_bounds(const ToleranceConfig& cfg) {
  const std::string id = "excess-bounds";
  const double w = sharp_constants().w_inv_e;
  Records out;
  for (double q : linspace(2.0, 40.0, 39)) {
    const double rel = (balance_point(q, cfg) - q * w) / (q * w);
    const double slack = 2.0 * cfg.root_tol / (q * w);
    out.push_back(make_report(id, {{"q", q}}, rel, 1.0, slack, "relative excess <= 1"));
    out.push_back(make_report(id, {{"q", q}}, std::exp(2.0 * log_g(q) / (3.0 * q)), 1.0 + rel, slack,
                              "1 + relative excess >= g(q)^{2/(3q)}"));
    out.push_back(make_report(id, {{"q", q}}, gamma_growth(q), std::pow(2.0, q), 0.0, "g(q) <= 2^q"));
  }
  return out;
}

Records large_ratio_bound(const ToleranceConfig& cfg) {
  const std::string id = "large-ratio-bound";
  const double c0 = sharp_constants().c0;
  Records out;
  for (double q : {2.0, 3.0, 5.0, 10.0, 20.0}) {
    const double t_q = minimizing_shift(q, cfg);
    for (double lambda : {2.0, 3.0, 5.0, 10.0}) {
      const double p = lambda * q;
      out.push_back(make_report(id, {{"q", q}, {"p", p}, {"minimizing_shift", t_q}}, exponential_norm(p),
                                c0 * lambda * t_q, c0 * lambda * cfg.root_tol, "C0 (p/q) t_q >= norm of E"));
      for (double t : linspace(0.0, 3.0 * std::max(1.0, exponential_norm(p)), 30)) {
        const RatioValue r = shifted_exp_ratio(p, q, t, cfg);
        out.push_back(make_report(id, {{"q", q}, {"p", p}, {"t", t}}, r.value / lambda, c0,
                                  ratio_caveat(r, 1.0 / lambda), "normalized ratio <= C0"));
      }
    }
  }
  return out;
}

Records scaled_integral_decreasing(const ToleranceConfig& cfg) {
  const std::string id = "scaled-integral-decreasing";
  Records out;
  for (double t : {0.5, 1.0, 5.0, 20.0}) {
    LogValue prev = log_integral_fraction(0.5, t, cfg);
    for (int k = 2; k <= 40; ++k) {
      const double s = 0.5 * k;
      const LogValue cur = log_integral_fraction(s, t, cfg);
      const double a = std::exp(prev.log_value);
      const double b = std::exp(cur.log_value);
      out.push_back(make_report(id, {{"t", t}, {"s_prev", s - 0.5}, {"s", s}}, b, a,
                                a * prev.relative_error + b * cur.relative_error));
      prev = cur;
    }
  }
  return out;
}

Records moderate_ratio_bound(const ToleranceConfig& cfg) {
  const std::string id = "moderate-ratio-bound";
  Records out;
  for (double q : {1.0, 2.0, 5.0, 10.0}) {
    for (double lambda : {1.1, 1.5, 2.0}) {
      const double p = lambda * q;
      for (double t : linspace(0.1, 20.0, 25)) {
        const RatioValue r = shifted_exp_ratio(p, q, t, cfg);
        const double factor = std::max(std::pow(-std::expm1(-t), -1.0 / (2.0 * q)), std::exp(t / (2.0 * q)));
        out.push_back(make_report(id, {{"q", q}, {"p", p}, {"t", t}}, r.value, lambda * factor, ratio_caveat(r, 1.0)));
      }
    }
  }
  return out;
}

Records small_shift_bound(const ToleranceConfig& cfg) {
  const std::string id = "small-shift-bound";
  const auto& k = sharp_constants();
  Records out;
  for (double q : {2.0, 3.0, 5.0, 10.0, 20.0}) {
    for (double lambda : {1.05, 1.25, 1.5, 2.0}) {
      const double p = lambda * q;
      for (double r : linspace(0.0, 2.0 * k.r0, 15)) {
        const double t = r * q / std::numbers::e;
        const RatioValue rv = shifted_exp_ratio(p, q, t, cfg);
        out.push_back(make_report(id, {{"q", q}, {"p", p}, {"r", r}}, rv.value / lambda, k.c0,
                                  ratio_caveat(rv, 1.0 / lambda)));
      }
    }
  }
  return out;
}

Records integral_fraction_ninth(const ToleranceConfig& cfg) {
  const std::string id = "integral-fraction-ninth";
  const double r0 = sharp_constants().r0;
  Records out;
  for (double q : linspace(2.0, 40.0, 39)) {
    for (double r : linspace(2.0 * r0, 10.0, 20)) {
      const LogValue a = log_integral_fraction(q, r * q / std::numbers::e, cfg);
      const double alpha = std::exp(a.log_value);
      out.push_back(make_report(id, {{"q", q}, {"r", r}}, 1.0 / 9.0, alpha, alpha * a.relative_error));
    }
  }
  return out;
}

Records reduced_rhs_above_one(const ToleranceConfig& cfg) {
  const std::string id = "reduced-rhs-above-one";
  const auto& k = sharp_constants();
  Records out;
  for (double q : linspace(2.0, 40.0, 39)) {
    for (double r : linspace(2.0 * k.r0, 10.0, 20)) {
      const LogValue a = log_integral_fraction(q, r * q / std::numbers::e, cfg);
      const double rhs = std::exp(q * std::log(k.c0) +
                                  log_add_exp(a.log_value + q * std::log(r), -r * q / std::numbers::e + log_g(q)));
      out.push_back(make_report(id, {{"q", q}, {"r", r}}, 1.0, rhs, rhs * a.relative_error));
    }
  }
  return out;
}

// log of (α (r/λ)^{qλ} + sqrt(λ) e^{-rq/e} g(q))^{1/λ}
double log_reduced_lhs(double log_alpha, double q, double r, double lambda) {
  return log_add_exp(log_alpha + q * lambda * std::log(r / lambda),
                     0.5 * std::log(lambda) - r * q / std::numbers::e + log_g(q)) /
         lambda;
}

Records reduced_inequality_moderate_shift(const ToleranceConfig& cfg) {
  const std::string id = "reduced-inequality-moderate-shift";
  const auto& k = sharp_constants();
  Records out;
  for (double q : {2.0, 3.0, 5.0, 10.0, 20.0, 40.0}) {
    for (double r : linspace(2.0 * k.r0, std::numbers::e, 10)) {
      const LogValue a = log_integral_fraction(q, r * q / std::numbers::e, cfg);
      const double log_rhs = q * std::log(k.c0) +
                             log_add_exp(a.log_value + q * std::log(r), -r * q / std::numbers::e + log_g(q));
      for (double lambda : linspace(1.0, 2.0, 11)) {
        const double lhs = std::exp(log_reduced_lhs(a.log_value, q, r, lambda) - log_rhs);
        out.push_back(make_report(id, {{"q", q}, {"r", r}, {"lambda", lambda}}, lhs, 1.0,
                                  2.0 * lhs * a.relative_error, "lhs / rhs"));
      }
    }
  }
  return out;
}

Records large_shift_bound(const ToleranceConfig& cfg) {
  const std::string id = "large-shift-bound";
  const auto& k = sharp_constants();
  Records out;
  for (double q : {2.0, 3.0, 5.0, 10.0, 20.0}) {
    for (double lambda : {k.lambda0, 1.1, 1.5, 2.0, 4.0}) {
      const double p = lambda * q;
      for (double t : linspace(q, 10.0 * q, 10)) {
        const RatioValue rv = shifted_exp_ratio(p, q, t, cfg);
        out.push_back(make_report(id, {{"q", q}, {"p", p}, {"t", t}}, rv.value / lambda, k.c0,
                                  ratio_caveat(rv, 1.0 / lambda)));
      }
    }
  }
  return out;
}

Records auxiliary_inequalities(const ToleranceConfig& cfg) {
  const std::string id = "auxiliary-inequalities";
  const auto& k = sharp_constants();
  const double e = std::numbers::e;
  Records out;

  out.push_back(make_report(id, {}, 1.65, k.c0 * k.c0, 0.0, "C0^2 > 1.65"));
  out.push_back(make_report(id, {}, -0.4, std::log(1.0 - std::pow(k.c0, -4.0)), 0.0, "shift 0.4 suffices at q=2"));
  out.push_back(make_report(id, {}, std::sqrt(2.0), k.lambda0 * k.c0, 0.0, "lambda0 C0 = sqrt 2"));
  out.push_back(make_report(id, {}, k.lambda0, 1.1, 0.0, "lambda0 < 1.1"));
  const double tail_constant =
      9.0 * std::sqrt(1.1) * std::exp(-2.0) * gamma_growth(2.0) * std::pow(std::exp(-1.1) * std::pow(1.1, 1.1), 2.0);
  out.push_back(make_report(id, {}, tail_constant, 0.65, 0.0, "tail-to-body constant < 0.65"));

  for (double q : {2.0, 3.0, 5.0, 10.0, 20.0}) {
    for (double r : {e, 4.0, 6.0, 10.0}) {
      const double t = r * q / e;
      const LogValue a = log_integral_fraction(q, t, cfg);
      const double caveat = 2.0 * a.relative_error;
      for (double lambda : {1.0, 1.05, 1.1}) {
        const Params at = {{"q", q}, {"r", r}, {"lambda", lambda}};
        const double log_lhs = log_reduced_lhs(a.log_value, q, r, lambda);
        // Stronger form: the body term alone on the right.
        const double strong = std::exp(log_lhs - (q * std::log(k.c0) + a.log_value + q * std::log(r)));
        out.push_back(make_report(id, at, strong, 1.0, caveat, "reduced inequality, body-only right side"));
        // Tail-to-body ratio against its closed-form bound.
        const double log_tail_ratio = 0.5 * std::log(lambda) - t + log_g(q) -
                                      (a.log_value + q * lambda * std::log(r / lambda));
        const double log_tail_bound = std::log(9.0) + 0.5 * std::log(lambda) - q + log_g(q) +
                                      q * (lambda * std::log(lambda) - lambda);
        out.push_back(make_report(id, at, std::exp(log_tail_ratio - log_tail_bound), 1.0, caveat,
                                  "tail-to-body ratio bound"));
        // Body-dominated bound (1.65 α)^{1/λ} r^q λ^{-q}.
        const double log_body = (std::log(1.65) + a.log_value) / lambda + q * std::log(r) - q * std::log(lambda);
        out.push_back(make_report(id, at, std::exp(log_lhs - log_body), 1.0, caveat, "body-dominated bound"));
      }
    }
  }

  const double threshold = std::sqrt(e * e * e / (2.0 * std::numbers::pi));
  const double alpha_lo = 1.0 / (e - 1.0);
  for (double p : linspace(1.0, 2.0, 21)) {
    const double side = std::pow(p, -0.3) * std::pow(e - 1.0, 1.0 - p) + std::pow(p, 0.7);
    out.push_back(make_report(id, {{"p", p}}, threshold, side, 0.0, "small-order polynomial bound"));
    for (double alpha : linspace(alpha_lo, 1.0, 11)) {
      const double t0 = std::pow(alpha, p) / p;
      const double lhs = (alpha + 1.0) / (std::pow(p, 0.7) * (t0 + alpha));
      out.push_back(make_report(id, {{"p", p}, {"alpha", alpha}}, lhs, std::sqrt(2.0 * std::numbers::pi / e), 0.0,
                                "small-order bound"));
    }
  }
  return out;
}

using GadgetFn = Records (*)(const ToleranceConfig&);

const std::vector<std::pair<std::string, GadgetFn>>& gadget_table() {
  static const std::vector<std::pair<std::string, GadgetFn>> table = {
      {"gamma-root-ratio-decreasing", gamma_root_ratio_decreasing},
      {"stirling-remainder-decreasing", stirling_remainder_decreasing},
      {"gamma-growth-scaling", gamma_growth_scaling},
      {"norm-scale-local-decrease", norm_scale_local_decrease},
      {"mixture-bound", mixture_bound_check},
      {"endpoint-argmax", endpoint_argmax},
      {"square-root-bound", square_root_bound},
      {"right-endpoint-bound", right_endpoint_bound},
      {"shift-root-ordering", shift_root_ordering},
      {"excess-identity", excess_identity},
      {"excess-bounds", excess_bounds},
      {"large-ratio-bound", large_ratio_bound},
      {"scaled-integral-decreasing", scaled_integral_decreasing},
      {"moderate-ratio-bound", moderate_ratio_bound},
      {"small-shift-bound", small_shift_bound},
      {"integral-fraction-ninth", integral_fraction_ninth},
      {"reduced-rhs-above-one", reduced_rhs_above_one},
      {"reduced-inequality-moderate-shift", reduced_inequality_moderate_shift},
      {"large-shift-bound", large_shift_bound},
      {"auxiliary-inequalities", auxiliary_inequalities},
  };
  return table;
}

}  // namespace

VerificationReport make_report(std::string check_id, std::vector<std::pair<std::string, double>> params,
                               double lhs, double rhs, double caveat, std::string note) {
  VerificationReport r;
  r.check_id = std::move(check_id);
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.numeric_caveat = caveat + 8.0 * kEps * (std::abs(lhs) + std::abs(rhs));
  r.pass = r.margin >= -r.numeric_caveat;
  r.note = std::move(note);
  return r;
}

bool recomputed_pass(const VerificationReport& r) { return r.rhs - r.lhs >= -r.numeric_caveat; }

ScanResult summarize(std::string check_id, std::vector<VerificationReport> records,
                     std::optional<std::uint64_t> seed) {
  ScanResult s;
  s.check_id = std::move(check_id);
  s.seed = seed;
  s.n_points = records.size();
  double worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const VerificationReport& r = records[i];
    if (!r.pass) {
      ++s.n_fail;
      s.failures.push_back({i, std::nullopt, r});
    }
    const double slack = r.margin + r.numeric_caveat;
    if (i == 0 || slack < worst_slack) {
      worst_slack = slack;
      s.worst = r;
    }
  }
  s.records = std::move(records);
  return s;
}

VerificationReport verify_symmetric_positive(const Distribution& d, double p, double q,
                                             const ToleranceConfig& cfg) {
  require(q >= 1.0 && p >= q && std::isfinite(p), ErrorCode::domain, "requires p >= q >= 1");
  require(is_symmetric(d) || is_nonnegative(d), ErrorCode::domain,
          "distribution " + describe(d) + " is neither symmetric nor nonnegative");
  const RatioValue r = ratio_with_error(d, p, q, cfg);
  const double exponential_ratio = p == q ? 1.0 : std::exp(log_exponential_norm(p) - log_exponential_norm(q));
  std::ostringstream note;
  note.precision(17);
  note << "weaker bound p/q = " << p / q << (r.value <= p / q ? " also holds" : " violated");
  return make_report("symmetric-positive-bound", {{"p", p}, {"q", q}}, r.value, exponential_ratio,
                     ratio_caveat(r, 1.0), note.str());
}

VerificationReport verify_zero_mean(const Distribution& d, double p, double q, const ToleranceConfig& cfg) {
  require(q >= 1.0 && p >= q && std::isfinite(p), ErrorCode::domain, "requires p >= q >= 1");
  require_centered(d);
  const RatioValue r = ratio_with_error(d, p, q, cfg);
  return make_report("zero-mean-bound", {{"p", p}, {"q", q}}, r.value, p / q, ratio_caveat(r, 1.0));
}

VerificationReport verify_general(const Distribution& d, double p, double q, const ToleranceConfig& cfg,
                                  bool exploratory) {
  require(q > 0.0 && p > q && std::isfinite(p), ErrorCode::domain, "requires p > q > 0");
  if (q < 2.0 && !exploratory) {
    fail(ErrorCode::domain, "the C0 p/q bound is only claimed for q >= 2; pass the exploratory flag to run anyway");
  }
  const RatioValue r = ratio_with_error(d, p, q, cfg);
  return make_report("general-bound", {{"p", p}, {"q", q}}, r.value, sharp_constants().c0 * p / q,
                     ratio_caveat(r, 1.0), q < 2.0 ? "outside theorem range (q < 2), exploratory" : "");
}

VerificationReport verify_grunbaum(const Distribution& d, const ToleranceConfig&) {
  require_centered(d);
  const double m = mean(d);
  const double r = prob_negative(d);
  // A residual mean m moves P(X < 0) by at most density(0) |m| to first order.
  const double caveat = density(d, 0.0) * std::abs(m);
  return make_report("grunbaum", {{"mean", m}}, std::exp(-1.0), r, caveat);
}

ScanResult verify_subfactorial_moments(unsigned n_max, const ToleranceConfig& cfg) {
  require(n_max >= 2 && n_max <= 20 && n_max % 2 == 0, ErrorCode::domain, "n_max must be even, in [2, 20]");
  const std::string id = "subfactorial-moments";
  Records out;
  for (unsigned n = 2; n <= n_max; n += 2) {
    const double exact = static_cast<double>(subfactorial(n));
    const MomentValue m = abs_moment(GammaShift{}, n, cfg);
    out.push_back(make_report(id, {{"n", n}}, std::abs(m.value - exact), 1e-10 * exact, m.abs_error_estimate,
                              "moment equals subfactorial"));
    const RatioValue r = ratio_with_error(GammaShift{}, n, 2.0, cfg);
    const double expected = std::pow(exact, 1.0 / n);
    out.push_back(make_report(id, {{"n", n}}, std::abs(r.value - expected), 1e-10 * expected, ratio_caveat(r, 1.0),
                              "norm ratio equals subfactorial root"));
  }
  return summarize(id, std::move(out));
}

ScanResult verify_sharpness(double q, const std::vector<double>& p_list, const ToleranceConfig& cfg) {
  require(q >= 2.0 && std::isfinite(q), ErrorCode::domain, "sharpness check needs q >= 2");
  require(!p_list.empty(), ErrorCode::invalid_argument, "p list is empty");
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    require(p_list[i] > q && (i == 0 || p_list[i] > p_list[i - 1]), ErrorCode::domain,
            "p list must be increasing and above q");
  }
  const std::string id = "sharp-constant-approach";
  const auto& k = sharp_constants();
  const double t = k.w_inv_e * q;
  Records out;
  std::vector<std::pair<double, double>> values;  // normalized, caveat
  for (double p : p_list) {
    const RatioValue r = shifted_exp_ratio(p, q, t, cfg);
    const double normalized = r.value * q / p;
    const double caveat = ratio_caveat(r, q / p);
    values.emplace_back(normalized, caveat);
    out.push_back(make_report(id, {{"q", q}, {"p", p}, {"t", t}}, normalized, k.c0 + 1e-9, caveat, "at most C0"));
  }
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    out.push_back(make_report(id, {{"q", q}, {"p", p_list[i]}, {"p_next", p_list[i + 1]}}, values[i].first,
                              values[i + 1].first, values[i].second + values[i + 1].second, "increasing in p"));
  }
  const double p_last = p_list.back();
  const double lower = k.c0 * std::exp(-t / p_last) * std::exp(-std::log1p(gamma_growth(q)) / q);
  out.push_back(make_report(id, {{"q", q}, {"p", p_last}, {"t", t}}, lower, values.back().first,
                            values.back().second, "last value above C0 e^{-t/p} (1+g(q))^{-1/q}"));
  return summarize(id, std::move(out));
}

const std::vector<std::string>& gadget_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [id, fn] : gadget_table()) v.push_back(id);
    return v;
  }();
  return ids;
}

ScanResult run_gadget(std::string_view id, const ToleranceConfig& cfg) {
  cfg.validate();
  for (const auto& [name, fn] : gadget_table()) {
    if (name == id) return summarize(name, fn(cfg));
  }
  fail(ErrorCode::unknown_check, "unknown grid check '" + std::string(id) + "'");
}

ScanResult verify_gadgets(const ToleranceConfig& cfg, unsigned jobs) {
  cfg.validate();
  const auto& table = gadget_table();
  const auto parts = parallel_map<Records>(table.size(), jobs, [&](std::size_t i) { return table[i].second(cfg); });
  Records all;
  for (const auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  return summarize("gadget-battery", std::move(all));
}

ScanResult fuzz_theorems(std::uint64_t seed, std::size_t n_cases, Range p_range, Range q_range,
                         const ToleranceConfig& cfg, unsigned jobs) {
  cfg.validate();
  require(q_range.lo >= 1.0 && q_range.hi >= q_range.lo, ErrorCode::invalid_argument,
          "q range must satisfy 1 <= lo <= hi");
  require(p_range.hi >= p_range.lo && p_range.lo > 0.0, ErrorCode::invalid_argument, "p range must satisfy 0 < lo <= hi");

  struct CaseResult {
    Records records;
    std::vector<Distribution> distributions;
    bool skipped = false;
  };
  const auto run_case = [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<unsigned> complexity_draw(0, 6);
    const unsigned complexity = complexity_draw(rng);
    const Distribution d = random_log_concave(rng(), complexity);
    const auto draw_pair = [&rng, &p_range](double q_lo, double q_hi) {
      const double q = std::uniform_real_distribution<double>(q_lo, q_hi)(rng);
      const double p = std::uniform_real_distribution<double>(std::max(p_range.lo, q), std::max(p_range.hi, q))(rng);
      return std::pair{p, q};
    };
    CaseResult out;
    const double index = static_cast<double>(i);
    const auto [p, q] = draw_pair(q_range.lo, q_range.hi);
    const Distribution centered = center(d);
    if (std::abs(mean(centered)) > kCenteringTolerance) {
      out.skipped = true;
    } else {
      VerificationReport r = verify_zero_mean(centered, p, q, cfg);
      r.params.insert(r.params.begin(), {"case", index});
      out.records.push_back(std::move(r));
      out.distributions.push_back(centered);
    }
    const double q2_lo = std::max(2.0, q_range.lo);
    if (q2_lo < q_range.hi) {
      const auto [p2, q2] = draw_pair(q2_lo, q_range.hi);
      if (p2 > q2) {
        VerificationReport r = verify_general(d, p2, q2, cfg);
        r.params.insert(r.params.begin(), {"case", index});
        out.records.push_back(std::move(r));
        out.distributions.push_back(d);
      }
    }
    return out;
  };
  const auto cases = parallel_map<CaseResult>(n_cases, jobs, run_case);

  Records records;
  std::vector<const Distribution*> sources;
  std::size_t skipped = 0;
  for (const CaseResult& c : cases) {
    skipped += c.skipped ? 1 : 0;
    for (std::size_t j = 0; j < c.records.size(); ++j) {
      records.push_back(c.records[j]);
      sources.push_back(&c.distributions[j]);
    }
  }
  ScanResult s = summarize("fuzz", std::move(records), seed);
  s.n_skipped = skipped;
  for (FailureRecord& f : s.failures) f.distribution = *sources[f.index];
  return s;
}

ScanResult scan_shift_bound(Range p_range, Range q_range, unsigned steps, const ToleranceConfig& cfg,
                            unsigned jobs) {
  cfg.validate();
  require(steps >= 1, ErrorCode::invalid_argument, "steps must be at least 1");
  require(q_range.lo > 0.0 && q_range.hi >= q_range.lo && p_range.hi >= p_range.lo, ErrorCode::invalid_argument,
          "ranges must satisfy 0 < lo <= hi");
  std::vector<std::pair<double, double>> grid;
  for (double p : linspace(p_range.lo, p_range.hi, steps)) {
    for (double q : linspace(q_range.lo, q_range.hi, steps)) {
      if (p > q) grid.emplace_back(p, q);
    }
  }
  const double c0 = sharp_constants().c0;
  const auto records = parallel_map<VerificationReport>(grid.size(), jobs, [&](std::size_t i) {
    const auto [p, q] = grid[i];
    const ShiftScanResult s = max_ratio_shifted_exp(p, q, cfg);
    const RatioValue at_star = shifted_exp_ratio(p, q, s.t_star, cfg);
    return make_report("shift-scan-bound", {{"p", p}, {"q", q}, {"t_star", s.t_star}, {"ratio_star", s.ratio_star}},
                       s.normalized, c0 + 1e-9, ratio_caveat(at_star, q / p));
  });
  return summarize("shift-scan-bound", records);
}

ScanResult verify_trunc_consistency(const std::vector<std::pair<double, double>>& pairs, std::size_t starts,
                                    const ToleranceConfig& cfg) {
  const std::string id = "trunc-exp-consistency";
  Records out;
  for (const auto& [p, q] : pairs) {
    const ShiftScanResult shift = max_ratio_shifted_exp(p, q, cfg);
    const TruncScanResult trunc = max_ratio_trunc_exp(p, q, TruncBox{}, starts, cfg);
    const Params at = {{"p", p},
                       {"q", q},
                       {"alpha", trunc.best.alpha},
                       {"a", trunc.best.a},
                       {"b", trunc.best.b},
                       {"shift_ratio", shift.ratio_star}};
    out.push_back(make_report(id, at, trunc.ratio, shift.ratio_star + 1e-5, 0.0,
                              "truncated-exponential maximum within 1e-5 of shift maximum"));
    out.push_back(make_report(id, at, trunc.box.a.hi, trunc.best.a, 0.0,
                              "boundary-drift diagnostic: maximizing a on the upper box edge"));
  }
  return summarize(id, std::move(out));
}

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> registry = [] {
    std::vector<CheckInfo> v = {
        {"symmetric-positive-bound", CheckKind::distribution,
         "symmetric or nonnegative X: ‖X‖_p/‖X‖_q <= ‖E‖_p/‖E‖_q <= p/q (params p, q)"},
        {"zero-mean-bound", CheckKind::distribution, "mean-zero X: ‖X‖_p <= (p/q) ‖X‖_q (params p, q)"},
        {"general-bound", CheckKind::distribution, "any X, q >= 2: ‖X‖_p <= C0 (p/q) ‖X‖_q (params p, q)"},
        {"grunbaum", CheckKind::distribution, "mean-zero X: P(X < 0) >= 1/e"},
        {"subfactorial-moments", CheckKind::campaign, "E(E-1)^n = !n for even n <= n_max (param n_max)"},
        {"sharp-constant-approach", CheckKind::campaign,
         "normalized ratio at t = W(1/e) q along increasing p (params q, p list)"},
        {"trunc-exp-consistency", CheckKind::campaign,
         "truncated-exponential search vs shift search (params p list, q list, starts)"},
        {"shift-scan-bound", CheckKind::campaign, "shift search over a (p, q) grid stays below C0 (params p, q, steps)"},
        {"fuzz", CheckKind::campaign, "random potentials against both moment bounds (params n, p, q)"},
        {"gadget-battery", CheckKind::campaign, "every grid check below"},
    };
    const std::map<std::string, std::string> summaries = {
        {"gamma-root-ratio-decreasing", "Γ(p+1)^{1/p}/p strictly decreasing on p = 1, 1.1, ..., 100"},
        {"stirling-remainder-decreasing", "Stirling remainder positive and decreasing on (0, 1000]"},
        {"gamma-growth-scaling", "g(λx) <= sqrt(λ) g(x) for x = 1..50"},
        {"norm-scale-local-decrease", "A_p^{-1/x} ‖E‖_x / x decreasing on [p - 1/4, p]"},
        {"mixture-bound", "(α+1) t^{t/(t+α)}/(t+α) <= sqrt(2πp/e) at both extreme shifts"},
        {"endpoint-argmax", "(1+x^2)/(1+x), x = α^{p-1}/Γ(p+1), maximal at α = 1/(e-1)"},
        {"square-root-bound", "1 + c^2 <= sqrt(1 + c) on (0, 1/3]"},
        {"right-endpoint-bound", "α >= 0 truncated exponentials: b / ‖X‖_q <= M_q"},
        {"shift-root-ordering", "minimizing shift >= balance point >= q W(1/e); minimizer at q=2 is 1"},
        {"excess-identity", "e^Δ (1 + Δ/(q W(1/e)))^q = g(q) to 1e-6"},
        {"excess-bounds", "bounds on the balance-point excess Δ"},
        {"large-ratio-bound", "p/q >= 2: normalized shifted-exponential ratio <= C0"},
        {"scaled-integral-decreasing", "s -> t^{-s} I(s, t) decreasing"},
        {"moderate-ratio-bound", "p <= 2q: ratio <= (p/q) max((1-e^{-t})^{-1/2q}, e^{t/2q})"},
        {"small-shift-bound", "t <= 2 W(1/e) q: normalized ratio <= C0"},
        {"integral-fraction-ninth", "t^{-q} I(q, t) >= 1/9 for t >= 2 W(1/e) q"},
        {"reduced-rhs-above-one", "C0^q (α r^q + e^{-rq/e} g(q)) >= 1"},
        {"reduced-inequality-moderate-shift", "reduced inequality for r in [2 r0, e], λ in [1, 2]"},
        {"large-shift-bound", "t >= q, p/q >= sqrt(2)/C0: normalized ratio <= C0"},
        {"auxiliary-inequalities", "numeric constants and intermediate bounds of the large-shift case"},
    };
    for (const std::string& id : gadget_ids()) v.push_back({id, CheckKind::grid, summaries.at(id)});
    return v;
  }();
  return registry;
}

ParamMap parse_grid(std::string_view spec) {
  ParamMap out;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string_view::npos) comma = spec.size();
    const std::string_view item = spec.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      std::ostringstream msg;
      msg << "grid spec: expected key=value at offset " << pos << ", found '" << item << "'";
      fail(ErrorCode::parse, msg.str());
    }
    const std::string key(item.substr(0, eq));
    std::vector<double> values;
    std::size_t vpos = eq + 1;
    while (vpos <= item.size()) {
      std::size_t colon = item.find(':', vpos);
      if (colon == std::string_view::npos) colon = item.size();
      const std::string token(item.substr(vpos, colon - vpos));
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (token.empty() || end != token.c_str() + token.size()) {
        std::ostringstream msg;
        msg << "grid spec: expected a number at offset " << pos + vpos << ", found '" << token << "'";
        fail(ErrorCode::parse, msg.str());
      }
      values.push_back(v);
      vpos = colon + 1;
    }
    out[key] = std::move(values);
    pos = comma + 1;
  }
  return out;
}

namespace {

class ParamReader {
 public:
  ParamReader(const std::string& id, const ParamMap& params) : id_(id), params_(params) {}

  double scalar(const std::string& key, double fallback) {
    const auto values = list(key, {fallback});
    if (values.size() != 1) fail(ErrorCode::invalid_argument, id_ + ": parameter '" + key + "' takes one value");
    return values.front();
  }

  std::vector<double> list(const std::string& key, std::vector<double> fallback) {
    used_.insert(key);
    const auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  Range range(const std::string& key, Range fallback) {
    const auto values = list(key, {fallback.lo, fallback.hi});
    if (values.size() != 2) fail(ErrorCode::invalid_argument, id_ + ": parameter '" + key + "' takes lo:hi");
    return {values[0], values[1]};
  }

  void finish() const {
    for (const auto& [key, values] : params_) {
      if (!used_.count(key)) fail(ErrorCode::invalid_argument, id_ + ": unexpected parameter '" + key + "'");
    }
  }

 private:
  std::string id_;
  const ParamMap& params_;
  std::set<std::string> used_;
};

unsigned as_count(double v, const std::string& what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) fail(ErrorCode::invalid_argument, what + " must be a whole number");
  return static_cast<unsigned>(v);
}

}  // namespace

CheckOutcome run_check(const CheckRequest& request, const ToleranceConfig& cfg) {
  cfg.validate();
  const auto& registry = check_registry();
  const auto info = std::find_if(registry.begin(), registry.end(),
                                 [&](const CheckInfo& c) { return c.id == request.id; });
  if (info == registry.end()) fail(ErrorCode::unknown_check, "unknown check '" + request.id + "' (see --list)");
  const std::string& id = info->id;
  ParamReader params(id, request.params);

  if (info->kind == CheckKind::distribution) {
    if (!request.distribution) fail(ErrorCode::invalid_argument, id + " needs a distribution");
    const Distribution& d = *request.distribution;
    if (id == "grunbaum") {
      params.finish();
      return verify_grunbaum(d, cfg);
    }
    const double p = params.scalar("p", 4.0);
    const double q = params.scalar("q", 2.0);
    params.finish();
    if (id == "symmetric-positive-bound") return verify_symmetric_positive(d, p, q, cfg);
    if (id == "zero-mean-bound") return verify_zero_mean(d, p, q, cfg);
    return verify_general(d, p, q, cfg, request.exploratory);
  }
  if (request.distribution) fail(ErrorCode::invalid_argument, id + " does not take a distribution");

  if (info->kind == CheckKind::grid) {
    params.finish();
    return run_gadget(id, cfg);
  }
  if (id == "subfactorial-moments") {
    const unsigned n_max = as_count(params.scalar("n_max", 12.0), "n_max");
    params.finish();
    return verify_subfactorial_moments(n_max, cfg);
  }
  if (id == "sharp-constant-approach") {
    const double q = params.scalar("q", 2.0);
    const auto p_list = params.list("p", {10.0, 50.0, 100.0, 500.0});
    params.finish();
    return verify_sharpness(q, p_list, cfg);
  }
  if (id == "trunc-exp-consistency") {
    const auto ps = params.list("p", {3.0, 4.0, 6.0, 10.0});
    const auto qs = params.list("q", {1.0, 2.0, 2.0, 4.0});
    const unsigned starts = as_count(params.scalar("starts", 8.0), "starts");
    params.finish();
    if (ps.size() != qs.size()) fail(ErrorCode::invalid_argument, "p and q lists must have equal length");
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < ps.size(); ++i) pairs.emplace_back(ps[i], qs[i]);
    return verify_trunc_consistency(pairs, std::max(1u, starts), cfg);
  }
  if (id == "shift-scan-bound") {
    const Range p = params.range("p", {2.1, 100.0});
    const Range q = params.range("q", {2.0, 100.0});
    const unsigned steps = as_count(params.scalar("steps", 8.0), "steps");
    params.finish();
    return scan_shift_bound(p, q, steps, cfg, request.jobs);
  }
  if (id == "fuzz") {
    const unsigned n = as_count(params.scalar("n", 100.0), "n");
    const Range p = params.range("p", {1.0, 20.0});
    const Range q = params.range("q", {1.0, 20.0});
    params.finish();
    return fuzz_theorems(request.seed, n, p, q, cfg, request.jobs);
  }
  params.finish();
  return verify_gadgets(cfg, request.jobs);
}

bool passed(const CheckOutcome& outcome) {
  if (const auto* r = std::get_if<VerificationReport>(&outcome)) return r->pass;
  return std::get<ScanResult>(outcome).n_fail == 0;
}

}  // namespace logmoment
