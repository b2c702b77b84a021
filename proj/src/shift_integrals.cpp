#include "logmoment/shift_integrals.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "logmoment/error.hpp"
#include "logmoment/specfun.hpp"

namespace logmoment {

namespace {

void check_arguments(double s, double t) {
  if (!(s > 0.0) || !(t >= 0.0) || !std::isfinite(s) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << "shifted-exponential moments need s > 0 and t >= 0 (got s = " << s
        << ", t = " << t << ")";
    fail(ErrorCode::domain, msg.str());
  }
}

}  // namespace

LogValue log_shift_integral(double s, double t, const ToleranceConfig& cfg) {
  check_arguments(s, t);
  if (t == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};

  const double order = s + 1.0;
  const auto integrand = [order, t](double z) {
    return std::exp(-z + t * std::expm1(-z / order));
  };
  // Beyond `cut` the integrand is below e^{-cut}; J (s+1) >= 1 / (1 + t/(s+1)),
  // so the discarded tail is at most e^{-cut} (1 + t/(s+1)) relative.
  const double cut = cfg.tail_cut_log + std::log1p(t / order) + 1.0;
  const QuadResult body = integrate(integrand, 0.0, cut, cfg);
  const double tail = std::exp(-cut + t * std::expm1(-cut / order));
  const double j_scaled = body.value;  // (s+1) J
  const double rel = (body.abs_error_estimate + tail) / j_scaled;
  return {order * std::log(t) + std::log(j_scaled) - std::log(order), rel};
}

LogValue log_shifted_moment(double s, double t, const ToleranceConfig& cfg) {
  check_arguments(s, t);
  const LogValue integral = log_shift_integral(s, t, cfg);
  const double log_tail = -t + log_gamma_p1(s);
  const double log_m = log_add_exp(integral.log_value, log_tail);
  // Only the I part carries quadrature error.
  const double weight = integral.log_value == -std::numeric_limits<double>::infinity()
                            ? 0.0
                            : std::exp(integral.log_value - log_m);
  return {log_m, integral.relative_error * weight};
}

QuadResult shift_integral(double s, double t, const ToleranceConfig& cfg) {
  const LogValue v = log_shift_integral(s, t, cfg);
  const double value = std::exp(v.log_value);
  return {value, value * v.relative_error, 0};
}

QuadResult shifted_moment(double s, double t, const ToleranceConfig& cfg) {
  const LogValue v = log_shifted_moment(s, t, cfg);
  const double value = std::exp(v.log_value);
  return {value, value * v.relative_error, 0};
}

}  // namespace logmoment
