#include "logmoment/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "logmoment/error.hpp"

namespace logmoment {

namespace {

constexpr double kShiftThreshold = 15.0;
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// B_{2k} / (2k (2k - 1)) for k = 1..8.
constexpr std::array<double, 8> kStirlingCoefficients = {
    1.0 / 12.0,          -1.0 / 360.0,    1.0 / 1260.0,   -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0};

double stirling_series(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double sum = 0.0;
  for (auto it = kStirlingCoefficients.rbegin(); it != kStirlingCoefficients.rend(); ++it) {
    sum = sum * inv2 + *it;
  }
  return sum * inv;
}

// x log x - x + log(2πx)/2, the Stirling part of log Γ(x+1).
double stirling_log(double x) { return x * std::log(x) - x + 0.5 * (kLogTwoPi + std::log(x)); }

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) {
    std::ostringstream msg;
    msg << what << " requires a nonnegative argument, got " << x;
    fail(ErrorCode::domain, msg.str());
  }
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) {
    std::ostringstream msg;
    msg << what << " requires a positive argument, got " << x;
    fail(ErrorCode::domain, msg.str());
  }
}

// Γ(x+1) for x >= kShiftThreshold, split so the power does not overflow early.
double gamma_p1_large(double x) {
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const double half = std::pow(x, 0.5 * x) * std::exp(-0.5 * x);
  return half * half * std::sqrt(2.0 * std::numbers::pi * x) * std::exp(stirling_series(x));
}

}  // namespace

double stirling_correction(double x) {
  require_positive(x, "stirling_correction");
  if (x >= kShiftThreshold) return stirling_series(x);
  // Γ(x+1) = Γ(y+1) / ((x+1)...(x+n)) with y = x + n above the threshold.
  const int n = static_cast<int>(std::ceil(kShiftThreshold - x));
  const double y = x + n;
  double log_product = 0.0;
  for (int k = 1; k <= n; ++k) log_product += std::log(x + k);
  return stirling_series(y) + stirling_log(y) - log_product - stirling_log(x);
}

double gamma_p1(double x) {
  require_nonnegative(x, "gamma_p1");
  if (x == std::floor(x) && x <= 22.0) {
    double result = 1.0;  // exact in double up to 22!
    for (int k = 2; k <= static_cast<int>(x); ++k) result *= k;
    return result;
  }
  if (x >= kShiftThreshold) return gamma_p1_large(x);
  const int n = static_cast<int>(std::ceil(kShiftThreshold - x));
  double product = 1.0;
  for (int k = 1; k <= n; ++k) product *= x + k;
  return gamma_p1_large(x + n) / product;
}

double log_gamma_p1(double x) {
  require_nonnegative(x, "log_gamma_p1");
  if (x == 0.0) return 0.0;
  if (x < kShiftThreshold) return std::log(gamma_p1(x));
  return stirling_log(x) + stirling_series(x);
}

double gamma_growth(double x) {
  require_positive(x, "gamma_growth");
  return std::sqrt(2.0 * std::numbers::pi * x) * std::exp(stirling_correction(x));
}

double lambert_w(double y) {
  require_nonnegative(y, "lambert_w");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return y;

  if (y > std::numbers::e) {
    // Newton on w + log w - log y = 0 stays clear of overflow.
    const double log_y = std::log(y);
    const double log_log_y = std::log(log_y);
    double w = log_y - log_log_y + log_log_y / log_y;
    for (int iter = 0; iter < 60; ++iter) {
      const double h = w + std::log(w) - log_y;
      const double step = h / (1.0 + 1.0 / w);
      w -= step;
      if (std::abs(step) <= 2.0 * std::numeric_limits<double>::epsilon() * w) break;
    }
    return w;
  }

  // Halley on w e^w - y.
  double w = std::log1p(y);
  for (int iter = 0; iter < 60; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) break;
  }
  return w;
}

double log_exponential_norm(double s) {
  require_positive(s, "exponential_norm");
  return log_gamma_p1(s) / s;
}

double exponential_norm(double s) { return std::exp(log_exponential_norm(s)); }

std::uint64_t subfactorial(unsigned n) {
  // !0 = 1, !n = n * !(n-1) + (-1)^n
  std::uint64_t value = 1;
  for (unsigned k = 1; k <= n; ++k) {
    std::uint64_t scaled = 0;
    if (__builtin_mul_overflow(value, static_cast<std::uint64_t>(k), &scaled)) {
      std::ostringstream msg;
      msg << "subfactorial(" << n << ") exceeds 64-bit range";
      fail(ErrorCode::overflow, msg.str());
    }
    value = (k % 2 == 0) ? scaled + 1 : scaled - 1;
  }
  return value;
}

const SharpConstants& sharp_constants() {
  static const SharpConstants constants = [] {
    SharpConstants c{};
    c.w_inv_e = lambert_w(1.0 / std::numbers::e);
    c.c0 = std::exp(c.w_inv_e);
    c.r0 = std::numbers::e * c.w_inv_e;
    c.lambda0 = std::numbers::sqrt2 / c.c0;
    return c;
  }();
  return constants;
}

}  // namespace logmoment
