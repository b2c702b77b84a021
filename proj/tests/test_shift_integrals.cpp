#include <doctest.h>

#include <cmath>
#include <numbers>

#include "logmoment/distributions.hpp"
#include "logmoment/extremal.hpp"
#include "logmoment/shift_integrals.hpp"
#include "oracles.hpp"

using namespace logmoment;

namespace {

const ToleranceConfig cfg;

double binomial(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

// E(E - t)^n for integer n, from E E^k = k!.
double polynomial_moment(int n, double t) {
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) sum += binomial(n, k) * std::tgamma(k + 1.0) * std::pow(-t, n - k);
  return sum;
}

}  // namespace

TEST_CASE("I(s, t): closed forms") {
  for (double t : {0.1, 1.0, 2.5, 7.0}) {
    CAPTURE(t);
    CHECK(shift_integral(1.0, t, cfg).value == doctest::Approx(t - 1.0 + std::exp(-t)).epsilon(1e-12));
    CHECK(shift_integral(2.0, t, cfg).value ==
          doctest::Approx(t * t - 2.0 * t + 2.0 - 2.0 * std::exp(-t)).epsilon(1e-12));
  }
  CHECK(shift_integral(1.0, 1.0, cfg).value == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(shift_integral(2.0, 1.0, cfg).value == doctest::Approx(1.0 - 2.0 / std::numbers::e).epsilon(1e-13));
  CHECK(shift_integral(3.5, 0.0, cfg).value == 0.0);
  CHECK(log_shift_integral(3.5, 0.0, cfg).log_value == -INFINITY);
}

TEST_CASE("I(s, t): against Simpson and its upper bound") {
  for (double s : {0.3, 0.5, 1.7, 6.0, 25.0}) {
    for (double t : {0.2, 1.0, 4.0, 15.0}) {
      CAPTURE(s);
      CAPTURE(t);
      const double oracle =
          oracle::simpson_soft_ends([&](double x) { return std::exp(x - t) * std::pow(x, s); }, 0.0, t);
      const double v = shift_integral(s, t, cfg).value;
      CHECK(v == doctest::Approx(oracle).epsilon(1e-8));
      CHECK(v >= 0.0);
      CHECK(v <= -std::expm1(-t) * std::pow(t, s) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("m_s(t): integer orders against polynomial moments") {
  CHECK(shifted_moment(3.0, 0.0, cfg).value == doctest::Approx(6.0).epsilon(1e-13));
  CHECK(shifted_moment(2.0, 1.0, cfg).value == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(shifted_moment(2.0, 3.0, cfg).value == doctest::Approx(5.0).epsilon(1e-13));
  for (int n : {2, 4, 6, 8}) {
    for (double t : {0.0, 0.5, 1.0, 2.0, 3.3}) {
      CAPTURE(n);
      CAPTURE(t);
      CHECK(shifted_moment(n, t, cfg).value == doctest::Approx(polynomial_moment(n, t)).epsilon(1e-10));
    }
  }
  for (double t : {0.0, 0.7, 2.0}) {
    CHECK(shifted_moment(1.0, t, cfg).value == doctest::Approx(t - 1.0 + 2.0 * std::exp(-t)).epsilon(1e-12));
  }
}

TEST_CASE("m_s(t): fractional orders against Simpson and the distribution route") {
  for (double s : {0.25, 0.5, 1.5, 3.7, 10.0}) {
    for (double t : {0.3, 1.0, 4.0}) {
      CAPTURE(s);
      CAPTURE(t);
      const double v = shifted_moment(s, t, cfg).value;
      CHECK(v == doctest::Approx(oracle::shifted_moment(s, t)).epsilon(1e-6));
      const MomentValue q = abs_moment(ShiftedExponential{t}, s, cfg, MomentRoute::quadrature);
      CHECK(v == doctest::Approx(q.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("m_s(t): log form stays finite at large order") {
  const LogValue lv = log_shifted_moment(500.0, 0.5569, cfg);
  CHECK(std::isfinite(lv.log_value));
  // Dominated by e^{-t} Γ(501) for small t.
  CHECK(lv.log_value == doctest::Approx(std::lgamma(501.0) - 0.5569).epsilon(1e-3));
  CHECK(lv.relative_error >= 0.0);
}

TEST_CASE("m'_q(t) = t^q - m_q(t)") {
  CHECK(shifted_moment_derivative(2.0, 1.0, cfg) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(shifted_moment_derivative(2.0, 0.0, cfg) == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(shifted_moment_derivative(2.0, 3.0, cfg) == doctest::Approx(4.0).epsilon(1e-12));
  for (double q : {1.0, 2.5, 6.0}) {
    for (double t : {0.5, 1.5, 4.0}) {
      const double h = 1e-5;
      const double fd = (shifted_moment(q, t + h, cfg).value - shifted_moment(q, t - h, cfg).value) / (2 * h);
      CHECK(shifted_moment_derivative(q, t, cfg) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}
