#include <doctest.h>

#include <cmath>
#include <numbers>

#include "logmoment/error.hpp"
#include "logmoment/extremal.hpp"
#include "logmoment/specfun.hpp"

using namespace logmoment;

TEST_CASE("gamma_p1 and log_gamma_p1 against the C library") {
  CHECK(gamma_p1(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_p1(4.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(gamma_p1(0.5) == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-14));
  for (double x : {0.01, 0.3, 1.7, 5.5, 12.25, 40.0, 100.5, 170.0}) {
    CAPTURE(x);
    CHECK(gamma_p1(x) == doctest::Approx(std::tgamma(x + 1.0)).epsilon(1e-13));
    CHECK(log_gamma_p1(x) == doctest::Approx(std::lgamma(x + 1.0)).epsilon(1e-13));
  }
  CHECK(std::isinf(gamma_p1(200.0)));
  CHECK(log_gamma_p1(1e6) == doctest::Approx(std::lgamma(1e6 + 1.0)).epsilon(1e-14));
}

TEST_CASE("Stirling remainder") {
  CHECK(stirling_correction(1.0) == doctest::Approx(1.0 - 0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-13));
  CHECK(stirling_correction(2.0) ==
        doctest::Approx(std::log(2.0) - 2.0 * std::log(2.0 / std::numbers::e) - 0.5 * std::log(4.0 * std::numbers::pi))
            .epsilon(1e-12));
  CHECK(stirling_correction(1.0) == doctest::Approx(0.0810614).epsilon(1e-6));
  CHECK(stirling_correction(2.0) == doctest::Approx(0.0413407).epsilon(1e-6));
  // Defining identity against lgamma at moderate x.
  for (double x : {0.1, 0.5, 3.0, 7.5, 14.0}) {
    const double expected = std::lgamma(x + 1.0) - (x * std::log(x / std::numbers::e) + 0.5 * std::log(2 * std::numbers::pi * x));
    CHECK(stirling_correction(x) == doctest::Approx(expected).epsilon(1e-11));
  }
  // Large x: leading asymptotic terms 1/(12x) - 1/(360x^3).
  for (double x : {100.0, 1000.0, 1e5}) {
    CHECK(stirling_correction(x) == doctest::Approx(1.0 / (12 * x) - 1.0 / (360 * x * x * x)).epsilon(1e-12));
  }
  double prev = stirling_correction(1.0);
  for (double x = 2.0; x <= 1024.0; x *= 2.0) {
    const double cur = stirling_correction(x);
    CHECK(cur > 0.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("gamma growth g") {
  CHECK(gamma_growth(1.0) == doctest::Approx(std::numbers::e).epsilon(1e-14));
  CHECK(gamma_growth(2.0) == doctest::Approx(std::numbers::e * std::numbers::e / 2.0).epsilon(1e-14));
  for (int x = 1; x <= 50; ++x) CHECK(gamma_growth(2.0 * x) <= std::sqrt(2.0) * gamma_growth(x));
}

TEST_CASE("Lambert W") {
  CHECK(lambert_w(0.0) == 0.0);
  CHECK(lambert_w(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambert_w(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-15));
  // Fixed-point oracle w <- (1/e) e^{-w}.
  double w = 0.0;
  for (int i = 0; i < 200; ++i) w = std::exp(-1.0 - w);
  CHECK(lambert_w(1.0 / std::numbers::e) == doctest::Approx(w).epsilon(1e-14));
  for (double y : {1e-12, 1e-3, 0.2, 3.0, 50.0, 1e6, 1e100}) {
    const double v = lambert_w(y);
    CHECK(v * std::exp(v) == doctest::Approx(y).epsilon(1e-13));
  }
}

TEST_CASE("exponential norm") {
  CHECK(exponential_norm(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exponential_norm(2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(exponential_norm(4.0) == doctest::Approx(std::pow(24.0, 0.25)).epsilon(1e-15));
  CHECK(exponential_norm(4.0) == doctest::Approx(2.2134).epsilon(1e-4));
  CHECK(log_exponential_norm(500.0) == doctest::Approx(std::lgamma(501.0) / 500.0).epsilon(1e-14));
}

TEST_CASE("subfactorial") {
  CHECK(subfactorial(0) == 1);
  CHECK(subfactorial(1) == 0);
  CHECK(subfactorial(2) == 1);
  CHECK(subfactorial(4) == 9);
  CHECK(subfactorial(6) == 265);
  // Recurrence !n = n !(n-1) + (-1)^n
  std::uint64_t prev = 1;
  for (unsigned n = 1; n <= 20; ++n) {
    const std::uint64_t expected = n % 2 == 0 ? n * prev + 1 : n * prev - 1;
    CHECK(subfactorial(n) == expected);
    prev = expected;
  }
  try {
    subfactorial(21);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::overflow);
  }
}

TEST_CASE("sharp constants") {
  const SharpConstants& k = sharp_constants();
  CHECK(k.w_inv_e * std::exp(k.w_inv_e) == doctest::Approx(1.0 / std::numbers::e).epsilon(1e-14));
  CHECK(std::abs(k.w_inv_e * std::exp(k.w_inv_e) - 1.0 / std::numbers::e) <= 1e-12);
  CHECK(std::round(k.c0 * 1e4) / 1e4 == doctest::Approx(1.3211).epsilon(1e-12));
  CHECK(k.c0 == doctest::Approx(std::exp(k.w_inv_e)).epsilon(1e-15));
  CHECK(k.r0 == doctest::Approx(std::numbers::e * k.w_inv_e).epsilon(1e-15));
  CHECK(k.r0 * k.c0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(k.lambda0 == doctest::Approx(std::sqrt(2.0) / k.c0).epsilon(1e-15));
}

TEST_CASE("norm scale A_p") {
  CHECK(norm_scale(std::numbers::e / (2.0 * std::numbers::pi)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(norm_scale(1.0) == doctest::Approx(1.5203).epsilon(1e-4));
  CHECK(norm_scale(2.0) == doctest::Approx(2.1500).epsilon(1e-4));
}

TEST_CASE("A_p^{-1/x} ||E||_x / x is not monotone on all of (0, p]") {
  // Only a window just below p is used; far from p the function rises.
  for (double p : {2.0, 5.0, 10.0, 50.0}) {
    const double log_a = std::log(norm_scale(p));
    const auto f = [log_a](double x) { return std::exp(-log_a / x + log_exponential_norm(x) - std::log(x)); };
    CAPTURE(p);
    CHECK(f(0.5) < f(0.5 * p));
    for (double x = p - 0.25; x + 0.01 <= p; x += 0.01) CHECK(f(x + 0.01) < f(x));
  }
}

TEST_CASE("the constant C0 e^{-0.4} is below 1") {
  CHECK(sharp_constants().c0 * std::exp(-0.4) < 1.0);
  CHECK(sharp_constants().c0 * std::exp(-0.4) == doctest::Approx(0.8856).epsilon(1e-4));
}
