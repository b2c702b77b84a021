#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "logmoment/error.hpp"
#include "logmoment/numerics.hpp"

using namespace logmoment;

namespace {

const ToleranceConfig cfg;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::unknown_check;
}

}  // namespace

TEST_CASE("integrate: analytic integrals") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0, cfg).value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY, cfg).value ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, true, cfg).value ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, cfg).value ==
        doctest::Approx(2.0).epsilon(1e-13));
  // ∫_0^∞ x^3 e^{-x} = 6
  CHECK(integrate([](double x) { return x * x * x * std::exp(-x); }, 0.0, INFINITY, cfg).value ==
        doctest::Approx(6.0).epsilon(1e-11));
}

TEST_CASE("integrate: power singularity with known exponent") {
  // ∫_0^1 x^{-0.9} dx = 10
  const QuadResult r = integrate_power_singular([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0, 0.9, cfg);
  CHECK(r.value == doctest::Approx(10.0).epsilon(1e-10));
  // A kink x^{0.3} e^{-x}: ∫_0^∞ = Γ(1.3)
  const QuadResult k =
      integrate_power_singular([](double x) { return std::pow(x, 0.3) * std::exp(-x); }, 0.0, INFINITY, 0.7, cfg);
  CHECK(k.value == doctest::Approx(std::tgamma(1.3)).epsilon(1e-10));
}

TEST_CASE("integrate: linearity and interval splitting") {
  const auto f = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); };
  const auto g = [](double x) { return 1.0 / (1.0 + x * x); };
  const double a = 2.5;
  const double b = -0.75;
  const double combined = integrate([&](double x) { return a * f(x) + b * g(x); }, -1.0, 2.0, cfg).value;
  const double separate = a * integrate(f, -1.0, 2.0, cfg).value + b * integrate(g, -1.0, 2.0, cfg).value;
  CHECK(combined == doctest::Approx(separate).epsilon(1e-12));

  const double whole = integrate(f, -1.0, 2.0, cfg).value;
  const double split = integrate(f, -1.0, 0.3, cfg).value + integrate(f, 0.3, 2.0, cfg).value;
  CHECK(whole == doctest::Approx(split).epsilon(1e-12));
  CHECK(integrate(g, 0.0, 1.0, cfg).value == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
}

TEST_CASE("integrate: error estimate is reported and bounded") {
  const QuadResult r = integrate([](double x) { return std::log(1.0 + x); }, 0.0, 1.0, cfg);
  CHECK(r.value == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-14));
  CHECK(r.abs_error_estimate >= 0.0);
  CHECK(r.abs_error_estimate <= 1e-9);
  CHECK(r.subdivisions_used >= 1);
}

TEST_CASE("integrate: errors") {
  CHECK(code_of([] { integrate([](double) { return 1.0; }, 1.0, 1.0, cfg); }) == ErrorCode::invalid_interval);
  CHECK(code_of([] { integrate([](double) { return 1.0; }, 2.0, 1.0, cfg); }) == ErrorCode::invalid_interval);
  CHECK(code_of([] { integrate([](double) { return std::nan(""); }, 0.0, 1.0, cfg); }) == ErrorCode::non_finite);
  ToleranceConfig tight = cfg;
  tight.max_subdivisions = 1;
  tight.quad_rel_tol = 1e-15;
  tight.quad_abs_tol = 1e-300;
  CHECK(code_of([&] { integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, tight); }) ==
        ErrorCode::non_convergence);
}

TEST_CASE("ToleranceConfig validation") {
  ToleranceConfig bad = cfg;
  bad.quad_rel_tol = 0.0;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);
  bad = cfg;
  bad.max_subdivisions = 0;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::invalid_argument);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("find_root: analytic roots") {
  CHECK(find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, cfg) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(find_root([](double x) { return x - 1.0; }, 0.0, 5.0, cfg) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0, cfg) ==
        doctest::Approx(0.7390851332151607).epsilon(1e-12));
  CHECK(find_root([](double x) { return x * x * x - 2.0; }, -3.0, 3.0, cfg) ==
        doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
}

TEST_CASE("find_root: u^2 = 2 e^{-u} against bisection") {
  const auto f = [](double u) { return u * u - 2.0 * std::exp(-u); };
  double lo = 0.0;
  double hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double root = find_root(f, 0.0, 2.0, cfg);
  CHECK(root == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-11));
  CHECK(root == doctest::Approx(0.9012).epsilon(1e-4));
}

TEST_CASE("find_root: bracket width honors root_tol") {
  const double root = find_root([](double x) { return std::exp(x) - 3.0; }, 0.0, 5.0, cfg);
  CHECK(std::abs(root - std::log(3.0)) <= cfg.root_tol);
}

TEST_CASE("find_root: errors") {
  CHECK(code_of([] { find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, cfg); }) == ErrorCode::no_sign_change);
  CHECK(code_of([] { find_root([](double) { return std::nan(""); }, -1.0, 1.0, cfg); }) == ErrorCode::non_finite);
}

TEST_CASE("maximize_1d: analytic maxima") {
  const Maximum1d a = maximize_1d([](double x) { return -(x - 1.0) * (x - 1.0); }, 0.0, 3.0, cfg);
  CHECK(a.argmax == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.max == doctest::Approx(0.0).epsilon(1e-12));
  const Maximum1d b = maximize_1d([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, cfg);
  CHECK(b.argmax == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
  CHECK(b.max == doctest::Approx(1.0).epsilon(1e-14));
  // Maximum on the boundary
  const Maximum1d c = maximize_1d([](double x) { return x; }, -2.0, 4.0, cfg);
  CHECK(c.argmax == doctest::Approx(4.0));
  CHECK(c.max == doctest::Approx(4.0));
}

TEST_CASE("maximize_1d: shifted-exponential ratio profile against a dense grid") {
  // ‖E - t‖_4 / ‖E - t‖_2 from the polynomial moments of E - t.
  const auto ratio = [](double t) {
    const double m2 = t * t - 2.0 * t + 2.0;
    const double m4 = 24.0 - 24.0 * t + 12.0 * t * t - 4.0 * t * t * t + t * t * t * t;
    return std::pow(m4, 0.25) / std::sqrt(m2);
  };
  double best = -1.0;
  double best_t = 0.0;
  for (int i = 0; i <= 10'000; ++i) {
    const double t = 10.0 * i / 10'000.0;
    if (ratio(t) > best) {
      best = ratio(t);
      best_t = t;
    }
  }
  const Maximum1d m = maximize_1d(ratio, 0.0, 10.0, cfg);
  CHECK(m.max >= best - 1e-12);
  CHECK(m.max == doctest::Approx(best).epsilon(1e-7));
  CHECK(std::abs(m.argmax - best_t) <= 1e-3);
}

TEST_CASE("maximize_nd: quadratic bowls") {
  const Interval box2[2] = {{0.0, 3.0}, {0.0, 3.0}};
  const MaximumNd a = maximize_nd(
      [](std::span<const double> x) { return -((x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 2.0) * (x[1] - 2.0)); }, box2, 4,
      cfg);
  CHECK(a.argmax[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(a.argmax[1] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(a.max == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(a.evaluations > 0);

  const Interval box_sym[2] = {{-1.0, 1.0}, {-1.0, 1.0}};
  const MaximumNd b =
      maximize_nd([](std::span<const double> x) { return -(x[0] * x[0] + 10.0 * x[1] * x[1]); }, box_sym, 4, cfg);
  CHECK(std::abs(b.argmax[0]) <= 1e-5);
  CHECK(std::abs(b.argmax[1]) <= 1e-5);
  CHECK(b.max >= -1e-10);
}

TEST_CASE("maximize_nd: deterministic and box-respecting") {
  const Interval box[3] = {{-1.0, 1.0}, {0.0, 2.0}, {5.0, 6.0}};
  const auto f = [](std::span<const double> x) { return x[0] + x[1] - x[2]; };
  const MaximumNd a = maximize_nd(f, box, 3, cfg, 7);
  const MaximumNd b = maximize_nd(f, box, 3, cfg, 7);
  CHECK(a.argmax == b.argmax);
  CHECK(a.max == b.max);
  CHECK(a.argmax[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.argmax[1] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(a.argmax[2] == doctest::Approx(5.0).epsilon(1e-6));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.argmax[i] >= box[i].lo);
    CHECK(a.argmax[i] <= box[i].hi);
  }
}

TEST_CASE("halton and log_add_exp") {
  const auto h1 = halton_point(1, 2);
  CHECK(h1[0] == doctest::Approx(0.5));
  CHECK(h1[1] == doctest::Approx(1.0 / 3.0));
  const auto h2 = halton_point(2, 3);
  CHECK(h2[0] == doctest::Approx(0.25));
  CHECK(h2[1] == doctest::Approx(2.0 / 3.0));
  CHECK(h2[2] == doctest::Approx(0.4));

  CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)).epsilon(1e-15));
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(log_add_exp(-INFINITY, 2.0) == 2.0);
  CHECK(log_add_exp(-INFINITY, -INFINITY) == -INFINITY);
}
