#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "logmoment/distributions.hpp"
#include "logmoment/error.hpp"
#include "logmoment/specfun.hpp"
#include "oracles.hpp"

using namespace logmoment;

namespace {

const ToleranceConfig cfg;
constexpr double kInf = std::numeric_limits<double>::infinity();

// X = 1 - E: V(x) = 1 - x on (-inf, 1].
PiecewiseLinearPotential one_minus_exponential() { return {{{1.0, 0.0}}, -1.0, kInf}; }

// Laplace: V(x) = |x|.
PiecewiseLinearPotential laplace() { return {{{0.0, 0.0}}, -1.0, 1.0}; }

std::string error_message(auto&& f, ErrorCode expected) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("expected an Error");
  return {};
}

}  // namespace

TEST_CASE("densities") {
  CHECK(density(Exponential{1.0}, 0.0) == doctest::Approx(1.0));
  CHECK(density(Exponential{2.0}, 0.5) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(density(Exponential{1.0}, -0.1) == 0.0);
  CHECK(density(ShiftedExponential{1.0}, -1.0) == doctest::Approx(1.0));
  CHECK(density(TruncatedExponential{1.0, 1.0, 0.0}, 0.0) == doctest::Approx(0.5));
  CHECK(density(TruncatedExponential{1.0, 1.0, 0.0}, 1.5) == 0.0);
  CHECK(density(SymmetricUniform{2.0}, 1.0) == doctest::Approx(0.25));
  CHECK(density(GammaShift{}, 0.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(density(laplace(), 1.0) == doctest::Approx(0.5 * std::exp(-1.0)));
  // Truncated exponential density e^{αx+β}: normalizer by Simpson.
  const TruncatedExponential te{0.7, 2.0, -1.3};
  const double z = oracle::simpson([&](double x) { return std::exp(te.alpha * x); }, -te.a, te.b);
  CHECK(density(te, 0.4) == doctest::Approx(std::exp(te.alpha * 0.4) / z).epsilon(1e-10));
}

TEST_CASE("densities integrate to one") {
  for (const Distribution& d : std::vector<Distribution>{Exponential{3.0}, ShiftedExponential{2.0},
                                                         TruncatedExponential{0.5, 3.0, 2.0}, GammaShift{},
                                                         SymmetricUniform{1.5}, one_minus_exponential(), laplace()}) {
    CAPTURE(describe(d));
    CHECK(expectation(d, [](double) { return 1.0; }, cfg).value == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("mean and variance") {
  CHECK(mean(GammaShift{}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(variance(GammaShift{}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean(SymmetricUniform{3.0}) == doctest::Approx(0.0));
  CHECK(variance(SymmetricUniform{3.0}) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(mean(ShiftedExponential{2.0}) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(variance(ShiftedExponential{2.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean(Exponential{4.0}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(variance(Exponential{4.0}) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  const TruncatedExponential te{0.7, 2.0, -1.3};
  const PiecewiseLinearPotential pot = to_potential(te);
  CHECK(mean(te) == doctest::Approx(oracle::plc_expectation(pot, [](double x) { return x; })).epsilon(1e-9));
  const double m = mean(te);
  CHECK(variance(te) ==
        doctest::Approx(oracle::plc_expectation(pot, [m](double x) { return (x - m) * (x - m); })).epsilon(1e-9));
}

TEST_CASE("moments: closed forms") {
  CHECK(abs_moment(Exponential{1.0}, 3.0, cfg).value == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(abs_moment(Exponential{1.0}, 3.0, cfg).method == MomentMethod::closed_form);
  CHECK(abs_moment(Exponential{2.0}, 2.0, cfg).value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(norm(Exponential{1.0}, 2.0, cfg) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(norm(SymmetricUniform{1.0}, 2.0, cfg) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(abs_moment(SymmetricUniform{2.0}, 3.0, cfg).value == doctest::Approx(8.0 / 4.0).epsilon(1e-14));
  CHECK(abs_moment(ShiftedExponential{1.0}, 2.0, cfg).value == doctest::Approx(1.0).epsilon(1e-12));
  for (double t : {0.0, 0.5, 2.0, 3.0}) {
    CHECK(abs_moment(ShiftedExponential{t}, 2.0, cfg).value ==
          doctest::Approx(1.0 + (1.0 - t) * (1.0 - t)).epsilon(1e-12));
  }
  CHECK(abs_moment(GammaShift{}, 4.0, cfg).value == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(abs_moment(GammaShift{}, 2.0, cfg).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("moments: closed form agrees with quadrature") {
  const std::vector<Distribution> ds = {Exponential{1.0}, Exponential{0.3}, SymmetricUniform{1.0},
                                        SymmetricUniform{4.0}, ShiftedExponential{0.7}, GammaShift{}};
  for (const Distribution& d : ds) {
    for (double s : {0.3, 0.5, 1.0, 2.0, 3.7, 8.0}) {
      CAPTURE(describe(d));
      CAPTURE(s);
      const double closed = abs_moment(d, s, cfg).value;
      const MomentValue quad = abs_moment(d, s, cfg, MomentRoute::quadrature);
      CHECK(quad.method == MomentMethod::quadrature);
      CHECK(closed == doctest::Approx(quad.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("moments: potentials against Simpson") {
  const std::vector<PiecewiseLinearPotential> ps = {
      laplace(),
      one_minus_exponential(),
      {{{-1.0, 2.0}, {0.5, 0.0}, {2.0, 1.0}}, -3.0, 1.5},
      {{{-2.0, 0.0}, {1.0, 0.3}}, -kInf, 0.8},
      random_log_concave(11, 4),
  };
  for (const auto& p : ps) {
    for (double s : {0.5, 1.0, 2.5, 6.0}) {
      CAPTURE(describe(p));
      CAPTURE(s);
      CHECK(abs_moment(p, s, cfg).value == doctest::Approx(oracle::plc_abs_moment(p, s)).epsilon(1e-6));
    }
  }
  // Laplace moments are Γ(s+1).
  for (double s : {0.5, 2.0, 5.5}) CHECK(abs_moment(laplace(), s, cfg).value == doctest::Approx(std::tgamma(s + 1.0)).epsilon(1e-9));
}

TEST_CASE("moments: every family equals its potential encoding") {
  const std::vector<Distribution> ds = {Exponential{1.5}, ShiftedExponential{1.2}, TruncatedExponential{0.4, 2.5, 1.1},
                                        GammaShift{}, SymmetricUniform{2.0}};
  for (const Distribution& d : ds) {
    for (double s : {0.5, 2.0, 4.0}) {
      CAPTURE(describe(d));
      CAPTURE(s);
      CHECK(abs_moment(d, s, cfg).value == doctest::Approx(abs_moment(to_potential(d), s, cfg).value).epsilon(1e-9));
    }
  }
}

TEST_CASE("ratios") {
  CHECK(ratio(Exponential{1.0}, 4.0, 2.0, cfg) == doctest::Approx(std::pow(24.0, 0.25) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ratio(Exponential{1.0}, 4.0, 2.0, cfg) == doctest::Approx(1.5651).epsilon(1e-4));
  CHECK(ratio(GammaShift{}, 4.0, 2.0, cfg) == doctest::Approx(std::pow(9.0, 0.25)).epsilon(1e-12));
  CHECK(ratio(GammaShift{}, 4.0, 2.0, cfg) == doctest::Approx(1.7321).epsilon(1e-4));
  CHECK(ratio(SymmetricUniform{1.0}, 4.0, 2.0, cfg) ==
        doctest::Approx(std::pow(0.2, 0.25) * std::sqrt(3.0)).epsilon(1e-13));
  CHECK(ratio(SymmetricUniform{1.0}, 2.0, 1.0, cfg) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(ratio(laplace(), 3.0, 3.0, cfg) == 1.0);
  const RatioValue r = ratio_with_error(random_log_concave(5, 3), 6.0, 2.0, cfg);
  CHECK(r.relative_error >= 0.0);
  CHECK(r.relative_error < 1e-6);
  error_message([] { ratio(GammaShift{}, 2.0, 4.0, cfg); }, ErrorCode::domain);
}

TEST_CASE("ratio scale invariance") {
  // ‖cX‖_p / ‖cX‖_q does not depend on c.
  CHECK(ratio(Exponential{7.0}, 5.0, 1.5, cfg) == doctest::Approx(ratio(Exponential{1.0}, 5.0, 1.5, cfg)).epsilon(1e-12));
  CHECK(ratio(SymmetricUniform{9.0}, 5.0, 1.5, cfg) ==
        doctest::Approx(ratio(SymmetricUniform{1.0}, 5.0, 1.5, cfg)).epsilon(1e-12));
}

TEST_CASE("truncated exponential slices") {
  // α = 0, a = b: uniform on [-a, a].
  CHECK(ratio(TruncatedExponential{2.0, 2.0, 0.0}, 4.0, 2.0, cfg) ==
        doctest::Approx(ratio(SymmetricUniform{1.0}, 4.0, 2.0, cfg)).epsilon(1e-10));
  // Shrinking a with a fixed negative slope approaches the unit exponential.
  const double target = std::pow(24.0, 0.25) / std::sqrt(2.0);
  double prev_gap = INFINITY;
  for (double a : {1.0, 0.3, 0.1, 0.01, 1e-4}) {
    const double gap = std::abs(ratio(TruncatedExponential{a, 50.0, -1.0}, 4.0, 2.0, cfg) - target);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-4);
  // Reflection x -> -x leaves the ratio unchanged.
  CHECK(ratio(TruncatedExponential{0.5, 3.0, 1.2}, 5.0, 2.0, cfg) ==
        doctest::Approx(ratio(TruncatedExponential{3.0, 0.5, -1.2}, 5.0, 2.0, cfg)).epsilon(1e-10));
}

TEST_CASE("prob_negative") {
  CHECK(prob_negative(GammaShift{}) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(prob_negative(one_minus_exponential()) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(prob_negative(SymmetricUniform{5.0}) == doctest::Approx(0.5));
  CHECK(prob_negative(Exponential{1.0}) == 0.0);
  CHECK(prob_negative(ShiftedExponential{2.0}) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
  const PiecewiseLinearPotential p = random_log_concave(3, 5);
  CHECK(prob_negative(p) ==
        doctest::Approx(oracle::plc_expectation(p, [](double x) { return x < 0.0 ? 1.0 : 0.0; })).epsilon(1e-8));
}

TEST_CASE("center") {
  CHECK(std::holds_alternative<ShiftedExponential>(center(Exponential{1.0})));
  CHECK(std::get<ShiftedExponential>(center(Exponential{1.0})).t == doctest::Approx(1.0));
  CHECK(mean(center(Exponential{1.0})) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::holds_alternative<SymmetricUniform>(center(SymmetricUniform{2.0})));
  CHECK(std::get<SymmetricUniform>(center(SymmetricUniform{2.0})).a == 2.0);
  CHECK(std::abs(mean(center(Exponential{3.0}))) < 1e-12);
  CHECK(std::abs(mean(center(TruncatedExponential{0.5, 3.0, 1.2}))) < 1e-12);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Distribution c = center(random_log_concave(seed, seed % 7));
    CAPTURE(seed);
    CHECK(std::abs(mean(c)) < 1e-10);
    CHECK(std::abs(expectation(c, [](double x) { return x; }, cfg).value) < 1e-9);
  }
}

TEST_CASE("symmetry and sign predicates") {
  CHECK(is_symmetric(SymmetricUniform{1.0}));
  CHECK(is_symmetric(laplace()));
  CHECK(is_symmetric(TruncatedExponential{2.0, 2.0, 0.0}));
  CHECK_FALSE(is_symmetric(GammaShift{}));
  CHECK(is_nonnegative(Exponential{2.0}));
  CHECK_FALSE(is_nonnegative(ShiftedExponential{0.5}));
  CHECK_FALSE(is_nonnegative(laplace()));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) CHECK(is_symmetric(random_symmetric_log_concave(seed, 3)));
}

TEST_CASE("random potentials") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    for (unsigned complexity : {0u, 1u, 3u, 6u}) {
      const PiecewiseLinearPotential p = random_log_concave(seed, complexity);
      CAPTURE(seed);
      CAPTURE(complexity);
      CHECK(p.knots.size() == complexity + 1);
      CHECK_NOTHROW(validate(p));
      CHECK(p == random_log_concave(seed, complexity));
      // Midpoint convexity on random pairs inside the support.
      std::mt19937_64 rng(seed);
      const double lo = std::isinf(p.left_slope) ? p.knots.front().x : p.knots.front().x - 3.0;
      const double hi = std::isinf(p.right_slope) ? p.knots.back().x : p.knots.back().x + 3.0;
      std::uniform_real_distribution<double> u(lo, hi);
      for (int i = 0; i < 20; ++i) {
        const double x = u(rng);
        const double y = u(rng);
        const double vm = oracle::potential_at(p, 0.5 * (x + y));
        CHECK(vm <= 0.5 * (oracle::potential_at(p, x) + oracle::potential_at(p, y)) + 1e-9);
      }
    }
  }
  CHECK_FALSE(random_log_concave(1, 3) == random_log_concave(2, 3));
  // complexity 0 with slopes on both sides integrates to one.
  const PiecewiseLinearPotential p0 = random_log_concave(1, 0);
  CHECK(expectation(p0, [](double) { return 1.0; }, cfg).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("validation") {
  error_message([] { validate(Exponential{0.0}); }, ErrorCode::domain);
  error_message([] { validate(SymmetricUniform{-1.0}); }, ErrorCode::domain);
  error_message([] { validate(TruncatedExponential{-1.0, 1.0, 0.0}); }, ErrorCode::domain);
  // Concave kink
  error_message([] { validate(PiecewiseLinearPotential{{{0.0, 0.0}, {1.0, 2.0}, {2.0, 2.5}}, -1.0, 1.0}); },
                ErrorCode::domain);
  // Not integrable
  error_message([] { validate(PiecewiseLinearPotential{{{0.0, 0.0}}, 0.5, 1.0}); }, ErrorCode::domain);
  // Knots not increasing
  error_message([] { validate(PiecewiseLinearPotential{{{1.0, 0.0}, {0.0, 0.0}}, -1.0, 1.0}); }, ErrorCode::domain);
  error_message([] { validate(PiecewiseLinearPotential{{}, -1.0, 1.0}); }, ErrorCode::domain);
}

TEST_CASE("parse_distribution") {
  CHECK(parse_distribution("exp") == Distribution{Exponential{1.0}});
  CHECK(parse_distribution("exp:rate=2.5") == Distribution{Exponential{2.5}});
  CHECK(parse_distribution("shiftexp:t=0.5") == Distribution{ShiftedExponential{0.5}});
  CHECK(parse_distribution("truncexp:a=1,b=2,alpha=-0.5") == Distribution{TruncatedExponential{1.0, 2.0, -0.5}});
  CHECK(parse_distribution("gamma-shift") == Distribution{GammaShift{}});
  CHECK(parse_distribution("uniform:a=3") == Distribution{SymmetricUniform{3.0}});

  const std::string bad_number = error_message([] { parse_distribution("uniform:a=abc"); }, ErrorCode::parse);
  CHECK(bad_number.find("offset 10") != std::string::npos);
  CHECK(bad_number.find("'abc'") != std::string::npos);
  const std::string unknown = error_message([] { parse_distribution("normal:s=1"); }, ErrorCode::parse);
  CHECK(unknown.find("offset 0") != std::string::npos);
  const std::string extra = error_message([] { parse_distribution("exp:rate=1,shape=2"); }, ErrorCode::parse);
  CHECK(extra.find("offset 11") != std::string::npos);
  CHECK(extra.find("shape") != std::string::npos);
  error_message([] { parse_distribution("shiftexp"); }, ErrorCode::parse);
  error_message([] { parse_distribution("uniform:a=-1"); }, ErrorCode::parse);
  error_message([] { parse_distribution("plc:file=/nonexistent/potential.json"); }, ErrorCode::io);
}

TEST_CASE("potential JSON and describe round trip") {
  const std::string path = "test_distributions_potential.json";
  {
    std::ofstream out(path);
    out << R"({"knots": [[1.0, 0.0]], "left_slope": -1, "right_slope": null})";
  }
  const Distribution d = parse_distribution("plc:file=" + path);
  CHECK(prob_negative(d) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  std::remove(path.c_str());

  const PiecewiseLinearPotential p = parse_potential_json(R"({"knots":[[0,0],[1,1]],"left_slope":"-inf","right_slope":2})");
  CHECK(std::isinf(p.left_slope));
  CHECK(p.right_slope == 2.0);
  error_message([] { parse_potential_json("{not json"); }, ErrorCode::parse);

  for (const Distribution& x : std::vector<Distribution>{Exponential{2.0}, ShiftedExponential{0.25},
                                                         TruncatedExponential{1.0, 2.0, 0.5}, GammaShift{},
                                                         SymmetricUniform{1.5}}) {
    CHECK(parse_distribution(describe(x)) == x);
  }
  const PiecewiseLinearPotential r = random_log_concave(9, 4);
  const std::string text = describe(r);
  REQUIRE(text.rfind("plc:", 0) == 0);
  CHECK(parse_potential_json(text.substr(4)) == r);
}
