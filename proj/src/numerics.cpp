#include "logmoment/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "logmoment/error.hpp"

namespace logmoment {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// 15-point Kronrod extension of the 7-point Gauss rule. Odd indices of
// kKronrodNodes are the Gauss nodes; the last entry is the centre.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

double checked_eval(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "integrand is not finite at x = " << x;
    fail(ErrorCode::non_finite, msg.str());
  }
  return y;
}

Panel kronrod_panel(const RealFunction& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_centre = checked_eval(f, centre);

  double kronrod = kKronrodWeights[7] * f_centre;
  double gauss = kGaussWeights[3] * f_centre;
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> left{};
  std::array<double, 7> right{};

  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = checked_eval(f, centre - dx);
    const double f2 = checked_eval(f, centre + dx);
    left[j] = f1;
    right[j] = f2;
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }

  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(f_centre - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(left[j] - mean) + std::abs(right[j] - mean));
  }

  const double scale = std::abs(half);
  const double value = kronrod * half;
  abs_sum *= scale;
  asc *= scale;
  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) {
    error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  }
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    error = std::max(50.0 * kEps * abs_sum, error);
  }
  return {lo, hi, value, error};
}

bool within_tolerance(double value, double error, const ToleranceConfig& cfg) {
  return error <= std::max(cfg.quad_abs_tol, cfg.quad_rel_tol * std::abs(value));
}

// Global adaptive bisection on a finite interval: always split the panel with
// the largest error estimate.
QuadResult adaptive_finite(const RealFunction& f, double lo, double hi,
                           const ToleranceConfig& cfg) {
  std::priority_queue<Panel> active;
  Panel first = kronrod_panel(f, lo, hi);
  double total = first.value;
  double total_error = first.error;
  active.push(first);
  std::size_t subdivisions = 1;
  double frozen_value = 0.0;
  double frozen_error = 0.0;

  while (!within_tolerance(total, total_error, cfg)) {
    if (active.empty()) {
      fail(ErrorCode::non_convergence,
           "quadrature stalled: panels reached floating-point resolution");
    }
    if (subdivisions >= cfg.max_subdivisions) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "quadrature did not converge within " << cfg.max_subdivisions
          << " subdivisions (error estimate " << total_error << ")";
      fail(ErrorCode::non_convergence, msg.str());
    }
    const Panel worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) < 16.0 * kEps * std::max(std::abs(worst.lo), std::abs(worst.hi))) {
      frozen_value += worst.value;
      frozen_error += worst.error;
      continue;
    }
    const Panel a = kronrod_panel(f, worst.lo, mid);
    const Panel b = kronrod_panel(f, mid, worst.hi);
    total += a.value + b.value - worst.value;
    total_error += a.error + b.error - worst.error;
    active.push(a);
    active.push(b);
    ++subdivisions;
  }

  // Re-sum to shed the drift of the incremental updates.
  double value = frozen_value;
  double error = frozen_error;
  while (!active.empty()) {
    value += active.top().value;
    error += active.top().error;
    active.pop();
  }
  return {value, error, subdivisions};
}

struct TailCut {
  double point;
  double bound;
};

// Walks outward from lo by doubling until the integrand has dropped below
// exp(-tail_cut_log) of its running peak and is decaying.
TailCut find_tail_cut(const RealFunction& f, double lo, const ToleranceConfig& cfg) {
  const double unit = std::max(1.0, 1e-3 * std::abs(lo));
  double peak = 0.0;
  for (int k = 6; k >= 1; --k) {
    peak = std::max(peak, std::abs(checked_eval(f, lo + unit * std::ldexp(1.0, -k))));
  }
  const double cut = std::exp(-cfg.tail_cut_log);
  double previous = peak;
  for (int k = 0; k < 200; ++k) {
    const double x = lo + unit * std::ldexp(1.0, k);
    const double v = std::abs(checked_eval(f, x));
    peak = std::max(peak, v);
    const bool small = v <= cut * peak;
    const bool decaying = v <= previous;
    previous = v;
    if (!small || !decaying || k < 2) continue;
    if (v == 0.0) return {x, 0.0};
    const double step = std::min(1.0, 1e-2 * (x - lo));
    const double before = std::abs(checked_eval(f, x - step));
    if (before <= v) continue;
    const double slope = (std::log(before) - std::log(v)) / step;
    if (!(slope > 0.0)) continue;
    return {x, v / slope};
  }
  fail(ErrorCode::non_convergence, "integrand tail does not decay on [lo, +inf)");
}

QuadResult semi_infinite(const RealFunction& f, double lo, const ToleranceConfig& cfg) {
  const TailCut tail = find_tail_cut(f, lo, cfg);
  QuadResult body = adaptive_finite(f, lo, tail.point, cfg);
  body.abs_error_estimate += tail.bound;
  return body;
}

void check_interval(double lo, double hi) {
  if (!(lo < hi) || std::isnan(lo) || std::isnan(hi) || std::isinf(lo)) {
    std::ostringstream msg;
    msg << "invalid integration interval [" << lo << ", " << hi << "]";
    fail(ErrorCode::invalid_interval, msg.str());
  }
}

QuadResult combine(const QuadResult& a, const QuadResult& b) {
  return {a.value + b.value, a.abs_error_estimate + b.abs_error_estimate,
          a.subdivisions_used + b.subdivisions_used};
}

}  // namespace

void ToleranceConfig::validate() const {
  const bool ok = quad_rel_tol > 0.0 && quad_abs_tol > 0.0 && root_tol > 0.0 &&
                  opt_tol > 0.0 && tail_cut_log > 0.0 && max_subdivisions >= 1;
  if (!ok) fail(ErrorCode::invalid_argument, "tolerances must be strictly positive");
}

QuadResult integrate(const RealFunction& f, double lo, double hi,
                     bool singular_at_lo, const ToleranceConfig& cfg) {
  cfg.validate();
  check_interval(lo, hi);
  if (singular_at_lo) return integrate_power_singular(f, lo, hi, 0.5, cfg);
  if (hi == kInf) return semi_infinite(f, lo, cfg);
  return adaptive_finite(f, lo, hi, cfg);
}

QuadResult integrate_power_singular(const RealFunction& f, double lo,
                                    double hi, double gamma,
                                    const ToleranceConfig& cfg) {
  cfg.validate();
  check_interval(lo, hi);
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    fail(ErrorCode::domain, "singularity exponent must lie in [0, 1)");
  }
  if (hi == kInf) {
    const double split = lo + std::max(1.0, 1e-3 * std::abs(lo));
    return combine(integrate_power_singular(f, lo, split, gamma, cfg),
                   semi_infinite(f, split, cfg));
  }
  if (gamma == 0.0) return adaptive_finite(f, lo, hi, cfg);

  const double beta = 1.0 / (1.0 - gamma);
  const double width = hi - lo;
  const RealFunction mapped = [&f, lo, width, beta](double u) {
    const double x = lo + width * std::pow(u, beta);
    return f(x) * width * beta * std::pow(u, beta - 1.0);
  };
  return adaptive_finite(mapped, 0.0, 1.0, cfg);
}

double find_root(const RealFunction& f, double lo, double hi,
                 const ToleranceConfig& cfg) {
  cfg.validate();
  auto eval = [&f](double x) {
    const double y = f(x);
    if (std::isnan(y)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "root function is NaN at x = " << x;
      fail(ErrorCode::non_finite, msg.str());
    }
    return y;
  };

  double a = lo;
  double b = hi;
  double fa = eval(a);
  double fb = eval(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "no sign change on [" << lo << ", " << hi << "]: f(lo) = " << fa
        << ", f(hi) = " << fb;
    fail(ErrorCode::no_sign_change, msg.str());
  }

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < 500; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * kEps * std::abs(b) + 0.5 * cfg.root_tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = eval(b);
  }
  return b;
}

Maximum1d maximize_1d(const RealFunction& f, double lo, double hi,
                      const ToleranceConfig& cfg, std::size_t probes) {
  cfg.validate();
  if (!(lo < hi)) fail(ErrorCode::invalid_interval, "maximize_1d requires lo < hi");
  probes = std::max<std::size_t>(probes, 3);
  auto eval = [&f](double x) {
    const double y = f(x);
    if (std::isnan(y)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "objective is NaN at x = " << x;
      fail(ErrorCode::non_finite, msg.str());
    }
    return y;
  };

  const double step = (hi - lo) / static_cast<double>(probes - 1);
  std::size_t best_index = 0;
  double best_value = -kInf;
  for (std::size_t i = 0; i < probes; ++i) {
    const double x = i + 1 == probes ? hi : lo + step * static_cast<double>(i);
    const double v = eval(x);
    if (v > best_value) {
      best_value = v;
      best_index = i;
    }
  }
  const double best_x = best_index + 1 == probes ? hi : lo + step * static_cast<double>(best_index);

  double a = best_index == 0 ? lo : best_x - step;
  double b = best_index + 1 == probes ? hi : best_x + step;
  a = std::max(a, lo);
  b = std::min(b, hi);

  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int iter = 0; iter < 300 && (b - a) > cfg.opt_tol; ++iter) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    }
  }
  const double refined_x = f1 >= f2 ? x1 : x2;
  const double refined_v = std::max(f1, f2);
  if (refined_v >= best_value) return {refined_x, refined_v};
  return {best_x, best_value};
}

std::vector<double> halton_point(std::uint64_t index, std::size_t dim) {
  static constexpr std::array<std::uint64_t, 16> kPrimes = {
      2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > kPrimes.size()) fail(ErrorCode::invalid_argument, "halton_point supports at most 16 dimensions");
  std::vector<double> point(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const std::uint64_t base = kPrimes[d];
    double inv = 1.0 / static_cast<double>(base);
    double factor = inv;
    double result = 0.0;
    for (std::uint64_t i = index; i > 0; i /= base) {
      result += factor * static_cast<double>(i % base);
      factor *= inv;
    }
    point[d] = result;
  }
  return point;
}

namespace {

struct Simplex {
  std::vector<std::vector<double>> vertices;  // unit-cube coordinates
  std::vector<double> values;                 // of the minimized function
};

// Minimizes g over [0,1]^n from the given start. Returns the best vertex.
std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& g,
    std::vector<double> start, double initial_step, const ToleranceConfig& cfg,
    std::size_t& evaluations) {
  const std::size_t n = start.size();
  auto clamp_point = [](std::vector<double>& x) {
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  };
  clamp_point(start);

  Simplex s;
  s.vertices.push_back(start);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v = start;
    v[i] += v[i] + initial_step <= 1.0 ? initial_step : -initial_step;
    clamp_point(v);
    s.vertices.push_back(v);
  }
  for (const auto& v : s.vertices) {
    s.values.push_back(g(v));
    ++evaluations;
  }

  const std::size_t max_evals = 600 * (n + 1);
  std::size_t local_evals = 0;
  std::vector<std::size_t> order(n + 1);
  while (local_evals < max_evals) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) {
        diameter = std::max(diameter, std::abs(s.vertices[i][d] - s.vertices[best][d]));
      }
    }
    const double spread = s.values[worst] - s.values[best];
    if (diameter <= cfg.opt_tol ||
        spread <= 4.0 * kEps * (std::abs(s.values[best]) + 1e-300)) {
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += s.vertices[i][d] / static_cast<double>(n);
    }
    auto along = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) {
        x[d] = centroid[d] + coef * (s.vertices[worst][d] - centroid[d]);
      }
      clamp_point(x);
      return x;
    };
    auto evaluate = [&](const std::vector<double>& x) {
      ++evaluations;
      ++local_evals;
      return g(x);
    };

    const auto reflected = along(-1.0);
    const double f_reflected = evaluate(reflected);
    if (f_reflected < s.values[best]) {
      const auto expanded = along(-2.0);
      const double f_expanded = evaluate(expanded);
      if (f_expanded < f_reflected) {
        s.vertices[worst] = expanded;
        s.values[worst] = f_expanded;
      } else {
        s.vertices[worst] = reflected;
        s.values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < s.values[second_worst]) {
      s.vertices[worst] = reflected;
      s.values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < s.values[worst];
    const auto contracted = along(outside ? -0.5 : 0.5);
    const double f_contracted = evaluate(contracted);
    if (f_contracted < std::min(f_reflected, s.values[worst])) {
      s.vertices[worst] = contracted;
      s.values[worst] = f_contracted;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) {
        s.vertices[i][d] = s.vertices[best][d] + 0.5 * (s.vertices[i][d] - s.vertices[best][d]);
      }
      s.values[i] = evaluate(s.vertices[i]);
    }
  }
  const auto it = std::min_element(s.values.begin(), s.values.end());
  const auto idx = static_cast<std::size_t>(it - s.values.begin());
  return {s.vertices[idx], *it};
}

}  // namespace

MaximumNd maximize_nd(const VectorFunction& f, std::span<const Interval> box,
                      std::size_t starts, const ToleranceConfig& cfg,
                      std::uint64_t seed) {
  cfg.validate();
  if (box.empty()) fail(ErrorCode::invalid_argument, "maximize_nd requires a non-empty box");
  for (const Interval& iv : box) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      fail(ErrorCode::invalid_interval, "maximize_nd requires finite, non-degenerate box sides");
    }
  }
  if (starts == 0) fail(ErrorCode::invalid_argument, "maximize_nd requires at least one start");

  const std::size_t n = box.size();
  auto to_box = [&](const std::vector<double>& u) {
    std::vector<double> x(n);
    for (std::size_t d = 0; d < n; ++d) x[d] = box[d].lo + u[d] * (box[d].hi - box[d].lo);
    return x;
  };
  const auto negated = [&](const std::vector<double>& u) {
    const std::vector<double> x = to_box(u);
    const double v = f(x);
    if (std::isnan(v)) fail(ErrorCode::non_finite, "objective returned NaN");
    return -v;
  };

  MaximumNd result;
  result.max = -kInf;
  for (std::size_t k = 0; k < starts; ++k) {
    // Index 0 of the Halton sequence is the origin corner; skip it.
    const std::vector<double> start = halton_point(seed % 1'000'003 + k + 1, n);
    auto [u, value] = nelder_mead(negated, start, 0.1, cfg, result.evaluations);
    auto [u2, value2] = nelder_mead(negated, u, 0.02, cfg, result.evaluations);
    if (value2 < value) {
      u = u2;
      value = value2;
    }
    if (-value > result.max) {
      result.max = -value;
      result.argmax = to_box(u);
    }
  }
  return result;
}

double log_add_exp(double a, double b) noexcept {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace logmoment
