#include "logmoment/logmoment.h"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "logmoment/error.hpp"
#include "logmoment/extremal.hpp"
#include "logmoment/serialization.hpp"
#include "logmoment/specfun.hpp"
#include "logmoment/verify.hpp"

struct lm_config {
  logmoment::ToleranceConfig cfg;
};

struct lm_distribution {
  logmoment::Distribution d;
};

namespace {

using namespace logmoment;

thread_local std::string last_error;

lm_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return LM_ERR_INVALID_ARGUMENT;
    case ErrorCode::domain: return LM_ERR_DOMAIN;
    case ErrorCode::invalid_interval: return LM_ERR_INVALID_INTERVAL;
    case ErrorCode::non_convergence: return LM_ERR_NON_CONVERGENCE;
    case ErrorCode::non_finite: return LM_ERR_NON_FINITE;
    case ErrorCode::no_sign_change: return LM_ERR_NO_SIGN_CHANGE;
    case ErrorCode::not_centered: return LM_ERR_NOT_CENTERED;
    case ErrorCode::overflow: return LM_ERR_OVERFLOW;
    case ErrorCode::parse: return LM_ERR_PARSE;
    case ErrorCode::io: return LM_ERR_IO;
    case ErrorCode::unknown_check: return LM_ERR_UNKNOWN_CHECK;
  }
  return LM_ERR_INTERNAL;
}

// Runs body, translating exceptions into a status and the thread's message.
template <class F>
lm_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return LM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return LM_ERR_INTERNAL;
  }
}

template <class T>
void need(const T* ptr, const char* name) {
  if (ptr == nullptr) fail(ErrorCode::invalid_argument, std::string(name) + " is NULL");
}

ToleranceConfig config_of(const lm_config* cfg) { return cfg ? cfg->cfg : ToleranceConfig{}; }

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string dump(const Json& j) { return j.dump(2); }

double* config_field(ToleranceConfig& cfg, std::string_view key) {
  if (key == "quad_rel_tol") return &cfg.quad_rel_tol;
  if (key == "quad_abs_tol") return &cfg.quad_abs_tol;
  if (key == "root_tol") return &cfg.root_tol;
  if (key == "opt_tol") return &cfg.opt_tol;
  if (key == "tail_cut_log") return &cfg.tail_cut_log;
  return nullptr;
}

void set_config(ToleranceConfig& cfg, std::string_view key, double value) {
  ToleranceConfig next = cfg;
  if (key == "max_subdivisions") {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e12) {
      fail(ErrorCode::invalid_argument, "max_subdivisions must be a positive whole number");
    }
    next.max_subdivisions = static_cast<std::size_t>(value);
  } else if (double* slot = config_field(next, key)) {
    *slot = value;
  } else {
    fail(ErrorCode::invalid_argument, "unknown tolerance key '" + std::string(key) + "'");
  }
  next.validate();
  cfg = next;
}

lm_distribution* wrap(Distribution d) { return new lm_distribution{std::move(d)}; }

}  // namespace

extern "C" {

const char* lm_last_error(void) { return last_error.c_str(); }

const char* lm_status_name(lm_status status) {
  switch (status) {
    case LM_OK: return "ok";
    case LM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case LM_ERR_DOMAIN: return "domain";
    case LM_ERR_INVALID_INTERVAL: return "invalid_interval";
    case LM_ERR_NON_CONVERGENCE: return "non_convergence";
    case LM_ERR_NON_FINITE: return "non_finite";
    case LM_ERR_NO_SIGN_CHANGE: return "no_sign_change";
    case LM_ERR_NOT_CENTERED: return "not_centered";
    case LM_ERR_OVERFLOW: return "overflow";
    case LM_ERR_PARSE: return "parse";
    case LM_ERR_IO: return "io";
    case LM_ERR_UNKNOWN_CHECK: return "unknown_check";
    case LM_ERR_INTERNAL: return "internal";
  }
  return "unknown_status";
}

const char* lm_version(void) { return "1.0.0"; }

void lm_string_free(char* s) { std::free(s); }

lm_status lm_config_create(lm_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new lm_config{};
  });
}

lm_status lm_config_from_env(lm_config** out) {
  return guarded([&] {
    need(out, "out");
    ToleranceConfig cfg;
    for (const char* key : {"quad_rel_tol", "quad_abs_tol", "root_tol", "opt_tol", "max_subdivisions", "tail_cut_log"}) {
      std::string var = "LOGMOMENT_";
      for (const char* c = key; *c; ++c) var += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
      const char* text = std::getenv(var.c_str());
      if (text == nullptr) continue;
      char* end = nullptr;
      const double value = std::strtod(text, &end);
      if (end == text || *end != '\0') fail(ErrorCode::parse, var + ": not a number: '" + text + "'");
      try {
        set_config(cfg, key, value);
      } catch (const Error& e) {
        fail(e.code(), var + ": " + e.what());
      }
    }
    *out = new lm_config{cfg};
  });
}

lm_status lm_config_set(lm_config* cfg, const char* key, double value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    set_config(cfg->cfg, key, value);
  });
}

lm_status lm_config_get(const lm_config* cfg, const char* key, double* value) {
  return guarded([&] {
    need(key, "key");
    need(value, "value");
    ToleranceConfig c = config_of(cfg);
    if (std::string_view(key) == "max_subdivisions") {
      *value = static_cast<double>(c.max_subdivisions);
    } else if (const double* slot = config_field(c, key)) {
      *value = *slot;
    } else {
      fail(ErrorCode::invalid_argument, "unknown tolerance key '" + std::string(key) + "'");
    }
  });
}

void lm_config_destroy(lm_config* cfg) { delete cfg; }

lm_status lm_distribution_parse(const char* spec, lm_distribution** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = wrap(parse_distribution(spec));
  });
}

lm_status lm_distribution_from_json(const char* json, lm_distribution** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    Json doc;
    try {
      doc = Json::parse(json);
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::parse, std::string("distribution JSON: ") + e.what());
    }
    *out = wrap(distribution_from_json(doc));
  });
}

lm_status lm_distribution_random(uint64_t seed, unsigned complexity, int symmetric, lm_distribution** out) {
  return guarded([&] {
    need(out, "out");
    *out = wrap(symmetric ? random_symmetric_log_concave(seed, complexity) : random_log_concave(seed, complexity));
  });
}

lm_status lm_distribution_center(const lm_distribution* d, lm_distribution** out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = wrap(center(d->d));
  });
}

lm_status lm_distribution_describe(const lm_distribution* d, char** out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = copy_string(describe(d->d));
  });
}

lm_status lm_distribution_to_json(const lm_distribution* d, char** out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = copy_string(dump(to_json(d->d)));
  });
}

void lm_distribution_destroy(lm_distribution* d) { delete d; }

lm_status lm_density(const lm_distribution* d, double x, double* out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = density(d->d, x);
  });
}

lm_status lm_mean(const lm_distribution* d, double* out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = mean(d->d);
  });
}

lm_status lm_variance(const lm_distribution* d, double* out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = variance(d->d);
  });
}

lm_status lm_prob_negative(const lm_distribution* d, double* out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = prob_negative(d->d);
  });
}

lm_status lm_is_symmetric(const lm_distribution* d, int* out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = is_symmetric(d->d) ? 1 : 0;
  });
}

lm_status lm_is_nonnegative(const lm_distribution* d, int* out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = is_nonnegative(d->d) ? 1 : 0;
  });
}

lm_status lm_abs_moment(const lm_distribution* d, double s, int quadrature, const lm_config* cfg, lm_moment* out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    const MomentValue m =
        abs_moment(d->d, s, config_of(cfg), quadrature ? MomentRoute::quadrature : MomentRoute::automatic);
    *out = lm_moment{m.s, m.value, m.abs_error_estimate, m.method == MomentMethod::closed_form ? 1 : 0};
  });
}

lm_status lm_log_abs_moment(const lm_distribution* d, double s, int quadrature, const lm_config* cfg,
                            double* log_value, double* relative_error) {
  return guarded([&] {
    need(d, "d");
    need(log_value, "log_value");
    const LogMoment m =
        log_abs_moment(d->d, s, config_of(cfg), quadrature ? MomentRoute::quadrature : MomentRoute::automatic);
    *log_value = m.log_value;
    if (relative_error) *relative_error = m.relative_error;
  });
}

lm_status lm_norm(const lm_distribution* d, double s, const lm_config* cfg, double* out) {
  return guarded([&] {
    need(d, "d");
    need(out, "out");
    *out = norm(d->d, s, config_of(cfg));
  });
}

lm_status lm_ratio(const lm_distribution* d, double p, double q, const lm_config* cfg, double* value,
                   double* relative_error) {
  return guarded([&] {
    need(d, "d");
    need(value, "value");
    const RatioValue r = ratio_with_error(d->d, p, q, config_of(cfg));
    *value = r.value;
    if (relative_error) *relative_error = r.relative_error;
  });
}

#define LM_SCALAR(name, impl)                 \
  lm_status name(double x, double* out) {     \
    return guarded([&] {                      \
      need(out, "out");                       \
      *out = impl(x);                         \
    });                                       \
  }

LM_SCALAR(lm_gamma_p1, gamma_p1)
LM_SCALAR(lm_log_gamma_p1, log_gamma_p1)
LM_SCALAR(lm_stirling_correction, stirling_correction)
LM_SCALAR(lm_gamma_growth, gamma_growth)
LM_SCALAR(lm_lambert_w, lambert_w)
LM_SCALAR(lm_exponential_norm, exponential_norm)

#undef LM_SCALAR

lm_status lm_subfactorial(unsigned n, uint64_t* out) {
  return guarded([&] {
    need(out, "out");
    *out = subfactorial(n);
  });
}

lm_status lm_get_constants(lm_constants* out) {
  return guarded([&] {
    need(out, "out");
    const SharpConstants& k = sharp_constants();
    *out = lm_constants{k.w_inv_e, k.c0, k.r0, k.lambda0};
  });
}

lm_status lm_shift_integral(double s, double t, const lm_config* cfg, double* value, double* abs_error) {
  return guarded([&] {
    need(value, "value");
    const QuadResult r = shift_integral(s, t, config_of(cfg));
    *value = r.value;
    if (abs_error) *abs_error = r.abs_error_estimate;
  });
}

lm_status lm_shifted_moment(double s, double t, const lm_config* cfg, double* value, double* abs_error) {
  return guarded([&] {
    need(value, "value");
    const QuadResult r = shifted_moment(s, t, config_of(cfg));
    *value = r.value;
    if (abs_error) *abs_error = r.abs_error_estimate;
  });
}

lm_status lm_minimizing_shift(double q, const lm_config* cfg, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = minimizing_shift(q, config_of(cfg));
  });
}

lm_status lm_balance_point(double q, const lm_config* cfg, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = balance_point(q, config_of(cfg));
  });
}

lm_status lm_truncation_bound(double q, const lm_config* cfg, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = truncation_bound(q, config_of(cfg));
  });
}

lm_status lm_shift_roots_json(double q, const lm_config* cfg, char** json) {
  return guarded([&] {
    need(json, "json");
    *json = copy_string(dump(to_json(shift_roots(q, config_of(cfg)))));
  });
}

lm_status lm_max_ratio_shifted_exp(double p, double q, double t_hi, size_t profile_points, const lm_config* cfg,
                                   char** json) {
  return guarded([&] {
    need(json, "json");
    *json = copy_string(dump(to_json(max_ratio_shifted_exp(p, q, config_of(cfg), t_hi, profile_points))));
  });
}

lm_status lm_max_ratio_trunc_exp(double p, double q, size_t starts, uint64_t seed, const lm_config* cfg,
                                 char** json) {
  return guarded([&] {
    need(json, "json");
    if (starts == 0) fail(ErrorCode::invalid_argument, "starts must be at least 1");
    *json = copy_string(dump(to_json(max_ratio_trunc_exp(p, q, TruncBox{}, starts, config_of(cfg), seed))));
  });
}

lm_status lm_check_list_json(char** json) {
  return guarded([&] {
    need(json, "json");
    Json out = Json::array();
    for (const CheckInfo& c : check_registry()) {
      const char* kind = c.kind == CheckKind::distribution ? "distribution"
                         : c.kind == CheckKind::grid       ? "grid"
                                                           : "campaign";
      out.push_back({{"id", c.id}, {"kind", kind}, {"summary", c.summary}});
    }
    *json = copy_string(dump(out));
  });
}

lm_status lm_run_check(const char* id, const lm_distribution* dist, const char* grid, int exploratory, unsigned jobs,
                       uint64_t seed, int include_records, const lm_config* cfg, char** json, int* passed) {
  return guarded([&] {
    need(id, "id");
    need(json, "json");
    CheckRequest request;
    request.id = id;
    if (dist) request.distribution = dist->d;
    if (grid) request.params = parse_grid(grid);
    request.exploratory = exploratory != 0;
    request.jobs = jobs;
    request.seed = seed;
    const CheckOutcome outcome = run_check(request, config_of(cfg));
    std::string text = dump(to_json(outcome, include_records != 0));
    *json = copy_string(text);
    if (passed) *passed = logmoment::passed(outcome) ? 1 : 0;
  });
}

lm_status lm_fuzz(uint64_t seed, size_t n_cases, double p_lo, double p_hi, double q_lo, double q_hi, unsigned jobs,
                  const lm_config* cfg, char** json, int* passed) {
  return guarded([&] {
    need(json, "json");
    const ScanResult s = fuzz_theorems(seed, n_cases, {p_lo, p_hi}, {q_lo, q_hi}, config_of(cfg), jobs);
    *json = copy_string(dump(to_json(s)));
    if (passed) *passed = s.n_fail == 0 ? 1 : 0;
  });
}

lm_status lm_scan(double p_lo, double p_hi, double q_lo, double q_hi, unsigned steps, unsigned jobs,
                  const lm_config* cfg, char** json, int* passed) {
  return guarded([&] {
    need(json, "json");
    const ScanResult s = scan_shift_bound({p_lo, p_hi}, {q_lo, q_hi}, steps, config_of(cfg), jobs);
    *json = copy_string(dump(to_json(s, true)));
    if (passed) *passed = s.n_fail == 0 ? 1 : 0;
  });
}

}  // extern "C"
