#ifndef LOGMOMENT_LOGMOMENT_H
#define LOGMOMENT_LOGMOMENT_H

/* C interface to the logmoment library.
 *
 * Every function returns an lm_status; results come back through out
 * parameters, which are left untouched on failure. After a failure,
 * lm_last_error() describes it (per thread). Strings returned through
 * char** must be released with lm_string_free. A NULL lm_config means
 * default tolerances. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LM_API __declspec(dllexport)
#else
#define LM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lm_status {
  LM_OK = 0,
  LM_ERR_INVALID_ARGUMENT = 1,
  LM_ERR_DOMAIN = 2,
  LM_ERR_INVALID_INTERVAL = 3,
  LM_ERR_NON_CONVERGENCE = 4,
  LM_ERR_NON_FINITE = 5,
  LM_ERR_NO_SIGN_CHANGE = 6,
  LM_ERR_NOT_CENTERED = 7,
  LM_ERR_OVERFLOW = 8,
  LM_ERR_PARSE = 9,
  LM_ERR_IO = 10,
  LM_ERR_UNKNOWN_CHECK = 11,
  LM_ERR_INTERNAL = 12
} lm_status;

typedef struct lm_config lm_config;
typedef struct lm_distribution lm_distribution;

typedef struct lm_moment {
  double s;
  double value; /* E|X|^s */
  double abs_error_estimate;
  int closed_form; /* 1 if no quadrature was involved */
} lm_moment;

typedef struct lm_constants {
  double w_inv_e; /* W(1/e) */
  double c0;      /* e^{W(1/e)} */
  double r0;      /* e W(1/e) */
  double lambda0; /* sqrt(2) / c0 */
} lm_constants;

LM_API const char* lm_last_error(void);
LM_API const char* lm_status_name(lm_status status);
LM_API const char* lm_version(void);
LM_API void lm_string_free(char* s);

/* Tolerances. Keys: quad_rel_tol, quad_abs_tol, root_tol, opt_tol,
 * max_subdivisions, tail_cut_log. lm_config_from_env applies
 * LOGMOMENT_<KEY> (upper case) environment overrides to the defaults. */
LM_API lm_status lm_config_create(lm_config** out);
LM_API lm_status lm_config_from_env(lm_config** out);
LM_API lm_status lm_config_set(lm_config* cfg, const char* key, double value);
LM_API lm_status lm_config_get(const lm_config* cfg, const char* key, double* value);
LM_API void lm_config_destroy(lm_config* cfg);

/* Distributions. spec uses the mini-grammar
 *   exp[:rate=R] | shiftexp:t=T | truncexp:a=A,b=B,alpha=L | gamma-shift |
 *   uniform:a=A | plc:file=PATH */
LM_API lm_status lm_distribution_parse(const char* spec, lm_distribution** out);
LM_API lm_status lm_distribution_from_json(const char* json, lm_distribution** out);
LM_API lm_status lm_distribution_random(uint64_t seed, unsigned complexity, int symmetric, lm_distribution** out);
LM_API lm_status lm_distribution_center(const lm_distribution* d, lm_distribution** out);
LM_API lm_status lm_distribution_describe(const lm_distribution* d, char** out);
LM_API lm_status lm_distribution_to_json(const lm_distribution* d, char** out);
LM_API void lm_distribution_destroy(lm_distribution* d);

LM_API lm_status lm_density(const lm_distribution* d, double x, double* out);
LM_API lm_status lm_mean(const lm_distribution* d, double* out);
LM_API lm_status lm_variance(const lm_distribution* d, double* out);
LM_API lm_status lm_prob_negative(const lm_distribution* d, double* out);
LM_API lm_status lm_is_symmetric(const lm_distribution* d, int* out);
LM_API lm_status lm_is_nonnegative(const lm_distribution* d, int* out);

/* quadrature != 0 forces the generic quadrature route. */
LM_API lm_status lm_abs_moment(const lm_distribution* d, double s, int quadrature, const lm_config* cfg,
                               lm_moment* out);
LM_API lm_status lm_log_abs_moment(const lm_distribution* d, double s, int quadrature, const lm_config* cfg,
                                   double* log_value, double* relative_error);
LM_API lm_status lm_norm(const lm_distribution* d, double s, const lm_config* cfg, double* out);
/* ‖X‖_p / ‖X‖_q; relative_error may be NULL. */
LM_API lm_status lm_ratio(const lm_distribution* d, double p, double q, const lm_config* cfg, double* value,
                          double* relative_error);

/* Special functions. */
LM_API lm_status lm_gamma_p1(double x, double* out);
LM_API lm_status lm_log_gamma_p1(double x, double* out);
LM_API lm_status lm_stirling_correction(double x, double* out);
LM_API lm_status lm_gamma_growth(double x, double* out);
LM_API lm_status lm_lambert_w(double y, double* out);
LM_API lm_status lm_exponential_norm(double s, double* out);
LM_API lm_status lm_subfactorial(unsigned n, uint64_t* out);
LM_API lm_status lm_get_constants(lm_constants* out);

/* Shifted-exponential quantities; E is a unit exponential. */
LM_API lm_status lm_shift_integral(double s, double t, const lm_config* cfg, double* value, double* abs_error);
LM_API lm_status lm_shifted_moment(double s, double t, const lm_config* cfg, double* value, double* abs_error);
LM_API lm_status lm_minimizing_shift(double q, const lm_config* cfg, double* out);
LM_API lm_status lm_balance_point(double q, const lm_config* cfg, double* out);
LM_API lm_status lm_truncation_bound(double q, const lm_config* cfg, double* out);
LM_API lm_status lm_shift_roots_json(double q, const lm_config* cfg, char** json);

/* Extremal searches, results as JSON. t_hi <= 0 selects the default range. */
LM_API lm_status lm_max_ratio_shifted_exp(double p, double q, double t_hi, size_t profile_points,
                                          const lm_config* cfg, char** json);
LM_API lm_status lm_max_ratio_trunc_exp(double p, double q, size_t starts, uint64_t seed, const lm_config* cfg,
                                        char** json);

/* Verification. lm_check_list_json returns [{"id","kind","summary"}...].
 * dist and grid ("key=v[:v...],key=v") may be NULL. passed receives 1 when
 * every record passed. */
LM_API lm_status lm_check_list_json(char** json);
LM_API lm_status lm_run_check(const char* id, const lm_distribution* dist, const char* grid, int exploratory,
                              unsigned jobs, uint64_t seed, int include_records, const lm_config* cfg, char** json,
                              int* passed);
LM_API lm_status lm_fuzz(uint64_t seed, size_t n_cases, double p_lo, double p_hi, double q_lo, double q_hi,
                         unsigned jobs, const lm_config* cfg, char** json, int* passed);
LM_API lm_status lm_scan(double p_lo, double p_hi, double q_lo, double q_hi, unsigned steps, unsigned jobs,
                         const lm_config* cfg, char** json, int* passed);

#ifdef __cplusplus
}
#endif

#endif
