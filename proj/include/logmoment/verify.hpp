#pragma once

// Property checks producing structured pass/fail reports.
//
// Every report states an inequality lhs <= rhs. margin = rhs - lhs and the
// check passes when margin >= -numeric_caveat, where the caveat is the
// propagated quadrature error plus a small rounding allowance. Equalities
// with a tolerance are written as |a - b| <= tol. Ratio-type checks are
// expressed in units of ‖X‖_q, so margins are comparable across scales.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "logmoment/distributions.hpp"

namespace logmoment {

struct VerificationReport {
  std::string check_id;
  std::vector<std::pair<std::string, double>> params;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  double numeric_caveat = 0.0;
  std::string note;

  bool operator==(const VerificationReport&) const = default;
};

/// Builds a report, filling margin and pass from lhs, rhs and caveat. A
/// rounding allowance of 8 eps (|lhs| + |rhs|) is added to the caveat.
VerificationReport make_report(std::string check_id, std::vector<std::pair<std::string, double>> params,
                               double lhs, double rhs, double caveat, std::string note = {});

/// pass as recomputed from the stored lhs, rhs and caveat.
bool recomputed_pass(const VerificationReport& r);

struct FailureRecord {
  std::size_t index = 0;
  std::optional<Distribution> distribution;
  VerificationReport report;

  bool operator==(const FailureRecord&) const = default;
};

struct ScanResult {
  std::string check_id;
  std::size_t n_points = 0;
  std::size_t n_fail = 0;
  std::size_t n_skipped = 0;
  std::optional<std::uint64_t> seed;
  VerificationReport worst;
  std::vector<VerificationReport> records;
  std::vector<FailureRecord> failures;

  bool operator==(const ScanResult&) const = default;
};

/// Counts, picks the worst record (smallest margin + caveat) and collects
/// failing records in order.
ScanResult summarize(std::string check_id, std::vector<VerificationReport> records,
                     std::optional<std::uint64_t> seed = std::nullopt);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// ‖X‖_p / ‖X‖_q <= ‖E‖_p / ‖E‖_q for symmetric or nonnegative X, p >= q >= 1.
VerificationReport verify_symmetric_positive(const Distribution& d, double p, double q,
                                             const ToleranceConfig& cfg);

/// ‖X‖_p <= (p/q) ‖X‖_q for mean-zero X, p >= q >= 1. Throws not_centered
/// when |E X| > 1e-8.
VerificationReport verify_zero_mean(const Distribution& d, double p, double q, const ToleranceConfig& cfg);

/// ‖X‖_p <= C0 (p/q) ‖X‖_q for p > q >= 2. q < 2 is a domain error unless
/// exploratory is set, in which case the report is labelled as outside the
/// proven range.
VerificationReport verify_general(const Distribution& d, double p, double q, const ToleranceConfig& cfg,
                                  bool exploratory = false);

/// P(X < 0) >= 1/e for mean-zero X. Throws not_centered when |E X| > 1e-8.
VerificationReport verify_grunbaum(const Distribution& d, const ToleranceConfig& cfg);

/// E(E - 1)^n = !n and ‖E - 1‖_n / ‖E - 1‖_2 = (!n)^{1/n} for even n <= n_max
/// (2 <= n_max <= 20).
ScanResult verify_subfactorial_moments(unsigned n_max, const ToleranceConfig& cfg);

/// Normalized ratio (q/p) ‖E - t‖_p / ‖E - t‖_q at t = W(1/e) q along
/// p_list: every value <= C0, values increasing in p, and the last one at
/// least C0 e^{-t/p} (1 + g(q))^{-1/q}.
ScanResult verify_sharpness(double q, const std::vector<double>& p_list, const ToleranceConfig& cfg);

/// Identifiers of the grid checks run by verify_gadgets, in order.
const std::vector<std::string>& gadget_ids();

/// Runs one grid check on its registered grid.
ScanResult run_gadget(std::string_view id, const ToleranceConfig& cfg);

/// All grid checks; records keep their own check_id.
ScanResult verify_gadgets(const ToleranceConfig& cfg, unsigned jobs = 1);

/// Seeded random potentials: case i is centered and checked against the
/// p/q bound with q drawn from q_range, then checked uncentered against the
/// C0 p/q bound with q drawn from q_range clipped to q >= 2.
ScanResult fuzz_theorems(std::uint64_t seed, std::size_t n_cases, Range p_range, Range q_range,
                         const ToleranceConfig& cfg, unsigned jobs = 1);

/// Shift search over a steps x steps grid of (p, q) with p > q, checking the
/// normalized maximum against C0.
ScanResult scan_shift_bound(Range p_range, Range q_range, unsigned steps, const ToleranceConfig& cfg,
                            unsigned jobs = 1);

/// Truncated-exponential search against the shift search at each (p, q):
/// the former may not exceed the latter by more than 1e-5, and its a must
/// sit on the upper box edge.
ScanResult verify_trunc_consistency(const std::vector<std::pair<double, double>>& pairs, std::size_t starts,
                                    const ToleranceConfig& cfg);

enum class CheckKind { distribution, grid, campaign };

struct CheckInfo {
  std::string id;
  CheckKind kind;
  std::string summary;
};

const std::vector<CheckInfo>& check_registry();

/// key -> list of values, parsed from "key=v[:v...],key=v".
using ParamMap = std::map<std::string, std::vector<double>>;
ParamMap parse_grid(std::string_view spec);

struct CheckRequest {
  std::string id;
  std::optional<Distribution> distribution;
  ParamMap params;
  bool exploratory = false;
  unsigned jobs = 1;
  std::uint64_t seed = kDefaultSeed;
};

using CheckOutcome = std::variant<VerificationReport, ScanResult>;

/// Dispatches a registered check. Throws unknown_check for an unregistered
/// id and invalid_argument for missing or unexpected inputs.
CheckOutcome run_check(const CheckRequest& request, const ToleranceConfig& cfg);

bool passed(const CheckOutcome& outcome);

}  // namespace logmoment
