#include "logmoment/serialization.hpp"

#include <cmath>
#include <limits>

#include "logmoment/error.hpp"

namespace logmoment {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

double read_number(const Json& j, const char* key, double if_null = kNaN) {
  const Json& v = field(j, key);
  if (v.is_null()) return if_null;
  if (!v.is_number()) fail(ErrorCode::parse, std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

std::size_t read_count(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned()) fail(ErrorCode::parse, std::string("field '") + key + "' is not a count");
  return v.get<std::size_t>();
}

std::string read_string(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) fail(ErrorCode::parse, std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

Json params_json(const std::vector<std::pair<std::string, double>>& params) {
  Json out = Json::object();
  for (const auto& [k, v] : params) out[k] = number(v);
  return out;
}

Json potential_body(const PiecewiseLinearPotential& p) {
  Json knots = Json::array();
  for (const Knot& k : p.knots) knots.push_back({k.x, k.v});
  return {{"knots", knots}, {"left_slope", number(p.left_slope)}, {"right_slope", number(p.right_slope)}};
}

}  // namespace

std::string_view method_name(MomentMethod m) {
  return m == MomentMethod::closed_form ? "closed_form" : "quadrature";
}

Json to_json(const Distribution& d) {
  return std::visit(Overloaded{
                        [](const Exponential& x) { return Json{{"family", "exp"}, {"rate", x.rate}}; },
                        [](const ShiftedExponential& x) { return Json{{"family", "shiftexp"}, {"t", x.t}}; },
                        [](const TruncatedExponential& x) {
                          return Json{{"family", "truncexp"}, {"a", x.a}, {"b", x.b}, {"alpha", x.alpha}};
                        },
                        [](const GammaShift&) { return Json{{"family", "gamma-shift"}}; },
                        [](const SymmetricUniform& x) { return Json{{"family", "uniform"}, {"a", x.a}}; },
                        [](const PiecewiseLinearPotential& p) {
                          Json out = {{"family", "plc"}};
                          out.update(potential_body(p));
                          return out;
                        },
                    },
                    d);
}

Distribution distribution_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::parse, "distribution must be a JSON object");
  const std::string family = j.contains("family") ? read_string(j, "family") : "plc";
  Distribution d;
  if (family == "exp") {
    d = Exponential{read_number(j, "rate")};
  } else if (family == "shiftexp") {
    d = ShiftedExponential{read_number(j, "t")};
  } else if (family == "truncexp") {
    d = TruncatedExponential{read_number(j, "a"), read_number(j, "b"), read_number(j, "alpha")};
  } else if (family == "gamma-shift") {
    d = GammaShift{};
  } else if (family == "uniform") {
    d = SymmetricUniform{read_number(j, "a")};
  } else if (family == "plc") {
    d = parse_potential_json(j.dump());
  } else {
    fail(ErrorCode::parse, "unknown distribution family '" + family + "'");
  }
  try {
    validate(d);
  } catch (const Error& e) {
    fail(ErrorCode::parse, std::string("invalid distribution: ") + e.what());
  }
  return d;
}

Json to_json(const VerificationReport& r) {
  Json out = {{"check_id", r.check_id},
              {"params", params_json(r.params)},
              {"lhs", number(r.lhs)},
              {"rhs", number(r.rhs)},
              {"margin", number(r.margin)},
              {"pass", r.pass},
              {"numeric_caveat", number(r.numeric_caveat)}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

VerificationReport report_from_json(const Json& j) {
  VerificationReport r;
  r.check_id = read_string(j, "check_id");
  const Json& params = field(j, "params");
  if (!params.is_object()) fail(ErrorCode::parse, "field 'params' is not an object");
  for (const auto& [k, v] : params.items()) {
    if (!v.is_null() && !v.is_number()) fail(ErrorCode::parse, "parameter '" + k + "' is not a number");
    r.params.emplace_back(k, v.is_null() ? kNaN : v.get<double>());
  }
  r.lhs = read_number(j, "lhs");
  r.rhs = read_number(j, "rhs");
  r.margin = read_number(j, "margin");
  const Json& pass = field(j, "pass");
  if (!pass.is_boolean()) fail(ErrorCode::parse, "field 'pass' is not a boolean");
  r.pass = pass.get<bool>();
  r.numeric_caveat = read_number(j, "numeric_caveat");
  if (j.contains("note")) r.note = read_string(j, "note");
  return r;
}

Json to_json(const ScanResult& s, bool include_records) {
  Json out = {{"check_id", s.check_id},
              {"n_points", s.n_points},
              {"n_fail", s.n_fail},
              {"n_skipped", s.n_skipped},
              {"seed", s.seed ? Json(*s.seed) : Json()},
              {"worst", s.n_points > 0 ? to_json(s.worst) : Json()}};
  Json failures = Json::array();
  for (const FailureRecord& f : s.failures) {
    Json item = {{"index", f.index}};
    if (f.distribution) item["distribution"] = to_json(*f.distribution);
    item["report"] = to_json(f.report);
    failures.push_back(std::move(item));
  }
  out["failures"] = std::move(failures);
  if (include_records) {
    Json records = Json::array();
    for (const VerificationReport& r : s.records) records.push_back(to_json(r));
    out["records"] = std::move(records);
  }
  return out;
}

ScanResult scan_from_json(const Json& j) {
  ScanResult s;
  s.check_id = read_string(j, "check_id");
  s.n_points = read_count(j, "n_points");
  s.n_fail = read_count(j, "n_fail");
  if (j.contains("n_skipped")) s.n_skipped = read_count(j, "n_skipped");
  if (j.contains("seed") && !j.at("seed").is_null()) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("worst") && !j.at("worst").is_null()) s.worst = report_from_json(j.at("worst"));
  if (j.contains("failures")) {
    for (const Json& item : j.at("failures")) {
      FailureRecord f;
      f.index = read_count(item, "index");
      if (item.contains("distribution")) f.distribution = distribution_from_json(item.at("distribution"));
      f.report = report_from_json(field(item, "report"));
      s.failures.push_back(std::move(f));
    }
  }
  if (j.contains("records")) {
    for (const Json& item : j.at("records")) s.records.push_back(report_from_json(item));
  }
  return s;
}

Json to_json(const MomentValue& m) {
  return {{"s", m.s},
          {"value", number(m.value)},
          {"abs_error_estimate", number(m.abs_error_estimate)},
          {"method", method_name(m.method)}};
}

Json to_json(const ShiftScanResult& s) {
  Json out = {{"family", "shifted-exp"},
              {"p", s.p},
              {"q", s.q},
              {"t_hi", s.t_hi},
              {"t_star", s.t_star},
              {"ratio_star", number(s.ratio_star)},
              {"normalized", number(s.normalized)}};
  if (!s.profile.empty()) {
    Json profile = Json::array();
    for (const auto& [t, r] : s.profile) profile.push_back({t, number(r)});
    out["profile"] = std::move(profile);
  }
  return out;
}

Json to_json(const TruncScanResult& s) {
  return {{"family", "trunc-exp"},
          {"p", s.p},
          {"q", s.q},
          {"box",
           {{"alpha", {s.box.alpha.lo, s.box.alpha.hi}},
            {"a", {s.box.a.lo, s.box.a.hi}},
            {"b", {s.box.b.lo, s.box.b.hi}}}},
          {"best", {{"a", s.best.a}, {"b", s.best.b}, {"alpha", s.best.alpha}}},
          {"ratio", number(s.ratio)},
          {"normalized", number(s.normalized)},
          {"a_at_upper_edge", s.a_at_upper_edge},
          {"evaluations", s.evaluations}};
}

Json to_json(const ShiftRoots& r) {
  return {{"q", r.q},
          {"minimizing_shift", r.minimizing_shift},
          {"balance_point", r.balance_point},
          {"excess", r.excess},
          {"moment_at_minimum", number(r.moment_at_minimum)}};
}

Json to_json(const CheckOutcome& outcome, bool include_records) {
  if (const auto* r = std::get_if<VerificationReport>(&outcome)) return to_json(*r);
  return to_json(std::get<ScanResult>(outcome), include_records);
}

}  // namespace logmoment
