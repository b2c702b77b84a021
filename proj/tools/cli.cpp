#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "logmoment/logmoment.h"

namespace logmoment_cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 20240601;

// A failed library call; carries the status for the exit code.
struct LibraryError {
  lm_status status;
  std::string message;
};

struct UsageError {
  std::string message;
};

void check(lm_status status) {
  if (status != LM_OK) throw LibraryError{status, lm_last_error()};
}

Json take_json(char* text) {
  std::unique_ptr<char, decltype(&lm_string_free)> owned(text, &lm_string_free);
  return Json::parse(owned.get());
}

using ConfigPtr = std::unique_ptr<lm_config, decltype(&lm_config_destroy)>;
using DistPtr = std::unique_ptr<lm_distribution, decltype(&lm_distribution_destroy)>;

DistPtr parse_dist(const std::string& spec) {
  lm_distribution* d = nullptr;
  check(lm_distribution_parse(spec.c_str(), &d));
  return DistPtr(d, &lm_distribution_destroy);
}

std::string num(double x, int digits = 17) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

std::string num(const Json& j, int digits = 17) {
  if (j.is_null()) return "nan";
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  return num(j.get<double>(), digits);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto comma = text.find(',');
  const auto parse_one = [&](const std::string& token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (token.empty() || used != token.size()) {
      throw UsageError{flag + ": expected a number, found '" + token + "'"};
    }
    return v;
  };
  if (comma == std::string::npos) throw UsageError{flag + ": expected LO,HI, found '" + text + "'"};
  return {parse_one(text.substr(0, comma)), parse_one(text.substr(comma + 1))};
}

struct Globals {
  std::string format = "text";
  std::string out_path;
  unsigned jobs = 1;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> quad_rel_tol, quad_abs_tol, root_tol, opt_tol, max_subdivisions, tail_cut_log;
};

ConfigPtr make_config(const Globals& g) {
  lm_config* raw = nullptr;
  check(lm_config_from_env(&raw));
  ConfigPtr cfg(raw, &lm_config_destroy);
  const std::pair<const char*, const std::optional<double>*> overrides[] = {
      {"quad_rel_tol", &g.quad_rel_tol},       {"quad_abs_tol", &g.quad_abs_tol}, {"root_tol", &g.root_tol},
      {"opt_tol", &g.opt_tol},                 {"max_subdivisions", &g.max_subdivisions},
      {"tail_cut_log", &g.tail_cut_log},
  };
  for (const auto& [key, value] : overrides) {
    if (*value) check(lm_config_set(cfg.get(), key, **value));
  }
  return cfg;
}

// --- rendering -------------------------------------------------------------

std::string params_text(const Json& params, const char* sep) {
  std::string out;
  for (const auto& [k, v] : params.items()) {
    if (!out.empty()) out += sep;
    out += k + "=" + num(v, 10);
  }
  return out;
}

void report_text(std::ostream& os, const Json& r) {
  os << (r.at("pass").get<bool>() ? "PASS " : "FAIL ") << r.at("check_id").get<std::string>();
  const std::string params = params_text(r.at("params"), " ");
  if (!params.empty()) os << " [" << params << "]";
  os << ": lhs = " << num(r.at("lhs"), 15) << " <= rhs = " << num(r.at("rhs"), 15)
     << " (margin " << num(r.at("margin"), 6) << ", caveat " << num(r.at("numeric_caveat"), 3) << ")";
  if (r.contains("note")) os << " " << r.at("note").get<std::string>();
  os << "\n";
}

void scan_text(std::ostream& os, const Json& s) {
  const bool ok = s.at("n_fail").get<std::size_t>() == 0;
  os << (ok ? "PASS " : "FAIL ") << s.at("check_id").get<std::string>() << ": " << num(s.at("n_points"))
     << " points, " << num(s.at("n_fail")) << " failed, " << num(s.at("n_skipped")) << " skipped";
  if (!s.at("seed").is_null()) os << ", seed " << num(s.at("seed"));
  os << "\n";
  if (!s.at("worst").is_null()) {
    os << "worst: ";
    report_text(os, s.at("worst"));
  }
  std::size_t shown = 0;
  for (const Json& f : s.at("failures")) {
    if (++shown > 20) {
      os << "... " << s.at("failures").size() - 20 << " more failures\n";
      break;
    }
    os << "failure #" << num(f.at("index")) << ": ";
    report_text(os, f.at("report"));
    if (f.contains("distribution")) os << "  distribution: " << f.at("distribution").dump() << "\n";
  }
}

void reports_csv(std::ostream& os, const Json& records) {
  os << "check_id,params,lhs,rhs,margin,numeric_caveat,pass,note\n";
  for (const Json& r : records) {
    os << csv_field(r.at("check_id").get<std::string>()) << "," << csv_field(params_text(r.at("params"), ";"))
       << "," << num(r.at("lhs")) << "," << num(r.at("rhs")) << "," << num(r.at("margin")) << ","
       << num(r.at("numeric_caveat")) << "," << num(r.at("pass")) << ","
       << csv_field(r.value("note", std::string())) << "\n";
  }
}

void outcome_csv(std::ostream& os, const Json& outcome) {
  if (outcome.contains("records")) {
    reports_csv(os, outcome.at("records"));
  } else if (outcome.contains("n_points")) {
    Json rows = Json::array();
    for (const Json& f : outcome.at("failures")) rows.push_back(f.at("report"));
    reports_csv(os, rows);
  } else {
    reports_csv(os, Json::array({outcome}));
  }
}

bool outcome_passed(const Json& outcome) {
  if (outcome.contains("n_fail")) return outcome.at("n_fail").get<std::size_t>() == 0;
  return outcome.at("pass").get<bool>();
}

void outcome_text(std::ostream& os, const Json& outcome) {
  if (outcome.contains("n_points")) {
    scan_text(os, outcome);
  } else {
    report_text(os, outcome);
  }
}

// --- commands --------------------------------------------------------------

struct Result {
  std::string body;
  int code = kExitPass;
};

Result cmd_constants(const Globals& g) {
  lm_constants k{};
  check(lm_get_constants(&k));
  std::ostringstream os;
  const std::pair<const char*, double> rows[] = {
      {"W(1/e)", k.w_inv_e}, {"C0", k.c0}, {"r0", k.r0}, {"lambda0", k.lambda0}};
  if (g.format == "json") {
    Json j = {{"w_inv_e", k.w_inv_e}, {"c0", k.c0}, {"r0", k.r0}, {"lambda0", k.lambda0}};
    os << j.dump(2) << "\n";
  } else if (g.format == "csv") {
    os << "name,value\n";
    for (const auto& [name, v] : rows) os << csv_field(name) << "," << num(v) << "\n";
  } else {
    for (const auto& [name, v] : rows) {
      os << name << " = " << std::fixed << std::setprecision(4) << v << std::defaultfloat << "  (" << num(v)
         << ")\n";
    }
  }
  return {os.str()};
}

Result cmd_moment(const Globals& g, const lm_config* cfg, const std::string& spec, double s, bool quadrature) {
  const DistPtr d = parse_dist(spec);
  lm_moment m{};
  check(lm_abs_moment(d.get(), s, quadrature ? 1 : 0, cfg, &m));
  const char* method = m.closed_form ? "closed_form" : "quadrature";
  std::ostringstream os;
  if (g.format == "json") {
    Json j = {{"dist", spec}, {"s", m.s}, {"value", m.value}, {"abs_error_estimate", m.abs_error_estimate},
              {"method", method}};
    os << j.dump(2) << "\n";
  } else if (g.format == "csv") {
    os << "dist,s,value,abs_error_estimate,method\n"
       << csv_field(spec) << "," << num(m.s) << "," << num(m.value) << "," << num(m.abs_error_estimate) << ","
       << method << "\n";
  } else {
    os << "E|X|^" << num(s, 10) << " = " << num(m.value) << "  (abs error " << num(m.abs_error_estimate, 3) << ", "
       << method << ")\n";
  }
  return {os.str()};
}

Result cmd_ratio(const Globals& g, const lm_config* cfg, const std::string& spec, double p, double q) {
  const DistPtr d = parse_dist(spec);
  double value = 0.0;
  double rel = 0.0;
  check(lm_ratio(d.get(), p, q, cfg, &value, &rel));
  std::ostringstream os;
  if (g.format == "json") {
    Json j = {{"dist", spec}, {"p", p}, {"q", q}, {"ratio", value}, {"relative_error", rel}};
    os << j.dump(2) << "\n";
  } else if (g.format == "csv") {
    os << "dist,p,q,ratio,relative_error\n"
       << csv_field(spec) << "," << num(p) << "," << num(q) << "," << num(value) << "," << num(rel) << "\n";
  } else {
    os << "||X||_" << num(p, 10) << " / ||X||_" << num(q, 10) << " = " << num(value) << "  (relative error "
       << num(rel, 3) << ")\n";
  }
  return {os.str()};
}

Result cmd_extremal(const Globals& g, const lm_config* cfg, double p, double q, const std::string& family,
                    double t_hi, std::size_t profile, std::size_t starts) {
  char* raw = nullptr;
  if (family == "shifted-exp") {
    check(lm_max_ratio_shifted_exp(p, q, t_hi, profile, cfg, &raw));
  } else {
    check(lm_max_ratio_trunc_exp(p, q, starts, g.seed, cfg, &raw));
  }
  const Json j = take_json(raw);
  std::ostringstream os;
  if (g.format == "json") {
    os << j.dump(2) << "\n";
  } else if (g.format == "csv") {
    if (j.contains("profile")) {
      os << "t,ratio\n";
      for (const Json& row : j.at("profile")) os << num(row.at(0)) << "," << num(row.at(1)) << "\n";
    } else if (family == "shifted-exp") {
      os << "p,q,t_hi,t_star,ratio_star,normalized\n"
         << num(j.at("p")) << "," << num(j.at("q")) << "," << num(j.at("t_hi")) << "," << num(j.at("t_star")) << ","
         << num(j.at("ratio_star")) << "," << num(j.at("normalized")) << "\n";
    } else {
      const Json& b = j.at("best");
      os << "p,q,alpha,a,b,ratio,normalized,a_at_upper_edge,evaluations\n"
         << num(j.at("p")) << "," << num(j.at("q")) << "," << num(b.at("alpha")) << "," << num(b.at("a")) << ","
         << num(b.at("b")) << "," << num(j.at("ratio")) << "," << num(j.at("normalized")) << ","
         << num(j.at("a_at_upper_edge")) << "," << num(j.at("evaluations")) << "\n";
    }
  } else if (family == "shifted-exp") {
    os << "shifted exponential, p = " << num(p, 10) << ", q = " << num(q, 10) << ", t in [0, "
       << num(j.at("t_hi"), 10) << "]\n"
       << "  t* = " << num(j.at("t_star"), 12) << "\n"
       << "  max ratio = " << num(j.at("ratio_star")) << "\n"
       << "  normalized (q/p) = " << num(j.at("normalized")) << "\n";
    if (j.contains("profile")) {
      os << "  profile:\n";
      for (const Json& row : j.at("profile")) os << "    " << num(row.at(0), 10) << "  " << num(row.at(1), 15) << "\n";
    }
  } else {
    const Json& b = j.at("best");
    os << "truncated exponential, p = " << num(p, 10) << ", q = " << num(q, 10) << "\n"
       << "  best alpha = " << num(b.at("alpha"), 10) << ", a = " << num(b.at("a"), 10)
       << ", b = " << num(b.at("b"), 10) << "\n"
       << "  max ratio = " << num(j.at("ratio")) << "\n"
       << "  normalized (q/p) = " << num(j.at("normalized")) << "\n"
       << "  a on upper box edge: " << num(j.at("a_at_upper_edge")) << "\n";
  }
  return {os.str()};
}

Result render_outcome(const Globals& g, const Json& outcome) {
  std::ostringstream os;
  if (g.format == "json") {
    os << outcome.dump(2) << "\n";
  } else if (g.format == "csv") {
    outcome_csv(os, outcome);
  } else {
    outcome_text(os, outcome);
  }
  return {os.str(), outcome_passed(outcome) ? kExitPass : kExitCheckFailed};
}

Result cmd_list(const Globals& g) {
  char* raw = nullptr;
  check(lm_check_list_json(&raw));
  const Json list = take_json(raw);
  std::ostringstream os;
  if (g.format == "json") {
    os << list.dump(2) << "\n";
  } else if (g.format == "csv") {
    os << "id,kind,summary\n";
    for (const Json& c : list) {
      os << csv_field(c.at("id").get<std::string>()) << "," << c.at("kind").get<std::string>() << ","
         << csv_field(c.at("summary").get<std::string>()) << "\n";
    }
  } else {
    for (const Json& c : list) {
      os << std::left << std::setw(36) << c.at("id").get<std::string>() << std::setw(14)
         << c.at("kind").get<std::string>() << c.at("summary").get<std::string>() << "\n";
    }
  }
  return {os.str()};
}

struct VerifyArgs {
  std::string check;
  bool list = false;
  std::string dist;
  std::optional<double> p, q;
  std::string grid;
  bool exploratory = false;
  bool records = false;
};

Result cmd_verify(const Globals& g, const lm_config* cfg, const VerifyArgs& a) {
  if (a.list) return cmd_list(g);
  if (a.check.empty()) throw UsageError{"verify: --check ID or --list is required"};
  std::string grid = a.grid;
  const auto add = [&grid](const char* key, const std::optional<double>& v) {
    if (!v) return;
    if (!grid.empty()) grid += ",";
    std::ostringstream s;
    s << key << "=" << std::setprecision(17) << *v;
    grid += s.str();
  };
  add("p", a.p);
  add("q", a.q);
  DistPtr d(nullptr, &lm_distribution_destroy);
  if (!a.dist.empty()) d = parse_dist(a.dist);
  char* raw = nullptr;
  int passed = 0;
  check(lm_run_check(a.check.c_str(), d.get(), grid.empty() ? nullptr : grid.c_str(), a.exploratory ? 1 : 0, g.jobs,
                     g.seed, (a.records || g.format == "csv") ? 1 : 0, cfg, &raw, &passed));
  return render_outcome(g, take_json(raw));
}

Result cmd_fuzz(const Globals& g, const lm_config* cfg, std::size_t n, const std::string& p_range,
                const std::string& q_range) {
  const auto [p_lo, p_hi] = parse_range(p_range, "--p-range");
  const auto [q_lo, q_hi] = parse_range(q_range, "--q-range");
  char* raw = nullptr;
  int passed = 0;
  check(lm_fuzz(g.seed, n, p_lo, p_hi, q_lo, q_hi, g.jobs, cfg, &raw, &passed));
  return render_outcome(g, take_json(raw));
}

Result cmd_scan(const Globals& g, const lm_config* cfg, const std::string& p_range, const std::string& q_range,
                unsigned steps) {
  const auto [p_lo, p_hi] = parse_range(p_range, "--p-range");
  const auto [q_lo, q_hi] = parse_range(q_range, "--q-range");
  char* raw = nullptr;
  int passed = 0;
  check(lm_scan(p_lo, p_hi, q_lo, q_hi, steps, g.jobs, cfg, &raw, &passed));
  Json s = take_json(raw);
  const int code = passed ? kExitPass : kExitCheckFailed;
  std::ostringstream os;
  if (g.format == "csv") {
    os << "p,q,t_star,ratio_star,normalized,bound,margin,pass\n";
    for (const Json& r : s.at("records")) {
      const Json& pr = r.at("params");
      os << num(pr.at("p")) << "," << num(pr.at("q")) << "," << num(pr.at("t_star")) << ","
         << num(pr.at("ratio_star")) << "," << num(r.at("lhs")) << "," << num(r.at("rhs")) << ","
         << num(r.at("margin")) << "," << num(r.at("pass")) << "\n";
    }
  } else if (g.format == "json") {
    os << s.dump(2) << "\n";
  } else {
    s.erase("records");
    scan_text(os, s);
  }
  return {os.str(), code};
}

int exit_code_for(lm_status status) {
  switch (status) {
    case LM_ERR_NON_CONVERGENCE:
    case LM_ERR_NON_FINITE:
    case LM_ERR_NO_SIGN_CHANGE:
    case LM_ERR_OVERFLOW:
    case LM_ERR_INVALID_INTERVAL:
    case LM_ERR_INTERNAL:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moment comparison toolkit for log-concave distributions", "logmoment"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", g.out_path, "Write the result to this file instead of stdout");
  app.add_option("--jobs", g.jobs, "Worker threads for scan, fuzz and batch checks")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--quad-rel-tol", g.quad_rel_tol, "Quadrature relative tolerance");
  app.add_option("--quad-abs-tol", g.quad_abs_tol, "Quadrature absolute tolerance");
  app.add_option("--root-tol", g.root_tol, "Root-finding tolerance on the argument");
  app.add_option("--opt-tol", g.opt_tol, "Optimizer tolerance on the argument");
  app.add_option("--max-subdivisions", g.max_subdivisions, "Quadrature subdivision budget");
  app.add_option("--tail-cut-log", g.tail_cut_log, "Log-scale cut for semi-infinite integrals");

  auto* constants = app.add_subcommand("constants", "Print W(1/e), C0, r0 and lambda0");

  std::string dist;
  double s = 0.0;
  bool quadrature = false;
  auto* moment = app.add_subcommand("moment", "E|X|^s for one distribution");
  moment->add_option("--dist", dist, "Distribution spec")->required();
  moment->add_option("--s", s, "Moment order (> -1)")->required();
  moment->add_flag("--quadrature", quadrature, "Force the generic quadrature route");

  double p = 0.0;
  double q = 0.0;
  auto* ratio = app.add_subcommand("ratio", "||X||_p / ||X||_q for one distribution");
  ratio->add_option("--dist", dist, "Distribution spec")->required();
  ratio->add_option("-p", p, "Larger order")->required();
  ratio->add_option("-q", q, "Smaller order")->required();

  std::string family = "shifted-exp";
  double t_hi = 0.0;
  std::size_t profile = 0;
  std::size_t starts = 8;
  auto* extremal = app.add_subcommand("extremal", "Maximize the moment ratio over an extremal family");
  extremal->add_option("-p", p, "Larger order")->required();
  extremal->add_option("-q", q, "Smaller order")->required();
  extremal->add_option("--family", family, "Family to search")
      ->check(CLI::IsMember({"shifted-exp", "trunc-exp"}))
      ->capture_default_str();
  extremal->add_option("--t-hi", t_hi, "Upper end of the shift range (default 10 max(1, ||E||_p))");
  extremal->add_option("--profile", profile, "Also sample the ratio at N shifts (shifted-exp only)");
  extremal->add_option("--starts", starts, "Multi-start count (trunc-exp only)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
      ->capture_default_str();

  VerifyArgs v;
  std::optional<double> vp, vq;
  auto* verify = app.add_subcommand("verify", "Run one registered check or list them");
  verify->add_option("--check", v.check, "Check id");
  verify->add_flag("--list", v.list, "List registered checks");
  verify->add_option("--dist", v.dist, "Distribution spec (distribution checks)");
  verify->add_option("-p", vp, "Larger order");
  verify->add_option("-q", vq, "Smaller order");
  verify->add_option("--grid", v.grid, "Parameters, key=v[:v...],key=v");
  verify->add_flag("--exploratory", v.exploratory, "Allow general-bound below q = 2");
  verify->add_flag("--records", v.records, "Include every record in JSON output");

  std::size_t n = 100;
  std::string p_range = "1,20";
  std::string q_range = "1,20";
  auto* fuzz = app.add_subcommand("fuzz", "Random log-concave densities against both moment bounds");
  fuzz->add_option("--n", n, "Number of cases")->capture_default_str();
  fuzz->add_option("--p-range", p_range, "LO,HI")->capture_default_str();
  fuzz->add_option("--q-range", q_range, "LO,HI")->capture_default_str();

  unsigned steps = 8;
  std::string scan_p = "2.1,100";
  std::string scan_q = "2,100";
  auto* scan = app.add_subcommand("scan", "Normalized shifted-exponential maximum over a (p, q) grid");
  scan->add_option("--p-range", scan_p, "LO,HI")->capture_default_str();
  scan->add_option("--q-range", scan_q, "LO,HI")->capture_default_str();
  scan->add_option("--steps", steps, "Grid points per axis")->check(CLI::Range(1u, 1000u))->capture_default_str();

  std::vector<std::string> argv_store{"logmoment"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    const ConfigPtr cfg = make_config(g);
    Result result;
    if (constants->parsed()) {
      result = cmd_constants(g);
    } else if (moment->parsed()) {
      result = cmd_moment(g, cfg.get(), dist, s, quadrature);
    } else if (ratio->parsed()) {
      result = cmd_ratio(g, cfg.get(), dist, p, q);
    } else if (extremal->parsed()) {
      if (family == "trunc-exp" && profile > 0) throw UsageError{"--profile applies to the shifted-exp family"};
      result = cmd_extremal(g, cfg.get(), p, q, family, t_hi, profile, starts);
    } else if (verify->parsed()) {
      v.p = vp;
      v.q = vq;
      result = cmd_verify(g, cfg.get(), v);
    } else if (fuzz->parsed()) {
      result = cmd_fuzz(g, cfg.get(), n, p_range, q_range);
    } else {
      result = cmd_scan(g, cfg.get(), scan_p, scan_q, steps);
    }
    if (g.out_path.empty()) {
      out << result.body;
    } else {
      std::ofstream file(g.out_path, std::ios::binary);
      if (!file) {
        err << "error: cannot open '" << g.out_path << "' for writing\n";
        return kExitUsage;
      }
      file << result.body;
      if (!file) {
        err << "error: failed writing '" << g.out_path << "'\n";
        return kExitUsage;
      }
    }
    return result.code;
  } catch (const UsageError& e) {
    err << "error: " << e.message << "\n";
    return kExitUsage;
  } catch (const LibraryError& e) {
    err << "error (" << lm_status_name(e.status) << "): " << e.message << "\n";
    return exit_code_for(e.status);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace logmoment_cli
