#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

using logmoment_cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("constants") {
  const Run r = run({"constants"});
  CHECK(r.code == 0);
  CHECK(r.out.find("C0 = 1.3211") != std::string::npos);
  const Run j = run({"--format", "json", "constants"});
  CHECK(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).at("c0").get<double>() == doctest::Approx(1.321099762015617));
}

TEST_CASE("ratio") {
  const Run r = run({"ratio", "--dist", "gamma-shift", "-p", "4", "-q", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("1.7320508") != std::string::npos);
  const Run j = run({"--format", "json", "ratio", "--dist", "gamma-shift", "-p", "4", "-q", "2"});
  CHECK(nlohmann::json::parse(j.out).at("ratio").get<double>() == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("moment") {
  const Run j = run({"--format", "json", "moment", "--dist", "exp:rate=2", "--s", "3"});
  CHECK(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).at("value").get<double>() == doctest::Approx(0.75));
}

TEST_CASE("verify exit codes") {
  CHECK(run({"verify", "--check", "grunbaum", "--dist", "gamma-shift"}).code == 0);
  CHECK(run({"verify", "--check", "zero-mean-bound", "--dist", "gamma-shift", "-p", "4", "-q", "2"}).code == 0);
  // The q = 2 sharpness sequence is decreasing, so the campaign reports a failure.
  CHECK(run({"verify", "--check", "sharp-constant-approach"}).code == 1);
  CHECK(run({"verify", "--check", "zero-mean-bound", "--dist", "exp:rate=1"}).code == 2);
  CHECK(run({"verify", "--check", "no-such-check"}).code == 2);
}

TEST_CASE("usage and parse errors exit 2") {
  CHECK(run({"ratio", "--dist", "gamma-shift", "-p", "4", "-q", "2", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--format", "yaml", "constants"}).code == 2);
  const Run r = run({"ratio", "--dist", "uniform:a=abc", "-p", "4", "-q", "2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("offset 10") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("numerical failures exit 3") {
  CHECK(run({"--max-subdivisions", "1", "--quad-rel-tol", "1e-15", "--quad-abs-tol", "1e-300", "moment", "--dist",
             "truncexp:a=3,b=5,alpha=-2", "--s", "0.5", "--quadrature"})
            .code == 3);
}

TEST_CASE("JSON output is byte-identical and round-trips") {
  const std::vector<std::string> args = {"--format", "json", "fuzz", "--n", "30"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j.at("seed") == 20240601);

  const Run v = run({"--format", "json", "verify", "--check", "zero-mean-bound", "--dist", "gamma-shift",
                     "--grid", "p=4,q=2"});
  const auto r = nlohmann::json::parse(v.out);
  const double lhs = r.at("lhs");
  const double rhs = r.at("rhs");
  CHECK(lhs == doctest::Approx(std::sqrt(3.0)));
  CHECK(r.at("margin").get<double>() == rhs - lhs);
  CHECK(r.at("pass").get<bool>() == (r.at("margin").get<double>() >= -r.at("numeric_caveat").get<double>()));
}

TEST_CASE("CSV output") {
  const Run r = run({"--format", "csv", "verify", "--check", "subfactorial-moments", "--grid", "n_max=4"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "check_id,params,lhs,rhs,margin,numeric_caveat,pass,note");
  std::string row;
  std::getline(in, row);
  CHECK(row.find("subfactorial") != std::string::npos);
  // 17 significant digits on non-integral values.
  const Run s = run({"--format", "csv", "scan", "--p-range", "3,4", "--q-range", "2,2", "--steps", "1"});
  std::istringstream sin(s.out);
  std::getline(sin, header);
  CHECK(header == "p,q,t_star,ratio_star,normalized,bound,margin,pass");
  std::getline(sin, row);
  const std::string t_star = row.substr(row.find(',', row.find(',') + 1) + 1);
  const std::string field = t_star.substr(0, t_star.find(','));
  std::size_t digits = 0;
  for (char c : field) digits += std::isdigit(static_cast<unsigned char>(c)) ? 1 : 0;
  CHECK(digits >= 16);
}

TEST_CASE("list covers the registry") {
  const Run r = run({"--format", "json", "verify", "--list"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.size() == 30);
  const Run t = run({"verify", "--list"});
  for (const auto& c : j) CHECK(t.out.find(c.at("id").get<std::string>()) != std::string::npos);
}

TEST_CASE("--out writes the file") {
  const auto path = std::filesystem::temp_directory_path() / "logmoment_cli_test.json";
  std::filesystem::remove(path);
  const Run r = run({"--format", "json", "--out", path.string(), "constants"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(nlohmann::json::parse(buf.str()).contains("c0"));
  std::filesystem::remove(path);
  CHECK(run({"--out", "/nonexistent/dir/x.json", "constants"}).code == 2);
}
