#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sbp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sbp::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("alpha-star reports both roots") {
  const Result r = invoke({"alpha-star", "--n", "21"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(std::abs(doc["roots"][0].get<double>() - 481.3408873321106) < 1e-9);
  CHECK(std::abs(doc["roots"][1].get<double>() - 481.3408873321106) < 1e-9);
}

TEST_CASE("borrowing capacity") {
  const Result r = invoke({"borrowing", "--alpha", "490", "--n", "24"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(nlohmann::json::parse(r.out)["gamma"].get<double>() - 0.187871502626966) < 1e-9);
}

TEST_CASE("verify prints every residual") {
  const Result r = invoke({"verify", "--order", "6", "--alpha", "490", "--n", "24"});
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["second_derivative"]["passed"] == true);
  CHECK(doc["second_derivative"]["checks"].size() > 5);
  const Result csv = invoke({"verify", "--order", "4", "--n", "20", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("operator,check,residual,tolerance,passed\n", 0) == 0);
  CHECK(csv.out.find("first_derivative") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(invoke({}).code == sbp::cli::kExitUsage);
  CHECK(invoke({"nonsense"}).code == sbp::cli::kExitUsage);
  CHECK(invoke({"borrowing", "--n", "24"}).code == sbp::cli::kExitUsage);
  CHECK(invoke({"borrowing", "--alpha", "490", "--n", "5"}).code == sbp::cli::kExitUsage);
  CHECK(invoke({"borrowing", "--alpha", "490", "--n", "abc"}).code == sbp::cli::kExitUsage);
  CHECK(invoke({"poisson", "--alpha", "490", "--bc", "sideways"}).code == sbp::cli::kExitUsage);
  CHECK(invoke({"poisson", "--alpha", "490", "--bc", "dirichlet", "--phi", "0.5"}).code == sbp::cli::kExitUsage);
  CHECK(invoke({"alpha-star", "--format", "xml"}).code == sbp::cli::kExitUsage);
  CHECK(invoke({"poisson", "--alpha", "490", "--bc", "dirichlet", "--phi", "1"}).code == sbp::cli::kExitNumerical);
  CHECK(invoke({"borrowing", "--alpha", "481.3408873321106", "--n", "24"}).code == sbp::cli::kExitNumerical);
  CHECK(invoke({"compat-min-alpha", "--beta", "0.66073109567901234"}).code == sbp::cli::kExitNumerical);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("check mode") {
  const Result pass = invoke({"borrowing", "--alpha", "483", "--n", "24", "--check"});
  CHECK(pass.code == 0);
  CHECK(pass.err.find("PASS") != std::string::npos);
  const Result truncation = invoke({"truncation", "--n", "24", "--check"});
  CHECK(truncation.code == 0);
  const Result quad = invoke({"poisson", "--alpha", "490", "--bc", "mixed", "--solution", "quad", "--check"});
  CHECK(quad.code == 0);
  const Result none = invoke({"poisson", "--alpha", "490", "--n", "12", "--check"});
  CHECK(none.code == 0);
  CHECK(none.err.find("no acceptance criterion") != std::string::npos);
  const Result table = invoke({"alpha-star", "--n", "11", "--check"});
  CHECK(table.code == 0);
  const Result unstable = invoke({"heat", "--alpha", "480", "--n", "30", "--t-end", "1", "--check"});
  CHECK(unstable.code == 0);
  const Result unstable_plain = invoke({"heat", "--alpha", "480", "--n", "30", "--t-end", "1"});
  CHECK(unstable_plain.code == sbp::cli::kExitNumerical);
}

TEST_CASE("check mode reports failures with exit code 4") {
  // The alpha grid misses the spectral-radius minimizer.
  const Result r = invoke({"spectrum", "--bc", "dirichlet", "--phi-list", "1", "--alpha-min", "490", "--alpha-max",
                           "495", "--alpha-step", "1", "--check"});
  CHECK(r.code == sbp::cli::kExitCheckFailed);
  CHECK(r.err.find("FAIL") != std::string::npos);
}

TEST_CASE("rank tolerance comes from the environment") {
  setenv("SBP_RANK_TOL", "1e-3", 1);
  const Result loose = invoke({"spectrum", "--alpha", "490", "--format", "json"});
  setenv("SBP_RANK_TOL", "-1", 1);
  const Result bad = invoke({"spectrum", "--alpha", "490"});
  unsetenv("SBP_RANK_TOL");
  REQUIRE(loose.code == 0);
  CHECK(nlohmann::json::parse(loose.out)["rank_tolerance"].get<double>() == 1e-3);
  CHECK(bad.code == sbp::cli::kExitUsage);
}

TEST_CASE("sweeps are deterministic and ordered") {
  const std::vector<std::string> args = {"spectrum", "--bc", "dirichlet", "--alpha-min", "486", "--alpha-max", "488",
                                         "--alpha-step", "0.5", "--phi-list", "1,2", "--n", "16"};
  std::vector<std::string> threaded = args;
  threaded.insert(threaded.end(), {"--jobs", "3"});
  const Result a = invoke(args), b = invoke(threaded);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream lines(a.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "alpha,phi,n,spectral_radius,min_eigenvalue,numeric_rank,near_zero");
  std::getline(lines, line);
  CHECK(line.rfind("486,1,16,", 0) == 0);
  std::getline(lines, line);
  CHECK(line.rfind("486,2,16,", 0) == 0);
  int rows = 2;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 10);
}

TEST_CASE("optimum sweep csv columns") {
  const Result r = invoke({"optimum-sweep", "--n", "16", "--alpha-min", "484", "--alpha-max", "490", "--alpha-step",
                           "3", "--phi-list", "1.5,3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("alpha,phi,n,h_norm,l2_norm,max_norm,rho,rel_error,rel_rho,pareto_flag\n", 0) == 0);
}

TEST_CASE("time marching outputs") {
  const Result heat = invoke({"heat", "--alpha", "490", "--n", "16", "--t-end", "0.01", "--format", "json"});
  REQUIRE(heat.code == 0);
  const auto doc = nlohmann::json::parse(heat.out);
  CHECK(doc["stable"] == true);
  CHECK(doc["steps"].get<int>() == doc["completed_steps"].get<int>());
  const Result wave = invoke({"wave", "--alpha", "490", "--n", "16", "--t-end", "0.1"});
  REQUIRE(wave.code == 0);
  CHECK(wave.out.rfind("step,t,h_norm,l2_norm,max_norm\n", 0) == 0);
  const Result bad_dt = invoke({"wave", "--alpha", "490", "--n", "16", "--dt", "1"});
  CHECK(bad_dt.code == sbp::cli::kExitUsage);
}

TEST_CASE("build-operator exports a parseable document") {
  const Result r = invoke({"build-operator", "--order", "6", "--alpha", "490", "--n", "12", "--bc", "dirichlet"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["H_diag"].size() == 13);
  CHECK(doc["bc_left"] == "dirichlet");
  CHECK(doc["D"].size() == 13);
}
