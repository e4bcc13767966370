#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "tplab/experiments.hpp"

namespace {
struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  std::string cmd = std::string(TPLAB_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string src = TPLAB_SOURCE_DIR;

// Scratch directory for configs and outputs; every relative path below lives here.
const std::string tmp = [] {
  auto d = std::filesystem::temp_directory_path() / "tplab_cli_tests";
  std::filesystem::create_directories(d);
  return d.string() + "/";
}();
}  // namespace

TEST_CASE("kink solve exits 0 and dumps the exact field") {
  std::string out = tmp + "cli_kink";
  Run r = run_cli("run " + src + "/experiments/c01_kink.json --out " + out + " --h 0.0625");
  CHECK(r.code == 0);
  auto rep = nlohmann::json::parse(slurp(out + "/report.json"));
  CHECK(rep["passed"].get<bool>());
  std::ifstream f(out + "/field_u_0.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line == "x1,t,side,value");
  double worst = 0.0;
  while (std::getline(f, line)) {
    double x, t, v;
    char side[8];
    if (std::sscanf(line.c_str(), "%lf,%lf,%7[^,],%lf", &x, &t, side, &v) != 4) continue;
    double ex = x > 0 ? 1.5 * x : -0.5 * x;
    worst = std::max(worst, std::abs(v - ex));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("proviso violation exits 1 with a message") {
  Run r = run_cli("run " + src + "/experiments/hopf_recursion_proviso_violated.json --out " + tmp + "cli_proviso");
  CHECK(r.code == 1);
  CHECK(r.out.find("proviso") != std::string::npos);
}

TEST_CASE("schema violations name the key") {
  std::ofstream(tmp + "cli_bad.json") << R"({"command": "solve", "problem": {"grid": {"n": 3, "h": 0.1}}})";
  Run r = run_cli("run " + tmp + "cli_bad.json --out " + tmp + "cli_bad");
  CHECK(r.code == 1);
  CHECK(r.out.find("problem.grid.n") != std::string::npos);
  std::ofstream(tmp + "cli_bad2.json") << R"({"command": "solve", "refinments": [0.1]})";
  r = run_cli("run " + tmp + "cli_bad2.json --out " + tmp + "cli_bad");
  CHECK(r.code == 1);
  CHECK(r.out.find("refinments") != std::string::npos);
}

TEST_CASE("failed assertions exit 2") {
  std::ofstream(tmp + "cli_fail.json") << R"({"command": "solve", "refinements": [0.125],
    "problem": {"grid": {"n": 1, "r": 1}, "phi": "heat-sep"},
    "params": {"exact": {"id": "const", "params": {"value": 5}}, "exact_tol": 1e-10}})";
  CHECK(run_cli("run " + tmp + "cli_fail.json --out " + tmp + "cli_fail").code == 2);
}

TEST_CASE("catalog listing is stable and complete") {
  Run a = run_cli("list-catalog"), b = run_cli("list-catalog");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  for (const char* id : {"kink", "heat-sep", "bump"}) CHECK(a.out.find(id) != std::string::npos);
}

TEST_CASE("constant-source abp has a refinement-stable constant") {
  Run r = run_cli("run " + src + "/experiments/abp_constant_source.json --out " + tmp + "cli_abp");
  CHECK(r.code == 0);
  std::ifstream f(tmp + "cli_abp/cases.csv");
  std::string line;
  int rows = -1;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  std::string cfg = src + "/experiments/c03_max_principle.json";
  CHECK(run_cli("run " + cfg + " --out " + tmp + "cli_det_a --h 0.0625").code == 0);
  CHECK(run_cli("run " + cfg + " --out " + tmp + "cli_det_b --h 0.0625 --jobs 3").code == 0);
  CHECK(slurp(tmp + "cli_det_a/report.json") == slurp(tmp + "cli_det_b/report.json"));
  CHECK_FALSE(slurp(tmp + "cli_det_a/metadata.json").empty());
}
