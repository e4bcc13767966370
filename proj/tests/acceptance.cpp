// One PASS/FAIL line per acceptance criterion. Thresholds live in the
// experiment configs under experiments/ and in the runners' assertions.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "tplab/experiments.hpp"

namespace {

const std::string dir = std::string(TPLAB_SOURCE_DIR) + "/experiments/";

struct Criterion {
  int id;
  const char* title;
  std::vector<const char*> configs;
};

bool run_config(const std::string& name, std::string& detail) {
  try {
    auto t0 = std::chrono::steady_clock::now();
    tplab::ExperimentResult r = tplab::run_experiment(tplab::load_config(dir + name + ".json"), 1);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, " %.1fs", wall);
    detail += " " + name + buf;
    for (const auto& a : r.assertions)
      if (!a.passed) detail += " [" + a.name + "=" + tplab::fmt(a.value) + "]";
    return r.passed();
  } catch (const std::exception& e) {
    detail += " " + name + " error: " + e.what();
    return false;
  }
}

bool determinism(std::string& detail) {
  bool ok = true;
  for (const char* name : {"c01_kink", "c03_max_principle", "c09_envelope", "c11_hopf_recursion"}) {
    auto cfg = tplab::load_config(dir + name + ".json");
    std::string a = tplab::report_text(tplab::run_experiment(cfg, 1));
    std::string b = tplab::report_text(tplab::run_experiment(cfg, 1));
    if (a != b) {
      ok = false;
      detail += std::string(" ") + name + " differs";
    }
  }
  std::string d;
  ok = run_config("c12_determinism", d) && ok;
  detail += d;
  return ok;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact kink reproduction", {"c01_kink", "c01_kink_n2"}},
      {2, "flat decomposition identity", {"c02_decomposition"}},
      {3, "discrete maximum principle", {"c03_max_principle", "c03_max_principle_n2"}},
      {4, "ABP inequality", {"c04_abp"}},
      {5, "Harnack inequality", {"c05_harnack"}},
      {6, "oscillation decay", {"c06_osc_decay"}},
      {7, "C^{1,alpha} dyadic fit", {"c07_c1alpha_flat", "c07_c1alpha_bump"}},
      {8, "stability under flattening", {"c08_stability"}},
      {9, "parabolic envelope oracle", {"c09_envelope"}},
      {10, "eps-envelope properties", {"c10_eps_envelope"}},
      {11, "Hopf lemma and recursion", {"c11_hopf_flat", "c11_hopf_dini", "c11_hopf_recursion"}},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    bool ok = true;
    std::string detail;
    for (const char* cfg : c.configs) ok = run_config(cfg, detail) && ok;
    std::printf("%s %2d %s:%s\n", ok ? "PASS" : "FAIL", c.id, c.title, detail.c_str());
    std::fflush(stdout);
    failed += !ok;
  }
  std::string detail;
  bool ok = determinism(detail);
  std::printf("%s 12 byte-identical reports:%s\n", ok ? "PASS" : "FAIL", detail.c_str());
  failed += !ok;
  return failed == 0 ? 0 : 1;
}
