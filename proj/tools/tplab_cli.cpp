#include <chrono>
#include <iostream>

#include "CLI11.hpp"
#include "tplab/catalog.hpp"
#include "tplab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference lab for parabolic transmission problems"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  int jobs = 1;
  double h_override = 0.0;
  auto* run = app.add_subcommand("run", "Run an experiment config and write its report");
  run->set_help_flag("--help", "Print this help message and exit");
  run->add_option("config", config_path, "Experiment JSON")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--h", h_override, "Replace the refinement list by one mesh width");

  auto* cat = app.add_subcommand("list-catalog", "Print built-in expressions and interface families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*cat) {
    for (const auto& e : tplab::catalog_entries()) std::cout << e.role << "\t" << e.id << "\t" << e.doc << "\n";
    return 0;
  }

  try {
    tplab::ExperimentConfig cfg = tplab::load_config(config_path);
    if (h_override > 0.0) cfg.refinements = {h_override};
    auto t0 = std::chrono::steady_clock::now();
    tplab::ExperimentResult r = tplab::run_experiment(cfg, jobs);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    tplab::write_artifacts(r, out_dir, wall);
    for (const auto& a : r.assertions)
      std::cout << (a.passed ? "ok   " : "FAIL ") << a.name << " = " << tplab::fmt(a.value) << " " << a.relation
                << " " << tplab::fmt(a.threshold) << "\n";
    std::cout << (r.passed() ? "passed" : "failed") << " (" << wall << " s)\n";
    return r.passed() ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
