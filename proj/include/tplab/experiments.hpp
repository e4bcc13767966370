#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tplab/solver.hpp"

namespace tplab {

using json = nlohmann::json;

/// Invalid configuration; the message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Known commands in a fixed order.
const std::vector<std::string>& experiment_commands();

struct ExperimentConfig {
  std::string name;
  std::string command;
  json problem = json::object();
  std::vector<double> refinements;  // mesh widths h
  std::uint64_t seed = 0;
  int cases = 1;
  json params = json::object();
  bool dump_fields = false;
};

/// Throws ConfigError on a schema violation.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

/// Problem from the JSON description
/// {grid:{n,r,h,dt|"auto"}, F_plus, F_minus, f|f_plus|f_minus, g, psi, phi, mode, theta, trace_order}.
/// `h` replaces grid.h when positive. Throws ConfigError.
TransmissionProblem build_problem(const json& problem, double h, std::uint64_t seed);

/// Storage dt for "auto": r^2 / ceil(r^2 / (4 h^2)).
double auto_dt(double r, double h);

struct Assertion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "=="
  bool passed = false;
};

struct ExperimentResult {
  json report;  // deterministic
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, Field>> fields;  // dumped when requested
  bool passed() const;
};

/// Runs one experiment. Cases are distributed over `jobs` threads and
/// reduced in case order. Throws ConfigError or std::invalid_argument on bad
/// input and std::runtime_error on solver failure.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Writes report.json, cases.csv, metadata.json and requested field dumps.
void write_artifacts(const ExperimentResult& r, const std::string& out_dir, double wall_time);

/// Exact text written to report.json.
std::string report_text(const ExperimentResult& r);

/// Number formatting shared by CSV rows (17 significant digits).
std::string fmt(double v);

}  // namespace tplab
