#include "tplab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "runners.hpp"
#include "tplab/catalog.hpp"
#include "tplab/kernels.hpp"

namespace tplab {

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> cmds = {
      "solve",   "abp",      "harnack",      "osc-decay", "holder",         "c1alpha",
      "stability", "envelope", "eps-envelope", "hopf",     "hopf-recursion", "decomposition",
      "max-principle", "perron", "determinism"};
  return cmds;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double auto_dt(double r, double h) {
  double N = std::ceil(r * r / (4.0 * h * h) - 1e-9);
  return r * r / std::max(N, 1.0);
}

namespace {

bool gridless(const std::string& cmd) {
  return cmd == "hopf-recursion" || cmd == "envelope" || cmd == "eps-envelope" || cmd == "determinism";
}

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + where + it.key() + "'");
}

double num(const json& j, const std::string& key, double dflt, const std::string& where) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) throw ConfigError("key '" + where + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

SpaceTimeFn detail::expr_from_json(const json& e, int n, std::uint64_t seed, const std::string& key) {
  if (e.is_number()) {
    double v = e.get<double>();
    return [v](const Point&) { return v; };
  }
  std::string id;
  Params p;
  if (e.is_string()) {
    id = e.get<std::string>();
  } else if (e.is_object()) {
    require_keys(e, {"id", "params"}, key + ".");
    if (!e.contains("id") || !e["id"].is_string()) throw ConfigError("key '" + key + ".id' must be a string");
    id = e["id"].get<std::string>();
    if (e.contains("params")) {
      if (!e["params"].is_object()) throw ConfigError("key '" + key + ".params' must be an object");
      for (auto it = e["params"].begin(); it != e["params"].end(); ++it) {
        if (!it.value().is_number()) throw ConfigError("key '" + key + ".params." + it.key() + "' must be a number");
        p[it.key()] = it.value().get<double>();
      }
    }
  } else {
    throw ConfigError("key '" + key + "' must be a number, an expression id or {id, params}");
  }
  try {
    return make_expr(id, p, n, seed);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("key '" + key + "': " + ex.what());
  }
}

namespace {

OperatorSpec op(const json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError("key '" + key + "' must be an object");
  require_keys(j, {"kind", "lambda", "Lambda"}, key + ".");
  std::string kind = j.value("kind", std::string("trace"));
  try {
    return OperatorSpec::make(operator_kind_from_string(kind), num(j, "lambda", 1.0, key + "."),
                              num(j, "Lambda", 1.0, key + "."));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("key '" + key + "': " + ex.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  require_keys(j, {"name", "command", "problem", "refinements", "seed", "cases", "params", "dump_fields", "note"}, "");
  ExperimentConfig c;
  if (!j.contains("command") || !j["command"].is_string()) throw ConfigError("key 'command' is required (string)");
  c.command = j["command"].get<std::string>();
  const auto& cmds = experiment_commands();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end())
    throw ConfigError("key 'command': unknown command '" + c.command + "'");
  c.name = c.command;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("key 'name' must be a string");
    c.name = j["name"].get<std::string>();
  }
  if (j.contains("problem")) {
    if (!j["problem"].is_object()) throw ConfigError("key 'problem' must be an object");
    c.problem = j["problem"];
  }
  if (j.contains("refinements")) {
    if (!j["refinements"].is_array()) throw ConfigError("key 'refinements' must be an array");
    for (const auto& v : j["refinements"]) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("key 'refinements' must hold positive numbers");
      c.refinements.push_back(v.get<double>());
    }
    if (c.refinements.empty()) throw ConfigError("key 'refinements' must be nonempty");
  } else if (c.problem.contains("grid") && c.problem["grid"].contains("h")) {
    c.refinements.push_back(num(c.problem["grid"], "h", 0.0, "problem.grid."));
  } else if (gridless(c.command)) {
    c.refinements.push_back(0.0);
  } else {
    throw ConfigError("key 'refinements' is required (or problem.grid.h)");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      throw ConfigError("key 'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("cases")) {
    if (!j["cases"].is_number_integer() || j["cases"].get<long long>() < 1)
      throw ConfigError("key 'cases' must be a positive integer");
    c.cases = j["cases"].get<int>();
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("key 'params' must be an object");
    c.params = j["params"];
  }
  if (j.contains("dump_fields")) {
    if (!j["dump_fields"].is_boolean()) throw ConfigError("key 'dump_fields' must be a boolean");
    c.dump_fields = j["dump_fields"].get<bool>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

TransmissionProblem build_problem(const json& pj, double h, std::uint64_t seed) {
  require_keys(pj, {"grid", "F_plus", "F_minus", "f", "f_plus", "f_minus", "g", "psi", "phi", "mode", "theta",
                    "trace_order", "ellipticity_samples"},
               "problem.");
  if (!pj.contains("grid") || !pj["grid"].is_object()) throw ConfigError("key 'problem.grid' is required (object)");
  const json& gj = pj["grid"];
  require_keys(gj, {"n", "r", "h", "dt", "center", "t0"}, "problem.grid.");
  if (!gj.contains("n") || !gj["n"].is_number_integer()) throw ConfigError("key 'problem.grid.n' is required (1 or 2)");
  int n = gj["n"].get<int>();
  if (n != 1 && n != 2) throw ConfigError("key 'problem.grid.n' must be 1 or 2");
  double r = num(gj, "r", 1.0, "problem.grid.");
  if (!(h > 0.0)) h = num(gj, "h", 0.0, "problem.grid.");
  if (!(h > 0.0)) throw ConfigError("key 'problem.grid.h' is required");
  double dt = 0.0;
  if (!gj.contains("dt") || (gj["dt"].is_string() && gj["dt"].get<std::string>() == "auto")) dt = auto_dt(r, h);
  else if (gj["dt"].is_number()) dt = gj["dt"].get<double>();
  else throw ConfigError("key 'problem.grid.dt' must be a number or \"auto\"");
  std::array<double, 2> center{0.0, 0.0};
  if (gj.contains("center")) {
    if (!gj["center"].is_array() || gj["center"].size() != static_cast<std::size_t>(n))
      throw ConfigError("key 'problem.grid.center' must be an array of n numbers");
    for (int a = 0; a < n; ++a) center[a] = gj["center"][a].get<double>();
  }
  TransmissionProblem p;
  try {
    p.grid = make_grid(n, r, h, dt, center, num(gj, "t0", 0.0, "problem.grid."));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("key 'problem.grid': ") + e.what());
  }
  p.F_plus = pj.contains("F_plus") ? op(pj["F_plus"], "problem.F_plus") : OperatorSpec::make(OperatorKind::trace_laplace, 1, 1);
  p.F_minus = pj.contains("F_minus") ? op(pj["F_minus"], "problem.F_minus") : p.F_plus;
  if (pj.contains("f")) p.f_plus = p.f_minus = detail::expr_from_json(pj["f"], n, seed, "problem.f");
  if (pj.contains("f_plus")) p.f_plus = detail::expr_from_json(pj["f_plus"], n, seed, "problem.f_plus");
  if (pj.contains("f_minus")) p.f_minus = detail::expr_from_json(pj["f_minus"], n, seed, "problem.f_minus");
  if (pj.contains("g")) {
    SpaceTimeFn gf = detail::expr_from_json(pj["g"], n, seed, "problem.g");
    p.g = [gf, n](double xp, double t) {
      Point q;
      if (n == 2) q.x[0] = xp;
      q.t = t;
      return gf(q);
    };
  }
  p.phi = pj.contains("phi") ? detail::expr_from_json(pj["phi"], n, seed, "problem.phi") : SpaceTimeFn([](const Point&) { return 0.0; });
  std::string mode = pj.value("mode", std::string("transmission"));
  if (mode == "transmission") p.mode = InterfaceMode::transmission;
  else if (mode == "continuous") p.mode = InterfaceMode::continuous;
  else if (mode == "one_phase") p.mode = InterfaceMode::one_phase;
  else if (mode == "none") p.mode = InterfaceMode::none;
  else throw ConfigError("key 'problem.mode': unknown mode '" + mode + "'");
  p.theta = num(pj, "theta", 0.4, "problem.");
  p.trace_order = static_cast<int>(num(pj, "trace_order", 1, "problem."));
  p.ellipticity_samples = static_cast<int>(num(pj, "ellipticity_samples", 200, "problem."));
  std::string family = "flat";
  std::map<std::string, double> pp;
  double alpha = 0.5;
  if (pj.contains("psi")) {
    const json& s = pj["psi"];
    if (!s.is_object()) throw ConfigError("key 'problem.psi' must be an object");
    require_keys(s, {"family", "params"}, "problem.psi.");
    family = s.value("family", std::string("flat"));
    if (s.contains("params")) {
      if (!s["params"].is_object()) throw ConfigError("key 'problem.psi.params' must be an object");
      for (auto it = s["params"].begin(); it != s["params"].end(); ++it) pp[it.key()] = it.value().get<double>();
    }
    if (pp.count("alpha")) alpha = pp["alpha"];
  }
  try {
    p.gamma = make_interface(p.grid, family, pp, alpha);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("key 'problem.psi': ") + e.what());
  }
  return p;
}

bool ExperimentResult::passed() const {
  for (const auto& a : assertions)
    if (!a.passed) return false;
  return true;
}

ExperimentResult run_experiment(const ExperimentConfig& c, int jobs) {
  using namespace detail;
  ExperimentResult r;
  const std::string& m = c.command;
  if (m == "solve") r = run_solve(c, jobs);
  else if (m == "decomposition") r = run_decomposition(c, jobs);
  else if (m == "max-principle") r = run_max_principle(c, jobs);
  else if (m == "perron") r = run_perron(c, jobs);
  else if (m == "abp") r = run_abp(c, jobs);
  else if (m == "harnack") r = run_harnack(c, jobs);
  else if (m == "osc-decay") r = run_osc_decay(c, jobs);
  else if (m == "holder") r = run_holder(c, jobs);
  else if (m == "c1alpha") r = run_c1alpha(c, jobs);
  else if (m == "stability") r = run_stability(c, jobs);
  else if (m == "envelope") r = run_envelope(c, jobs);
  else if (m == "eps-envelope") r = run_eps_envelope(c, jobs);
  else if (m == "hopf") r = run_hopf(c, jobs);
  else if (m == "hopf-recursion") r = run_hopf_recursion(c, jobs);
  else if (m == "determinism") r = run_determinism(c, jobs);
  else throw ConfigError("key 'command': unknown command '" + m + "'");
  json head = json::object();
  head["name"] = c.name;
  head["command"] = c.command;
  head["seed"] = c.seed;
  head["refinements"] = c.refinements;
  json asserts = json::array();
  for (const auto& a : r.assertions)
    asserts.push_back({{"name", a.name}, {"value", a.value}, {"relation", a.relation}, {"threshold", a.threshold},
                       {"passed", a.passed}});
  head["assertions"] = asserts;
  head["passed"] = r.passed();
  for (auto it = r.report.begin(); it != r.report.end(); ++it) head[it.key()] = it.value();
  r.report = head;
  return r;
}

std::string report_text(const ExperimentResult& r) { return r.report.dump(2) + "\n"; }

void write_artifacts(const ExperimentResult& r, const std::string& out_dir, double wall_time) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream o(fs::path(out_dir) / "report.json");
    o << report_text(r);
  }
  {
    std::ofstream o(fs::path(out_dir) / "cases.csv");
    for (std::size_t i = 0; i < r.csv_header.size(); ++i) o << (i ? "," : "") << r.csv_header[i];
    o << "\n";
    for (const auto& row : r.csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << row[i];
      o << "\n";
    }
  }
  for (const auto& [name, f] : r.fields) {
    std::ofstream o(fs::path(out_dir) / ("field_" + name + ".csv"));
    f.write_csv(o);
  }
  std::time_t now = std::time(nullptr);
  char ts[64];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json meta = {{"timestamp", ts}, {"wall_time_s", wall_time}, {"isa", kernels::isa_name(kernels::active_isa())}};
  std::ofstream o(fs::path(out_dir) / "metadata.json");
  o << meta.dump(2) << "\n";
}

namespace detail {

void check(ExperimentResult& r, const std::string& name, double value, const std::string& rel, double threshold) {
  Assertion a{name, value, threshold, rel, false};
  if (rel == "<=") a.passed = value <= threshold;
  else if (rel == "<") a.passed = value < threshold;
  else if (rel == ">=") a.passed = value >= threshold;
  else if (rel == ">") a.passed = value > threshold;
  else if (rel == "==") a.passed = value == threshold;
  if (std::isnan(value)) a.passed = false;
  r.assertions.push_back(a);
}

double param_num(const ExperimentConfig& c, const char* key, double dflt) {
  if (!c.params.contains(key)) return dflt;
  if (!c.params[key].is_number()) throw ConfigError(std::string("key 'params.") + key + "' must be a number");
  return c.params[key].get<double>();
}

std::vector<double> param_list(const ExperimentConfig& c, const char* key, std::vector<double> dflt) {
  if (!c.params.contains(key)) return dflt;
  const json& v = c.params[key];
  if (!v.is_array()) throw ConfigError(std::string("key 'params.") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("key 'params.") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string param_str(const ExperimentConfig& c, const char* key, const std::string& dflt) {
  if (!c.params.contains(key)) return dflt;
  if (!c.params[key].is_string()) throw ConfigError(std::string("key 'params.") + key + "' must be a string");
  return c.params[key].get<std::string>();
}

json problem_or_throw(const ExperimentConfig& c) {
  if (!c.problem.contains("grid")) throw ConfigError("key 'problem.grid' is required for command '" + c.command + "'");
  return c.problem;
}

}  // namespace detail

}  // namespace tplab
