#include <algorithm>
#include <cmath>

#include "runners.hpp"
#include "tplab/catalog.hpp"
#include "tplab/envelopes.hpp"
#include "tplab/hopf.hpp"
#include "tplab/rng.hpp"

namespace tplab::detail {

namespace {

// Lower convex envelope by enumerating supporting lines through node pairs.
std::vector<double> supporting_line_hull(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t N = x.size();
  std::vector<double> out(y);
  if (N < 2) return out;
  std::fill(out.begin(), out.end(), -INFINITY);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      double b = (y[j] - y[i]) / (x[j] - x[i]);
      double a = y[i] - b * x[i];
      bool below = true;
      for (std::size_t k = 0; k < N && below; ++k)
        if (a + b * x[k] > y[k] + 1e-12 * (1.0 + std::abs(y[k]))) below = false;
      if (!below) continue;
      for (std::size_t k = 0; k < N; ++k) out[k] = std::max(out[k], a + b * x[k]);
    }
  return out;
}

Field random_field(GridPtr g, std::uint64_t seed, std::uint64_t stream, double smooth_amp, double noise) {
  CounterRng rng(seed, stream);
  SpaceTimeFn s = random_smooth(g->n, seed, stream, smooth_amp, 4, 0.0, 4.0);
  Field u(g);
  for (std::size_t id = 0; id < u.size(); ++id)
    u.v[id] = g->in(id) ? s(g->point(id)) + noise * rng.uniform(-1.0, 1.0) : 0.0;
  return u;
}

struct EnvCase {
  int m = 0, nt = 0;
  double err = 0.0;
};

EnvCase envelope_oracle_case(std::uint64_t seed, int i) {
  CounterRng rng(seed, 1000 + i);
  EnvCase e;
  e.m = 2 * rng.integer(2, 12) + 1;  // odd, at most 25
  e.nt = rng.integer(2, 13);
  GridPtr g = make_grid(1, 1.0, 2.0 / (e.m - 1), 1.0 / (e.nt - 1));
  Field u = random_field(g, seed, 2000 + i, 1.0, rng.uniform(0.0, 1.0));
  EnvelopeResult env = parabolic_convex_envelope(u);
  std::vector<double> x(g->m), run(g->m, INFINITY);
  for (int s = 0; s < g->m; ++s) x[s] = g->coord(s, 0);
  for (int k = 0; k < g->nt; ++k) {
    for (int s = 0; s < g->m; ++s) run[s] = std::min(run[s], u.v[g->node(k, s)]);
    std::vector<double> ref = supporting_line_hull(x, run);
    for (int s = 0; s < g->m; ++s) e.err = std::max(e.err, std::abs(ref[s] - env.envelope.v[g->node(k, s)]));
  }
  return e;
}

struct Invariants {
  double below = -INFINITY;      // max (C - u)
  double convexity = INFINITY;   // min second difference
  double monotone = -INFINITY;   // max C(t+dt) - C(t)
  int sweeps = 0;
};

Invariants envelope_invariants(const Field& u, const Field& C) {
  const GridCylinder& g = *C.grid;
  Invariants r;
  const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int k = 0; k < g.nt; ++k)
    for (int j = 0; j < g.m; ++j)
      for (int i = 0; i < g.m; ++i) {
        std::size_t s = g.spatial_index(i, j);
        if (!g.inside[s]) continue;
        std::size_t id = g.node(k, s);
        r.below = std::max(r.below, C.v[id] - u.v[id]);
        if (k + 1 < g.nt) r.monotone = std::max(r.monotone, C.v[g.node(k + 1, s)] - C.v[id]);
        for (const auto& d : dirs) {
          int i0 = i - d[0], j0 = j - d[1], i1 = i + d[0], j1 = j + d[1];
          if (i0 < 0 || j0 < 0 || i1 >= g.m || j1 >= g.m || i0 >= g.m || j0 >= g.m || j1 < 0) continue;
          std::size_t a = g.spatial_index(i0, j0), b = g.spatial_index(i1, j1);
          if (!g.inside[a] || !g.inside[b]) continue;
          r.convexity = std::min(r.convexity, C.v[g.node(k, a)] + C.v[g.node(k, b)] - 2.0 * C.v[id]);
        }
      }
  return r;
}

}  // namespace

ExperimentResult run_envelope(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  const int n2 = static_cast<int>(param_num(c, "n2_cases", 10));
  const double h2 = param_num(c, "n2_h", 0.125);
  auto cases = parallel_map<EnvCase>(c.cases, jobs, [&](int i) { return envelope_oracle_case(c.seed, i); });
  struct Inv { Invariants v; };
  auto inv = parallel_map<Inv>(n2, jobs, [&](int i) {
    CounterRng rng(c.seed, 5000 + i);
    GridPtr g = make_grid(2, 1.0, h2, auto_dt(1.0, h2));
    Field u = random_field(g, c.seed, 6000 + i, 1.0, rng.uniform(0.0, 0.5));
    EnvelopeResult e = parabolic_convex_envelope(u);
    Inv out{envelope_invariants(u, e.envelope)};
    out.v.sweeps = e.sweeps;
    return out;
  });
  r.csv_header = {"kind", "case", "m", "nt", "oracle_error", "below", "convexity", "monotone", "sweeps"};
  double worst = 0.0, below = -INFINITY, conv = INFINITY, mono = -INFINITY;
  json rows = json::array(), rows2 = json::array();
  for (int i = 0; i < c.cases; ++i) {
    worst = std::max(worst, cases[i].err);
    rows.push_back({{"case", i}, {"m", cases[i].m}, {"nt", cases[i].nt}, {"oracle_error", cases[i].err}});
    r.csv_rows.push_back({"n1", std::to_string(i), std::to_string(cases[i].m), std::to_string(cases[i].nt),
                          fmt(cases[i].err), "", "", "", ""});
  }
  for (int i = 0; i < n2; ++i) {
    const auto& v = inv[i].v;
    below = std::max(below, v.below);
    conv = std::min(conv, v.convexity);
    mono = std::max(mono, v.monotone);
    rows2.push_back({{"case", i}, {"below", v.below}, {"convexity", v.convexity}, {"monotone", v.monotone},
                     {"sweeps", v.sweeps}});
    r.csv_rows.push_back({"n2", std::to_string(i), "", "", "", fmt(v.below), fmt(v.convexity), fmt(v.monotone),
                          std::to_string(v.sweeps)});
  }
  check(r, "oracle_error", worst, "<=", param_num(c, "oracle_tol", 1e-8));
  if (n2 > 0) {
    check(r, "n2_below_data", below, "<=", 1e-12);
    check(r, "n2_slice_convexity", conv, ">=", -1e-9);
    check(r, "n2_time_monotone", mono, "<=", 1e-12);
  }
  r.report["n1_cases"] = rows;
  r.report["n2_cases"] = rows2;
  return r;
}

ExperimentResult run_eps_envelope(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  const int n = static_cast<int>(param_num(c, "n", 2));
  const double h = param_num(c, "h", 0.125), rho = param_num(c, "rho", 0.5);
  const double noise = param_num(c, "noise", 0.2);
  auto eps_list = param_list(c, "eps", {0.05, 0.1, 0.2});
  const int ne = static_cast<int>(eps_list.size());
  struct Item { EpsPropertyReport up, lo; };
  auto items = parallel_map<Item>(c.cases * ne, jobs, [&](int idx) {
    int i = idx / ne;
    GridPtr g = make_grid(n, 1.0, h, auto_dt(1.0, h));
    Field u = random_field(g, c.seed, 1000 + i, 1.0, noise);
    double eps = eps_list[idx % ne];
    return Item{verify_eps_properties(upper_eps_envelope(u, eps, rho), u),
                verify_eps_properties(lower_eps_envelope(u, eps, rho), u)};
  });
  r.csv_header = {"case", "eps", "side", "passed", "lipschitz_measured", "lipschitz_bound", "max_displacement",
                  "displacement_bound", "worst_second_difference"};
  int failed = 0;
  double lip_ratio = 0.0, disp_ratio = 0.0;
  json rows = json::array();
  for (int idx = 0; idx < c.cases * ne; ++idx) {
    for (int side = 0; side < 2; ++side) {
      const EpsPropertyReport& p = side == 0 ? items[idx].up : items[idx].lo;
      if (!p.passed()) ++failed;
      if (p.lipschitz_bound > 0.0) lip_ratio = std::max(lip_ratio, p.lipschitz_measured / p.lipschitz_bound);
      if (p.displacement_bound > 0.0) disp_ratio = std::max(disp_ratio, p.max_displacement / p.displacement_bound);
      const char* sname = side == 0 ? "upper" : "lower";
      rows.push_back({{"case", idx / ne}, {"eps", eps_list[idx % ne]}, {"side", sname}, {"passed", p.passed()},
                      {"ordered", p.ordered}, {"lipschitz", p.lipschitz}, {"semiconvex", p.semiconvex},
                      {"displacement", p.displacement}, {"lipschitz_measured", p.lipschitz_measured},
                      {"lipschitz_bound", p.lipschitz_bound}, {"max_displacement", p.max_displacement},
                      {"displacement_bound", p.displacement_bound},
                      {"worst_second_difference", p.worst_second_difference}, {"violations", p.violations}});
      r.csv_rows.push_back({std::to_string(idx / ne), fmt(eps_list[idx % ne]), sname, p.passed() ? "1" : "0",
                            fmt(p.lipschitz_measured), fmt(p.lipschitz_bound), fmt(p.max_displacement),
                            fmt(p.displacement_bound), fmt(p.worst_second_difference)});
    }
  }
  check(r, "failed_property_checks", failed, "==", 0.0);
  r.report["max_lipschitz_ratio"] = lip_ratio;
  r.report["max_displacement_ratio"] = disp_ratio;
  r.report["cases"] = rows;
  return r;
}

ExperimentResult run_hopf(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  std::vector<std::array<double, 2>> dirs;
  const int n = pj["grid"]["n"].get<int>();
  if (n == 1) dirs = {{1.0, 0.0}};
  else dirs = {{0.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)}};
  auto radii = param_list(c, "r_values", {0.125, 0.0625, 0.03125, 0.015625});
  const double scale = param_num(c, "scale", 1.0);
  r.csv_header = {"h", "l1", "l2", "r", "value", "ratio", "resolved"};
  auto reps = parallel_map<HopfReport>(static_cast<int>(c.refinements.size()), jobs, [&](int k) {
    TransmissionProblem p = build_problem(pj, c.refinements[k], c.seed);
    if (!c.problem.contains("phi")) {
      InterfaceGraph gam = p.gamma;
      const int nn = p.grid->n;
      p.phi = [gam, nn, scale](const Point& q) {
        double xp = nn == 2 ? q.x[0] : 0.0;
        double rr = q.x[0] * q.x[0] + (nn == 2 ? q.x[1] * q.x[1] : 0.0);
        return scale * (2.0 - rr) * std::max(q.x[nn - 1] - gam.psi_fn(xp, q.t), 0.0);
      };
    }
    Field u = solve(p).first;
    return hopf_verify(u, dirs, radii);
  });
  json runs = json::array();
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const auto& rep = reps[k];
    double h = c.refinements[k];
    json probes = json::array();
    for (const auto& p : rep.probes) {
      probes.push_back({{"l", p.l}, {"r", p.r}, {"value", p.value}, {"ratio", p.ratio}, {"resolved", p.resolved}});
      r.csv_rows.push_back({fmt(h), fmt(p.l[0]), fmt(p.l[1]), fmt(p.r), fmt(p.value), fmt(p.ratio),
                            p.resolved ? "1" : "0"});
    }
    runs.push_back({{"h", h}, {"normalization", rep.normalization}, {"measured_c", rep.measured_c},
                    {"measured_c_resolved", rep.measured_c_resolved}, {"probes", probes}});
    check(r, "measured_c_h=" + fmt(h), rep.measured_c, ">", 0.0);
  }
  r.report["runs"] = runs;
  return r;
}

namespace {

struct Tuple {
  std::string kind;
  double kappa = 0.0, alpha = 1.0, rho = 0.0, alpha0 = 0.0, c0 = 0.0;
};

Tuple random_tuple(std::uint64_t seed, int i) {
  CounterRng rng(seed, 1000 + i);
  Tuple t;
  do {
    t.rho = rng.uniform(0.01, 0.5);
    t.alpha0 = rng.uniform(0.05, 0.95);
  } while ((1.0 - std::pow(t.rho, t.alpha0)) * (1.0 - t.rho) < 0.5);
  t.c0 = rng.uniform(0.05, 0.25);
  static const char* kinds[] = {"zero", "power", "log"};
  t.kind = kinds[rng.integer(0, 2)];
  double frac = rng.uniform(0.1, 1.0);
  if (t.kind == "power") {
    t.alpha = rng.uniform(0.2, 1.5);
    t.kappa = t.c0 * std::min(1.0, t.alpha) * frac;  // integral kappa / alpha
  } else if (t.kind == "log") {
    t.kappa = t.c0 * frac;  // integral kappa
  }
  return t;
}

}  // namespace

ExperimentResult run_hopf_recursion(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  const int K = static_cast<int>(param_num(c, "K", 64));
  std::vector<Tuple> tuples;
  if (c.params.contains("rho")) {
    Tuple t;
    t.rho = param_num(c, "rho", 0.1);
    t.alpha0 = param_num(c, "alpha0", 0.5);
    t.c0 = param_num(c, "c0", 0.25);
    t.kind = param_str(c, "kind", "zero");
    t.kappa = param_num(c, "kappa", 0.0);
    t.alpha = param_num(c, "alpha", 1.0);
    tuples.push_back(t);
  } else {
    for (int i = 0; i < c.cases; ++i) tuples.push_back(random_tuple(c.seed, i));
  }
  auto recs = parallel_map<HopfRecursion>(static_cast<int>(tuples.size()), jobs, [&](int i) {
    const Tuple& t = tuples[i];
    return hopf_recursion(DiniModulus::make(t.kind, t.kappa, t.alpha), t.rho, t.alpha0, t.c0, K);
  });
  r.csv_header = {"case", "kind", "kappa", "alpha", "rho", "alpha0", "c0", "sum", "bound", "within_bound", "exact"};
  json rows = json::array();
  int outside = 0, inexact = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const Tuple& t = tuples[i];
    const HopfRecursion& h = recs[i];
    double sum = h.partial.back();
    worst = std::max(worst, sum / h.bound);
    if (!h.within_bound) ++outside;
    if (!h.recurrence_exact) ++inexact;
    rows.push_back({{"case", i}, {"kind", t.kind}, {"kappa", t.kappa}, {"alpha", t.alpha}, {"rho", t.rho},
                    {"alpha0", t.alpha0}, {"c0", t.c0}, {"sum", sum}, {"bound", h.bound},
                    {"within_bound", h.within_bound}, {"recurrence_exact", h.recurrence_exact}});
    r.csv_rows.push_back({std::to_string(i), t.kind, fmt(t.kappa), fmt(t.alpha), fmt(t.rho), fmt(t.alpha0),
                          fmt(t.c0), fmt(sum), fmt(h.bound), h.within_bound ? "1" : "0",
                          h.recurrence_exact ? "1" : "0"});
  }
  check(r, "sum_exceeds_bound", outside, "==", 0.0);
  check(r, "recurrence_mismatch", inexact, "==", 0.0);
  r.report["K"] = K;
  r.report["max_sum_over_bound"] = worst;
  r.report["cases"] = rows;
  return r;
}

ExperimentResult run_determinism(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  if (!c.params.contains("target")) throw ConfigError("key 'params.target' is required");
  const json& t = c.params["target"];
  ExperimentConfig target = t.is_string() ? load_config(t.get<std::string>()) : parse_config(t);
  if (target.command == "determinism") throw ConfigError("key 'params.target' cannot be a determinism run");
  std::string first = report_text(run_experiment(target, 1));
  std::string second = report_text(run_experiment(target, std::max(jobs, 2)));
  r.csv_header = {"target", "bytes", "identical"};
  r.csv_rows.push_back({target.name, std::to_string(first.size()), first == second ? "1" : "0"});
  check(r, "byte_identical", first == second ? 1.0 : 0.0, "==", 1.0);
  r.report["target"] = target.name;
  r.report["bytes"] = first.size();
  return r;
}

}  // namespace tplab::detail
