#include <algorithm>
#include <cmath>

#include "runners.hpp"
#include "tplab/catalog.hpp"
#include "tplab/estimates.hpp"
#include "tplab/rng.hpp"

namespace tplab::detail {

namespace {

json solve_row(double h, const SolveReport& s) {
  return {{"h", h},
          {"steps", s.steps},
          {"substeps", s.substeps},
          {"dt", s.dt},
          {"cfl_ratio", s.cfl_ratio},
          {"max_interface_residual", s.max_interface_residual},
          {"ghost_fallbacks", s.ghost_fallbacks},
          {"cross_fallbacks", s.cross_fallbacks}};
}

std::string hname(double h) { return "h=1/" + std::to_string(static_cast<long>(std::lround(1.0 / h))); }

// Random operator: Pucci+, Pucci- or trace with lambda in [0.5, 1], Lambda in [1, 2].
OperatorSpec random_op(CounterRng& rng) {
  int kind = static_cast<int>(rng.integer(0, 2));
  double lam = rng.uniform(0.5, 1.0), Lam = rng.uniform(1.0, 2.0);
  if (kind == 0) return OperatorSpec::make(OperatorKind::pucci_plus, lam, Lam);
  if (kind == 1) return OperatorSpec::make(OperatorKind::pucci_minus, lam, Lam);
  return OperatorSpec::make(OperatorKind::trace_laplace, 1.0, 1.0);
}

// Flat interface for even cases, tilt for odd ones.
InterfaceGraph random_interface(const GridPtr& g, CounterRng& rng, int i, double amax, double smax) {
  if (i % 2 == 0) return make_interface(g, "flat", {{"a", rng.uniform(-amax, amax)}});
  return make_interface(g, "tilt", {{"slope", rng.uniform(-smax, smax)}});
}

JumpFn const_jump(double v) {
  return [v](double, double) { return v; };
}

SpaceTimeFn const_fn(double v) {
  return [v](const Point&) { return v; };
}

double min_value(const Field& u) {
  const GridCylinder& g = *u.grid;
  double m = INFINITY;
  for (std::size_t id = 0; id < u.size(); ++id)
    if (g.in(id)) m = std::min(m, u.v[id]);
  return m;
}

}  // namespace

ExperimentResult run_solve(const ExperimentConfig& c, int) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  r.csv_header = {"h", "steps", "substeps", "dt", "cfl_ratio", "max_interface_residual", "exact_error", "sandwich_margin"};
  json rows = json::array();
  const bool exact = c.params.contains("exact");
  const bool perron = param_num(c, "perron", 0.0) != 0.0;
  for (double h : c.refinements) {
    TransmissionProblem p = build_problem(pj, h, c.seed);
    auto [u, s] = solve(p);
    json row = solve_row(h, s);
    double err = 0.0;
    if (exact) {
      SpaceTimeFn ex = expr_from_json(c.params["exact"], p.grid->n, c.seed, "params.exact");
      std::vector<double> per_level(p.grid->nt, 0.0);
      for (std::size_t id = 0; id < u.size(); ++id) {
        if (!p.grid->in(id)) continue;
        double e = std::abs(u.v[id] - ex(p.grid->point(id)));
        per_level[p.grid->level(id)] = std::max(per_level[p.grid->level(id)], e);
      }
      err = *std::max_element(per_level.begin(), per_level.end());
      row["exact_error"] = err;
      check(r, "exact_error_" + hname(h), err, "<=", param_num(c, "exact_tol", 1e-10));
    }
    if (perron) {
      auto [lo, up] = perron_barriers(p);
      double margin = INFINITY;
      for (std::size_t id = 0; id < u.size(); ++id)
        if (p.grid->in(id)) margin = std::min({margin, u.v[id] - lo.v[id], up.v[id] - u.v[id]});
      s.sandwich_margin = margin;
      s.has_sandwich = true;
      row["sandwich_margin"] = margin;
      check(r, "sandwich_margin_" + hname(h), margin, ">=", -5.0 * h);
    }
    check(r, "cfl_ratio_" + hname(h), s.cfl_ratio, "<=", 1.0);
    rows.push_back(row);
    r.csv_rows.push_back({fmt(h), std::to_string(s.steps), std::to_string(s.substeps), fmt(s.dt), fmt(s.cfl_ratio),
                          fmt(s.max_interface_residual), fmt(err), fmt(s.has_sandwich ? s.sandwich_margin : 0.0)});
    if (c.dump_fields) r.fields.emplace_back("u_" + std::to_string(rows.size() - 1), u);
  }
  r.report["runs"] = rows;
  return r;
}

ExperimentResult run_decomposition(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  auto as = param_list(c, "a_values", {0.0, 0.2});
  double g0 = param_num(c, "g0", 1.0);
  double tol_factor = param_num(c, "error_factor", 5.0);
  r.csv_header = {"a", "h", "error", "bound"};
  struct Item { double a, h, err; };
  std::vector<std::pair<double, double>> jobs_list;
  for (double a : as)
    for (double h : c.refinements) jobs_list.emplace_back(a, h);
  auto items = parallel_map<Item>(static_cast<int>(jobs_list.size()), jobs, [&](int i) {
    auto [a, h] = jobs_list[i];
    TransmissionProblem base = build_problem(pj, h, c.seed);
    DecompositionResult d = flat_decomposition_solve(base, a, g0);
    return Item{a, h, d.error};
  });
  json rows = json::array();
  for (const auto& it : items) {
    rows.push_back({{"a", it.a}, {"h", it.h}, {"error", it.err}});
    r.csv_rows.push_back({fmt(it.a), fmt(it.h), fmt(it.err), fmt(tol_factor * it.h)});
    check(r, "error_a=" + fmt(it.a) + "_" + hname(it.h), it.err, "<=", tol_factor * it.h);
  }
  const std::size_t nh = c.refinements.size();
  json ratios = json::array();
  for (std::size_t ia = 0; ia < as.size(); ++ia)
    for (std::size_t k = 0; k + 1 < nh; ++k) {
      double e0 = items[ia * nh + k].err, e1 = items[ia * nh + k + 1].err;
      double ratio = e1 > 0.0 ? e0 / e1 : INFINITY;
      ratios.push_back({{"a", as[ia]}, {"h_coarse", c.refinements[k]}, {"ratio", ratio}});
      std::string tag = "ratio_a=" + fmt(as[ia]) + "_" + hname(c.refinements[k]);
      check(r, tag + "_min", ratio, ">=", param_num(c, "ratio_min", 1.5));
      check(r, tag + "_max", ratio, "<=", param_num(c, "ratio_max", 4.0));
    }
  r.report["runs"] = rows;
  r.report["ratios"] = ratios;
  return r;
}

ExperimentResult run_max_principle(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  r.csv_header = {"case", "h", "psi", "g", "min_u", "bound"};
  double smax = param_num(c, "slope_max", 0.25);
  struct Item { int i; double h; std::string psi; double g, minu; };
  const int nh = static_cast<int>(c.refinements.size());
  auto items = parallel_map<Item>(c.cases * nh, jobs, [&](int idx) {
    int i = idx / nh;
    double h = c.refinements[idx % nh];
    TransmissionProblem p = build_problem(pj, h, c.seed);
    CounterRng rng(c.seed, 1000 + i);
    p.F_plus = random_op(rng);
    p.F_minus = random_op(rng);
    double g = -rng.uniform(0.0, 1.0);
    p.g = const_jump(g);
    p.f_plus = p.f_minus = nullptr;
    double amp = rng.uniform(0.2, 1.0);
    p.phi = random_smooth(p.grid->n, c.seed, 2000 + i, amp, 4, amp);
    p.gamma = random_interface(p.grid, rng, i, 0.3, smax);
    Field u = solve(p).first;
    return Item{i, h, p.gamma.family, g, min_value(u)};
  });
  json rows = json::array();
  double worst = INFINITY;
  for (const auto& it : items) {
    rows.push_back({{"case", it.i}, {"h", it.h}, {"psi", it.psi}, {"g", it.g}, {"min_u", it.minu}});
    r.csv_rows.push_back({std::to_string(it.i), fmt(it.h), it.psi, fmt(it.g), fmt(it.minu), fmt(-5.0 * it.h)});
    worst = std::min(worst, it.minu + 5.0 * it.h);
  }
  check(r, "min_u_plus_5h", worst, ">=", 0.0);
  r.report["cases"] = rows;
  return r;
}

ExperimentResult run_perron(const ExperimentConfig& c, int) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  r.csv_header = {"h", "lower_gap", "upper_gap"};
  json rows = json::array();
  for (double h : c.refinements) {
    TransmissionProblem p = build_problem(pj, h, c.seed);
    Field u = solve(p).first;
    auto [lo, up] = perron_barriers(p);
    double gl = INFINITY, gu = INFINITY;
    for (std::size_t id = 0; id < u.size(); ++id) {
      if (!p.grid->in(id)) continue;
      gl = std::min(gl, u.v[id] - lo.v[id]);
      gu = std::min(gu, up.v[id] - u.v[id]);
    }
    rows.push_back({{"h", h}, {"lower_gap", gl}, {"upper_gap", gu}});
    r.csv_rows.push_back({fmt(h), fmt(gl), fmt(gu)});
    check(r, "lower_barrier_" + hname(h), gl, ">=", -5.0 * h);
    check(r, "upper_barrier_" + hname(h), gu, ">=", -5.0 * h);
  }
  r.report["runs"] = rows;
  return r;
}

ExperimentResult run_abp(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  const bool family = c.cases > 1 || param_num(c, "family", 0.0) != 0.0;
  r.csv_header = {"case", "h", "lhs", "boundary", "g_plus", "f_norm", "f_norm_contact", "empirical_C", "vacuous"};
  const int nh = static_cast<int>(c.refinements.size());
  auto reps = parallel_map<AbpReport>(c.cases * nh, jobs, [&](int idx) {
    int i = idx / nh;
    double h = c.refinements[idx % nh];
    TransmissionProblem p = build_problem(pj, h, c.seed);
    if (family) {
      CounterRng rng(c.seed, 1000 + i);
      p.F_plus = random_op(rng);
      p.F_minus = random_op(rng);
      const int n = p.grid->n;
      p.phi = random_smooth(n, c.seed, 2000 + i, rng.uniform(0.1, 0.5));
      double af = rng.uniform(0.5, 3.0), beta = rng.uniform(-0.5, 1.0);
      SpaceTimeFn fp = random_smooth(n, c.seed, 3000 + i, af, 4, -beta * af);
      p.f_plus = p.f_minus = fp;
      p.g = const_jump(rng.uniform(-1.0, 1.0));
      p.gamma = random_interface(p.grid, rng, i, 0.3, 0.25);
    }
    Field u = solve(p).first;
    return abp_verify(p, u);
  });
  std::vector<double> Cmax(nh, 0.0);
  json rows = json::array();
  for (int idx = 0; idx < c.cases * nh; ++idx) {
    const auto& a = reps[idx];
    int i = idx / nh, k = idx % nh;
    double h = c.refinements[k];
    Cmax[k] = std::max(Cmax[k], a.empirical_C);
    rows.push_back({{"case", i}, {"h", h}, {"lhs", a.lhs}, {"boundary", a.boundary}, {"g_plus", a.g_plus},
                    {"f_norm", a.f_norm}, {"f_norm_contact", a.f_norm_contact}, {"empirical_C", a.empirical_C},
                    {"vacuous", a.vacuous}});
    r.csv_rows.push_back({std::to_string(i), fmt(h), fmt(a.lhs), fmt(a.boundary), fmt(a.g_plus), fmt(a.f_norm),
                          fmt(a.f_norm_contact), fmt(a.empirical_C), a.vacuous ? "1" : "0"});
  }
  const double C0 = Cmax[0];
  const double factor = param_num(c, "refinement_factor", 2.0);
  int violations = 0, contact_violations = 0;
  for (int idx = 0; idx < c.cases * nh; ++idx) {
    const auto& a = reps[idx];
    int k = idx % nh;
    double C = k == 0 ? C0 : factor * C0;
    if (!a.holds(C, 5.0 * c.refinements[k])) ++violations;
    if (a.f_norm_contact > a.f_norm * (1.0 + 1e-12)) ++contact_violations;
  }
  json cs = json::array();
  for (int k = 0; k < nh; ++k) cs.push_back({{"h", c.refinements[k]}, {"C", Cmax[k]}});
  r.report["cases"] = rows;
  r.report["constants"] = cs;
  check(r, "C_positive", C0, ">", 0.0);
  check(r, "inequality_violations", violations, "==", 0.0);
  check(r, "contact_norm_exceeds_full", contact_violations, "==", 0.0);
  for (int k = 1; k < nh; ++k) {
    double ratio = C0 > 0.0 ? Cmax[k] / C0 : INFINITY;
    check(r, "C_ratio_" + hname(c.refinements[k]) + "_max", ratio, "<=", factor);
    check(r, "C_ratio_" + hname(c.refinements[k]) + "_min", ratio, ">=", 1.0 / factor);
  }
  if (c.params.contains("C_spread")) {
    double lo = *std::min_element(Cmax.begin(), Cmax.end()), hi = *std::max_element(Cmax.begin(), Cmax.end());
    check(r, "C_spread", lo > 0.0 ? hi / lo : INFINITY, "<=", param_num(c, "C_spread", 1.2));
  }
  return r;
}

ExperimentResult run_harnack(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  const double eps0 = param_num(c, "eps0", 0.01);
  const int max_tries = static_cast<int>(param_num(c, "max_tries", 400));
  HarnackGeometry G = harnack_geometry(pj["grid"]["n"].get<int>());
  const double lim = G.sigma * G.r / 4.0;
  auto make = [&](int j, double h) {
    TransmissionProblem p = build_problem(pj, h, c.seed);
    CounterRng rng(c.seed, 1000 + j);
    p.F_plus = random_op(rng);
    p.F_minus = random_op(rng);
    double beta = rng.uniform(-0.5, 0.5), A = rng.uniform(0.5, 1.5);
    SpaceTimeFn R = random_smooth(p.grid->n, c.seed, 2000 + j, 1.0);
    p.phi = [R, beta, A](const Point& q) { return std::clamp(beta + A * R(q), -1.0, 1.0); };
    p.g = const_jump(rng.uniform(-0.004, 0.004));
    p.f_plus = p.f_minus = const_fn(rng.uniform(-0.002, 0.002));
    p.gamma = random_interface(p.grid, rng, j, lim, lim);
    return p;
  };
  struct Try { bool ok = false; HarnackReport rep; std::string why; };
  auto attempt = [&](int j, double h) {
    Try t;
    TransmissionProblem p = make(j, h);
    Field u = solve(p).first;
    try {
      t.rep = harnack_verify(p, u, eps0);
      t.ok = true;
    } catch (const std::invalid_argument& e) {
      t.why = e.what();
    }
    return t;
  };
  // Admissible seeds are selected on the coarsest grid.
  std::vector<int> accepted;
  int tried = 0;
  while (static_cast<int>(accepted.size()) < c.cases && tried < max_tries) {
    int batch = std::min(c.cases, max_tries - tried);
    auto res = parallel_map<Try>(batch, jobs, [&](int b) { return attempt(tried + b, c.refinements[0]); });
    for (int b = 0; b < batch && static_cast<int>(accepted.size()) < c.cases; ++b)
      if (res[b].ok) accepted.push_back(tried + b);
    tried += batch;
  }
  check(r, "admissible_cases", static_cast<double>(accepted.size()), ">=", c.cases);
  r.csv_header = {"case", "seed_index", "h", "measured_c", "u_bar", "sup_K3", "inf_K1", "data_size"};
  const int nh = static_cast<int>(c.refinements.size());
  const int na = static_cast<int>(accepted.size());
  auto runs = parallel_map<Try>(na * nh, jobs, [&](int idx) { return attempt(accepted[idx / nh], c.refinements[idx % nh]); });
  std::vector<double> cmin(nh, INFINITY);
  json rows = json::array();
  int failures = 0;
  for (int idx = 0; idx < na * nh; ++idx) {
    const Try& t = runs[idx];
    int k = idx % nh;
    if (!t.ok) {
      ++failures;
      rows.push_back({{"case", idx / nh}, {"h", c.refinements[k]}, {"error", t.why}});
      continue;
    }
    cmin[k] = std::min(cmin[k], t.rep.measured_c);
    rows.push_back({{"case", idx / nh}, {"seed_index", accepted[idx / nh]}, {"h", c.refinements[k]},
                    {"measured_c", t.rep.measured_c}, {"u_bar", t.rep.u_bar}, {"sup_K3", t.rep.sup_K3},
                    {"inf_K1", t.rep.inf_K1}, {"data_size", t.rep.data_size}});
    r.csv_rows.push_back({std::to_string(idx / nh), std::to_string(accepted[idx / nh]), fmt(c.refinements[k]),
                          fmt(t.rep.measured_c), fmt(t.rep.u_bar), fmt(t.rep.sup_K3), fmt(t.rep.inf_K1),
                          fmt(t.rep.data_size)});
  }
  check(r, "precondition_failures_on_refinement", failures, "==", 0.0);
  for (int k = 0; k < nh; ++k) check(r, "min_measured_c_" + hname(c.refinements[k]), cmin[k], ">", 0.0);
  for (int k = 1; k < nh; ++k) {
    double ratio = cmin[k] / cmin[0];
    check(r, "c_ratio_" + hname(c.refinements[k]) + "_max", ratio, "<=", 2.0);
    check(r, "c_ratio_" + hname(c.refinements[k]) + "_min", ratio, ">=", 0.5);
  }
  check(r, "K1_in_P", G.K1_in_P, "==", 1.0);
  check(r, "K2_in_P", G.K2_in_P, "==", 1.0);
  check(r, "K3_K1_disjoint", G.K3_K1_disjoint, "==", 1.0);
  r.report["geometry"] = {{"r", G.r}, {"sigma", G.sigma}, {"r0", G.r0}, {"xbar", G.xbar[G.n - 1]},
                          {"tbar", G.tbar}, {"ttilde", G.ttilde}};
  r.report["tried"] = tried;
  r.report["cases"] = rows;
  return r;
}

ExperimentResult run_osc_decay(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  const int n = pj["grid"]["n"].get<int>();
  HarnackGeometry G = harnack_geometry(n);
  const double r0 = param_num(c, "r0", G.r0);
  const double lim = G.sigma * G.r / 2.0;
  r.csv_header = {"case", "h", "psi", "osc_outer", "osc_inner", "mu_est"};
  const int nh = static_cast<int>(c.refinements.size());
  struct Item { std::string psi; OscillationReport o; };
  auto items = parallel_map<Item>(c.cases * nh, jobs, [&](int idx) {
    int i = idx / nh;
    TransmissionProblem p = build_problem(pj, c.refinements[idx % nh], c.seed);
    CounterRng rng(c.seed, 1000 + i);
    p.F_plus = random_op(rng);
    p.F_minus = random_op(rng);
    p.phi = random_smooth(n, c.seed, 2000 + i, 1.0);
    p.f_plus = p.f_minus = nullptr;
    p.g = nullptr;
    p.gamma = random_interface(p.grid, rng, i, 0.9 * lim, 0.9 * lim);
    Field u = solve(p).first;
    return Item{p.gamma.family, oscillation_decay(u, r0)};
  });
  double mu = 0.0;
  json rows = json::array();
  for (int idx = 0; idx < c.cases * nh; ++idx) {
    const auto& it = items[idx];
    double h = c.refinements[idx % nh];
    mu = std::max(mu, it.o.mu_est);
    rows.push_back({{"case", idx / nh}, {"h", h}, {"psi", it.psi}, {"osc_outer", it.o.osc_outer},
                    {"osc_inner", it.o.osc_inner}, {"mu_est", it.o.mu_est}, {"vacuous", it.o.vacuous}});
    r.csv_rows.push_back({std::to_string(idx / nh), fmt(h), it.psi, fmt(it.o.osc_outer), fmt(it.o.osc_inner),
                          fmt(it.o.mu_est)});
  }
  check(r, "max_mu_est", mu, "<=", param_num(c, "mu_max", 0.98));
  r.report["r0"] = r0;
  r.report["cases"] = rows;
  return r;
}

ExperimentResult run_holder(const ExperimentConfig& c, int) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  double guess = param_num(c, "alpha_guess", 0.5);
  r.csv_header = {"h", "fitted_alpha", "data_ratio", "space_seminorm", "time_seminorm"};
  json rows = json::array();
  for (double h : c.refinements) {
    TransmissionProblem p = build_problem(pj, h, c.seed);
    Field u = solve(p).first;
    double gsup = 0.0;
    if (p.g)
      for (int k = 0; k < p.grid->nt; ++k)
        for (int col = 0; col < p.grid->ncols(); ++col)
          gsup = std::max(gsup, std::abs(p.g(p.grid->xprime(col), p.grid->time(k))));
    HolderEstimate e = holder_estimate(u, guess, gsup + lnp1_norm(source_field(p)));
    rows.push_back({{"h", h}, {"fitted_alpha", e.fitted_alpha}, {"data_ratio", e.data_ratio},
                    {"radii", e.radii}, {"osc", e.osc}, {"space_seminorm", e.norm.space_seminorm},
                    {"time_seminorm", e.norm.time_seminorm}, {"exact", e.norm.exact}});
    r.csv_rows.push_back({fmt(h), fmt(e.fitted_alpha), fmt(e.data_ratio), fmt(e.norm.space_seminorm),
                          fmt(e.norm.time_seminorm)});
    check(r, "fitted_alpha_" + hname(h), e.fitted_alpha, ">=", param_num(c, "alpha_min", 0.0));
  }
  r.report["runs"] = rows;
  return r;
}

ExperimentResult run_c1alpha(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  const double g0 = param_num(c, "g0", 1.0), rho = param_num(c, "rho", 0.5);
  const int K = static_cast<int>(param_num(c, "K", 10));
  r.csv_header = {"h", "k", "radius", "usable", "residual", "g_hat", "constraint_residual"};
  auto fits = parallel_map<AffineFitSequence>(static_cast<int>(c.refinements.size()), jobs, [&](int k) {
    TransmissionProblem p = build_problem(pj, c.refinements[k], c.seed);
    Field u = solve(p).first;
    return c1alpha_fit(u, p.gamma, g0, rho, K);
  });
  json rows = json::array();
  double constraint = 0.0;
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const auto& f = fits[k];
    double h = c.refinements[k];
    json levels = json::array();
    for (const auto& L : f.levels) {
      constraint = std::max(constraint, L.constraint_residual);
      levels.push_back({{"k", L.k}, {"radius", L.radius}, {"usable", L.usable}, {"residual", L.residual},
                        {"g_hat", L.g_hat}, {"A_plus", L.A_plus}, {"A_minus", L.A_minus}, {"b", L.b},
                        {"nodes", L.nodes}});
      r.csv_rows.push_back({fmt(h), std::to_string(L.k), fmt(L.radius), L.usable ? "1" : "0", fmt(L.residual),
                            fmt(L.g_hat), fmt(L.constraint_residual)});
    }
    rows.push_back({{"h", h}, {"slope", f.slope}, {"fitted_alpha", f.fitted_alpha}, {"g_hat", f.g_hat},
                    {"g_error", f.g_error}, {"usable", f.usable}, {"levels", levels}});
  }
  check(r, "constraint_residual", constraint, "==", 0.0);
  check(r, "slope_finest", fits.back().slope, ">", param_num(c, "slope_min", 1.1));
  if (c.params.contains("g_tol")) {
    double hg = param_num(c, "g_tol_h", c.refinements.front());
    for (std::size_t k = 0; k < fits.size(); ++k)
      if (std::abs(c.refinements[k] - hg) < 1e-12) check(r, "g_error_" + hname(hg), fits[k].g_error, "<=", param_num(c, "g_tol", 0.1));
    for (std::size_t k = 1; k < fits.size(); ++k)
      check(r, "g_error_decreasing_" + hname(c.refinements[k]), fits[k].g_error, "<", fits[k - 1].g_error);
  }
  r.report["runs"] = rows;
  return r;
}

ExperimentResult run_stability(const ExperimentConfig& c, int jobs) {
  ExperimentResult r;
  json pj = problem_or_throw(c);
  auto deltas = param_list(c, "deltas", {0.2, 0.1, 0.05, 0.0});
  r.csv_header = {"h", "delta", "flat_gap", "glue_gap"};
  auto reps = parallel_map<StabilityReport>(static_cast<int>(c.refinements.size()), jobs, [&](int k) {
    TransmissionProblem base = build_problem(pj, c.refinements[k], c.seed);
    return stability_experiment(deltas, base);
  });
  json runs = json::array();
  for (std::size_t k = 0; k < reps.size(); ++k) {
    double h = c.refinements[k];
    json rows = json::array();
    std::vector<StabilityRow> pos;
    for (const auto& row : reps[k].rows) {
      rows.push_back({{"delta", row.delta}, {"flat_gap", row.flat_gap}, {"glue_gap", row.glue_gap}});
      r.csv_rows.push_back({fmt(h), fmt(row.delta), fmt(row.flat_gap), fmt(row.glue_gap)});
      if (row.delta > 0.0) pos.push_back(row);
      else {
        check(r, "flat_gap_delta0_" + hname(h), row.flat_gap, "<=", 1e-10);
        check(r, "glue_gap_delta0_" + hname(h), row.glue_gap, "<=", 1e-10);
      }
    }
    std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) { return a.delta > b.delta; });
    for (std::size_t i = 1; i < pos.size(); ++i) {
      std::string tag = "_delta=" + fmt(pos[i].delta) + "_" + hname(h);
      check(r, "flat_gap_decreasing" + tag, pos[i].flat_gap, "<", pos[i - 1].flat_gap);
      check(r, "glue_gap_decreasing" + tag, pos[i].glue_gap, "<", pos[i - 1].glue_gap);
    }
    runs.push_back({{"h", h}, {"tau", reps[k].tau}, {"rows", rows}});
  }
  r.report["runs"] = runs;
  return r;
}

}  // namespace tplab::detail
