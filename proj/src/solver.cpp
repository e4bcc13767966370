#include "tplab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tplab/kernels.hpp"

namespace tplab {

const char* to_string(InterfaceMode m) {
  switch (m) {
    case InterfaceMode::transmission: return "transmission";
    case InterfaceMode::continuous: return "continuous";
    case InterfaceMode::one_phase: return "one_phase";
    case InterfaceMode::none: return "none";
  }
  return "?";
}

CflStep cfl_dt(const GridCylinder& grid, double Lambda, double theta, double span) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("cfl_dt: theta must be in (0,1]");
  if (!(Lambda > 0.0)) throw std::invalid_argument("cfl_dt: Lambda must be positive");
  const int n = grid.n;
  CflStep c;
  c.raw = theta * grid.h * grid.h / (2.0 * n * Lambda + (n == 2 ? 4.0 * Lambda : 0.0));
  if (span <= 0.0) span = grid.r * grid.r;
  c.steps = static_cast<long>(std::ceil(span / c.raw - 1e-9));
  c.steps = std::max(c.steps, 1L);
  c.dt = span / static_cast<double>(c.steps);
  return c;
}

namespace {

bool uses_interface(InterfaceMode m) {
  return m == InterfaceMode::transmission || m == InterfaceMode::one_phase;
}

// (wpos, wneg) of the 1D/2D extremal form; false for custom operators.
bool kernel_weights(const OperatorSpec& F, double& wpos, double& wneg) {
  switch (F.kind) {
    case OperatorKind::trace_laplace: wpos = wneg = 1.0; return true;
    case OperatorKind::pucci_plus: wpos = F.Lambda; wneg = F.lambda; return true;
    case OperatorKind::pucci_minus: wpos = F.lambda; wneg = F.Lambda; return true;
    case OperatorKind::custom: return false;
  }
  return false;
}

}  // namespace

Stepper::Stepper(const TransmissionProblem& p) : P(p), g(*p.grid) {
  xs1_.resize(g.ns);
  xs2_.resize(g.ns);
  for (std::size_t s = 0; s < g.ns; ++s) {
    xs1_[s] = g.coord(s, 0);
    xs2_[s] = g.n == 2 ? g.coord(s, 1) : 0.0;
  }
  sdist_.assign(g.ns, std::numeric_limits<double>::infinity());
  side_.assign(g.ns, 1);
  slaved_.assign(g.ns, 0);
  geo_.resize(g.ncols());
  ugam_.assign(g.ncols(), std::numeric_limits<double>::quiet_NaN());
  fbuf_.assign(g.ns, 0.0);
}

void Stepper::geometry(double t, bool at_bottom) {
  if (P.mode == InterfaceMode::none) return;
  const bool slave = uses_interface(P.mode);
  for (int c = 0; c < g.ncols(); ++c) {
    double xp = g.xprime(c);
    double psi = P.gamma.psi_fn(xp, t);
    double dpsi = g.n == 2 ? P.gamma.dpsi_fn(xp, t) : 0.0;
    if (slave) {
      geo_[c] = column_geometry(g, c, psi, dpsi, at_bottom, P.trace_order);
    } else {
      geo_[c].psi = psi;
      geo_[c].dpsi = dpsi;
    }
  }
  for (std::size_t s = 0; s < g.ns; ++s) {
    if (!g.inside[s]) continue;
    double d = g.xn(g.row_of(s)) - geo_[g.col_of(s)].psi;
    sdist_[s] = d;
    side_[s] = d >= 0.0 ? 1 : -1;
    slaved_[s] = slave && is_slaved(d, g.h, g.lateral[s] != 0);
  }
}

void Stepper::traces(const std::vector<double>& level, double t) {
  for (int c = 0; c < g.ncols(); ++c) {
    if (!geo_[c].active) {
      ugam_[c] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (P.mode == InterfaceMode::one_phase) {
      ugam_[c] = 0.0;
      continue;
    }
    TraceStencil st = trace_stencil(geo_[c]);
    double gv = P.g ? P.g(g.xprime(c), t) : 0.0;
    ugam_[c] = solve_trace(g, c, st, level.data(), gv);
  }
}

double Stepper::neighbor(const std::vector<double>& cur, std::size_t p, int di, int dj, bool& ok) {
  int i = g.axis_index(p, 0) + di;
  int j = (g.n == 2 ? g.axis_index(p, 1) : 0) + dj;
  if (i < 0 || j < 0 || i >= g.m || j >= g.m) { ok = false; return 0.0; }
  std::size_t q = g.spatial_index(i, j);
  if (!g.inside[q]) { ok = false; return 0.0; }
  if (!uses_interface(P.mode) || side_[q] == side_[p]) return cur[q];
  // Ghost value: linear extension of p's side in q's column.
  const int cq = g.col_of(q);
  const ColumnGeometry& G = geo_[cq];
  const int sg = side_[p];
  if (!G.active || !std::isfinite(ugam_[cq])) {
    ++ghost_fallbacks_;
    return cur[q];
  }
  double d1 = sg > 0 ? G.pdist[0] : G.mdist[0];
  int r1 = sg > 0 ? G.prow[0] : G.mrow[0];
  double u1 = cur[g.at_col_row(cq, r1)];
  double sq = sg * sdist_[q];
  return ugam_[cq] + (sq / d1) * (u1 - ugam_[cq]);
}

void Stepper::step(const std::vector<double>& cur, double t, double dt, bool at_bottom,
                   std::vector<double>& next) {
  geometry(t, at_bottom);
  if (uses_interface(P.mode)) traces(cur, t);
  next.assign(g.ns, 0.0);
  const double h = g.h, ih2 = 1.0 / (h * h);
  const bool iface = uses_interface(P.mode);

  // Nodes to update and their sources.
  idx_.clear();
  for (std::size_t s = 0; s < g.ns; ++s) {
    if (!g.inside[s]) continue;
    if (g.lateral[s]) {
      Point q{{xs1_[s], xs2_[s]}, t + dt};
      next[s] = P.phi(q);
      continue;
    }
    if (iface && slaved_[s]) { next[s] = cur[s]; continue; }
    if (P.mode == InterfaceMode::one_phase && side_[s] < 0) { next[s] = 0.0; continue; }
    idx_.push_back(s);
    Point q{{xs1_[s], xs2_[s]}, t};
    const SpaceTimeFn& f = (P.mode == InterfaceMode::none || side_[s] > 0) ? P.f_plus : P.f_minus;
    fbuf_[s] = f ? f(q) : 0.0;
  }

  auto op_for = [&](std::size_t s) -> const OperatorSpec& {
    return (P.mode == InterfaceMode::none || side_[s] > 0) ? P.F_plus : P.F_minus;
  };

  // Second difference along x_n with the trace closing a stencil cut by Gamma.
  auto dnn = [&](std::size_t s, bool& regular) {
    const int col = g.col_of(s), row = g.row_of(s);
    std::size_t up = g.at_col_row(col, row + 1), dn = g.at_col_row(col, row - 1);
    const double u = cur[s];
    if (iface) {
      const int sg = side_[s];
      bool cut_dn = sg > 0 && side_[dn] < 0;
      bool cut_up = sg < 0 && side_[up] > 0;
      if (cut_dn || cut_up) {
        regular = false;
        double ug = ugam_[col];
        if (!std::isfinite(ug)) {
          ++ghost_fallbacks_;
          return (cur[dn] - 2.0 * u + cur[up]) * ih2;
        }
        double sd = std::abs(sdist_[s]);
        if (cut_dn) return 2.0 / (sd + h) * ((cur[up] - u) / h - (u - ug) / sd);
        return 2.0 / (sd + h) * ((ug - u) / sd - (u - cur[dn]) / h);
      }
    }
    return (cur[dn] - 2.0 * u + cur[up]) * ih2;
  };

  if (g.n == 1) {
    std::size_t a = 0;
    while (a < idx_.size()) {
      std::size_t s = idx_[a];
      bool regular = true;
      double d = dnn(s, regular);
      double wp, wn;
      const OperatorSpec& F = op_for(s);
      if (!regular || !kernel_weights(F, wp, wn)) {
        double fd = evaluate(F, SymMatrix::diag1(d));
        next[s] = cur[s] + dt * (fd + fbuf_[s]);
        ++a;
        continue;
      }
      // Maximal run of consecutive regular nodes sharing the operator side.
      std::size_t b = a + 1;
      while (b < idx_.size() && idx_[b] == idx_[b - 1] + 1 && side_[idx_[b]] == side_[s]) {
        bool reg = true;
        (void)dnn(idx_[b], reg);
        if (!reg) break;
        ++b;
      }
      std::size_t len = b - a;
      kernels::row1(cur.data() + s, fbuf_.data() + s, next.data() + s, len, ih2, dt, wp, wn);
      a = b;
    }
  } else {
    const std::size_t cnt = idx_.size();
    a11_.resize(cnt);
    a12_.resize(cnt);
    a22_.resize(cnt);
    fout_.resize(cnt);
    for (std::size_t a = 0; a < cnt; ++a) {
      std::size_t s = idx_[a];
      bool regular = true, ok = true;
      double d22 = dnn(s, regular);
      double u = cur[s];
      double l = neighbor(cur, s, -1, 0, ok), r = neighbor(cur, s, 1, 0, ok);
      double d11 = ok ? (l - 2.0 * u + r) * ih2 : 0.0;
      bool okc = true;
      double c1 = neighbor(cur, s, 1, 1, okc), c2 = neighbor(cur, s, 1, -1, okc);
      double c3 = neighbor(cur, s, -1, 1, okc), c4 = neighbor(cur, s, -1, -1, okc);
      double d12 = 0.0;
      if (okc) d12 = (c1 - c2 - c3 + c4) * (0.25 * ih2);
      else ++cross_fallbacks_;
      a11_[a] = d11;
      a12_[a] = d12;
      a22_[a] = d22;
    }
    // Batch evaluation per side.
    for (int sg : {1, -1}) {
      std::vector<std::size_t> sel;
      for (std::size_t a = 0; a < cnt; ++a)
        if ((P.mode == InterfaceMode::none ? 1 : side_[idx_[a]]) == sg) sel.push_back(a);
      if (sel.empty()) continue;
      const OperatorSpec& F = sg > 0 || P.mode == InterfaceMode::none ? P.F_plus : P.F_minus;
      double wp, wn;
      if (kernel_weights(F, wp, wn)) {
        std::vector<double> b11(sel.size()), b12(sel.size()), b22(sel.size()), out(sel.size());
        for (std::size_t q = 0; q < sel.size(); ++q) {
          b11[q] = a11_[sel[q]];
          b12[q] = a12_[sel[q]];
          b22[q] = a22_[sel[q]];
        }
        kernels::pucci2(b11.data(), b12.data(), b22.data(), out.data(), sel.size(), wp, wn);
        for (std::size_t q = 0; q < sel.size(); ++q) fout_[sel[q]] = out[q];
      } else {
        for (std::size_t a : sel) fout_[a] = evaluate(F, SymMatrix::make2(a11_[a], a12_[a], a22_[a]));
      }
    }
    for (std::size_t a = 0; a < cnt; ++a) {
      std::size_t s = idx_[a];
      next[s] = cur[s] + dt * (fout_[a] + fbuf_[s]);
    }
  }
  for (std::size_t s : idx_)
    if (!std::isfinite(next[s]))
      throw std::runtime_error("non-finite update at spatial node " + std::to_string(s) + ", t = " +
                               std::to_string(t + dt));
}

double Stepper::finalize(std::vector<double>& level, double t, bool at_bottom) {
  if (!uses_interface(P.mode)) return 0.0;
  geometry(t, at_bottom);
  traces(level, t);
  for (std::size_t s = 0; s < g.ns; ++s) {
    if (!g.inside[s] || g.lateral[s] || at_bottom) continue;
    if (P.mode == InterfaceMode::one_phase && side_[s] < 0) {
      level[s] = 0.0;
      continue;
    }
    if (!slaved_[s]) continue;
    const int c = g.col_of(s);
    const ColumnGeometry& G = geo_[c];
    if (!G.active || !std::isfinite(ugam_[c])) continue;
    const int sg = side_[s];
    double d1 = sg > 0 ? G.pdist[0] : G.mdist[0];
    int r1 = sg > 0 ? G.prow[0] : G.mrow[0];
    double u1 = level[g.at_col_row(c, r1)];
    level[s] = ugam_[c] + (std::abs(sdist_[s]) / d1) * (u1 - ugam_[c]);
  }
  double res = 0.0;
  if (P.mode == InterfaceMode::transmission) {
    for (int c = 0; c < g.ncols(); ++c) {
      if (!geo_[c].active) continue;
      TraceStencil st = trace_stencil(geo_[c]);
      double gv = P.g ? P.g(g.xprime(c), t) : 0.0;
      double lhs = st.coef * ugam_[c];
      for (int i = 0; i < st.nw; ++i) lhs += st.w[i] * level[g.at_col_row(c, st.row[i])];
      res = std::max(res, std::abs(lhs - st.gscale * gv));
    }
  }
  return res;
}

namespace {

void validate(const TransmissionProblem& p) {
  if (!p.grid) throw std::invalid_argument("problem: missing grid");
  if (!p.phi) throw std::invalid_argument("problem: missing boundary data phi");
  if (p.mode != InterfaceMode::none) {
    if (!p.gamma.grid || p.gamma.grid->nt != p.grid->nt || p.gamma.grid->m != p.grid->m ||
        p.gamma.grid->h != p.grid->h || p.gamma.grid->dt != p.grid->dt ||
        !p.gamma.psi_fn)
      throw std::invalid_argument("problem: interface not sampled on the problem grid");
  }
  if (p.trace_order != 1 && p.trace_order != 2) throw std::invalid_argument("problem: trace_order must be 1 or 2");
  for (const OperatorSpec* F : {&p.F_plus, &p.F_minus}) {
    if (p.mode == InterfaceMode::none && F == &p.F_minus) continue;
    if (p.ellipticity_samples > 0) {
      auto rep = check_ellipticity(*F, p.ellipticity_samples, p.grid->n);
      if (!rep.passed) throw std::invalid_argument("problem: operator fails the ellipticity check");
    }
  }
}

double max_slope(const TransmissionProblem& p) {
  double L = p.F_plus.max_slope();
  if (p.mode != InterfaceMode::none) L = std::max(L, p.F_minus.max_slope());
  return L;
}

}  // namespace

std::pair<Field, SolveReport> solve(const TransmissionProblem& p) {
  auto t_start = std::chrono::steady_clock::now();
  validate(p);
  const GridCylinder& g = *p.grid;
  SolveReport rep;
  rep.isa = kernels::isa_name(kernels::active_isa());
  CflStep c = cfl_dt(g, max_slope(p), p.theta, g.dt);
  rep.substeps = static_cast<int>(c.steps);
  rep.dt = c.dt;
  rep.cfl_ratio = c.dt / (c.raw / p.theta);
  rep.steps = static_cast<long>(g.nt - 1) * rep.substeps;

  Field u(p.grid);
  std::vector<double> cur(g.ns, 0.0), next;
  const double t_bot = g.time(0);
  for (std::size_t s = 0; s < g.ns; ++s) {
    if (!g.inside[s]) continue;
    Point q{{g.coord(s, 0), g.n == 2 ? g.coord(s, 1) : 0.0}, t_bot};
    cur[s] = p.phi(q);
  }
  Stepper st(p);
  for (std::size_t s = 0; s < g.ns; ++s) u.v[s] = u.vm[s] = cur[s];
  for (int k = 0; k + 1 < g.nt; ++k) {
    for (int sub = 0; sub < rep.substeps; ++sub) {
      double t = g.time(k) + sub * c.dt;
      bool bottom = k == 0 && sub == 0;
      st.step(cur, t, c.dt, bottom, next);
      double t1 = sub + 1 == rep.substeps ? g.time(k + 1) : t + c.dt;
      rep.max_interface_residual = std::max(rep.max_interface_residual, st.finalize(next, t1, false));
      cur.swap(next);
    }
    std::size_t off = g.node(k + 1, 0);
    for (std::size_t s = 0; s < g.ns; ++s) u.v[off + s] = u.vm[off + s] = cur[s];
  }
  rep.ghost_fallbacks = st.ghost_fallbacks();
  rep.cross_fallbacks = st.cross_fallbacks();
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {std::move(u), rep};
}

std::vector<double> step_explicit(const TransmissionProblem& p, const Field& u, int k) {
  validate(p);
  const GridCylinder& g = *p.grid;
  CflStep c = cfl_dt(g, max_slope(p), p.theta, g.dt);
  std::vector<double> cur(u.v.begin() + g.node(k, 0), u.v.begin() + g.node(k, 0) + g.ns), next;
  Stepper st(p);
  for (long sub = 0; sub < c.steps; ++sub) {
    double t = g.time(k) + sub * c.dt;
    st.step(cur, t, c.dt, k == 0 && sub == 0, next);
    st.finalize(next, sub + 1 == c.steps ? g.time(k + 1) : t + c.dt, false);
    cur.swap(next);
  }
  return cur;
}

bool monotone_weights_n1(const TransmissionProblem& p, int k, double* min_weight) {
  if (p.grid->n != 1) throw std::invalid_argument("monotone_weights_n1: n must be 1");
  const GridCylinder& g = *p.grid;
  // Linear surrogate with the steepest slope on both sides; the step is then affine.
  TransmissionProblem q = p;
  double L = max_slope(p);
  q.F_plus = OperatorSpec::make(OperatorKind::pucci_plus, L, L);
  q.F_minus = q.F_plus;
  q.f_plus = q.f_minus = nullptr;
  q.phi = [](const Point&) { return 0.0; };
  q.ellipticity_samples = 0;
  CflStep c = cfl_dt(g, max_slope(p), p.theta, g.dt);
  const double t = g.time(k);
  Stepper st(q);
  std::vector<double> base(g.ns, 0.0), out0, out1;
  st.step(base, t, c.dt, k == 0, out0);
  st.finalize(out0, t + c.dt, false);
  double wmin = INFINITY;
  for (std::size_t j = 0; j < g.ns; ++j) {
    if (g.lateral[j]) continue;
    std::vector<double> e(g.ns, 0.0);
    e[j] = 1.0;
    st.step(e, t, c.dt, k == 0, out1);
    st.finalize(out1, t + c.dt, false);
    for (std::size_t i = 0; i < g.ns; ++i) {
      if (g.lateral[i]) continue;
      wmin = std::min(wmin, out1[i] - out0[i]);
    }
  }
  if (min_weight) *min_weight = wmin;
  return wmin >= -1e-14;
}

double lnp1_norm(const Field& f, const std::vector<std::uint8_t>* include) {
  const GridCylinder& g = *f.grid;
  double s = 0.0;
  for (std::size_t id = 0; id < f.size(); ++id) {
    if (!g.in(id) || (include && !(*include)[id])) continue;
    s += std::pow(std::abs(f.v[id]), g.n + 1);
  }
  return std::pow(s * std::pow(g.h, g.n) * g.dt, 1.0 / (g.n + 1));
}

Field source_field(const TransmissionProblem& p) {
  const GridCylinder& g = *p.grid;
  Field f(p.grid);
  for (std::size_t id = 0; id < f.size(); ++id) {
    if (!g.in(id)) continue;
    Point q = g.point(id);
    bool plus = true;
    if (p.mode != InterfaceMode::none) {
      int k = g.level(id);
      std::size_t s = g.spatial(id);
      plus = g.xn(g.row_of(s)) - p.gamma.psi_at(k, g.col_of(s)) >= 0.0;
    }
    const SpaceTimeFn& fn = plus ? p.f_plus : p.f_minus;
    f.v[id] = f.vm[id] = fn ? fn(q) : 0.0;
  }
  return f;
}

std::pair<Field, Field> perron_barriers(const TransmissionProblem& p) {
  if (p.gamma.family != "flat") throw std::invalid_argument("perron_barriers: flat interface required");
  const GridCylinder& g = *p.grid;
  const int n = g.n;
  const double a = p.gamma.psi_at(0, 0);
  double fsup = source_field(p).sup_norm();
  double gsup = 0.0;
  if (p.g)
    for (int k = 0; k < g.nt; ++k)
      for (int c = 0; c < g.ncols(); ++c) gsup = std::max(gsup, std::abs(p.g(g.xprime(c), g.time(k))));
  const double lam = std::min(p.F_plus.lambda, p.F_minus.lambda);
  const double Lam = std::max(p.F_plus.max_slope(), p.F_minus.max_slope());
  auto kink = [gsup, a, n](const Point& q) { return 0.5 * gsup * std::abs(q.x[n - 1] - a); };

  TransmissionProblem lo;
  lo.grid = p.grid;
  lo.mode = InterfaceMode::none;
  lo.theta = p.theta;
  lo.F_plus = OperatorSpec::make(OperatorKind::pucci_minus, lam, Lam);
  lo.f_plus = [fsup](const Point&) { return -fsup; };
  lo.phi = [phi = p.phi, kink](const Point& q) { return phi(q) - kink(q); };
  TransmissionProblem up = lo;
  up.F_plus = OperatorSpec::make(OperatorKind::pucci_plus, lam, Lam);
  up.f_plus = [fsup](const Point&) { return fsup; };
  up.phi = [phi = p.phi, kink](const Point& q) { return phi(q) + kink(q); };

  Field lower = solve(lo).first, upper = solve(up).first;
  for (std::size_t id = 0; id < lower.size(); ++id) {
    if (!g.in(id)) continue;
    double k = kink(g.point(id));
    lower.v[id] = lower.vm[id] = lower.v[id] + k;
    upper.v[id] = upper.vm[id] = upper.v[id] - k;
  }
  return {std::move(lower), std::move(upper)};
}

DecompositionResult flat_decomposition_solve(const TransmissionProblem& base, double a, double g0) {
  const GridCylinder& g = *base.grid;
  const int n = g.n;
  auto kink = [g0, a, n](const Point& q) { return 0.5 * g0 * std::abs(q.x[n - 1] - a); };
  TransmissionProblem direct = base;
  direct.gamma = make_interface(base.grid, "flat", {{"a", a}});
  direct.mode = InterfaceMode::transmission;
  direct.g = [g0](double, double) { return g0; };
  direct.f_plus = direct.f_minus = nullptr;

  TransmissionProblem wp = direct;
  wp.mode = InterfaceMode::continuous;
  wp.g = nullptr;
  wp.phi = [phi = base.phi, kink](const Point& q) { return phi(q) - kink(q); };

  DecompositionResult out;
  out.v_direct = solve(direct).first;
  out.w = solve(wp).first;
  out.v_decomposed = out.w;
  for (std::size_t id = 0; id < out.w.size(); ++id) {
    if (!g.in(id)) continue;
    double v = out.w.v[id] + kink(g.point(id));
    out.v_decomposed.v[id] = out.v_decomposed.vm[id] = v;
    out.error = std::max(out.error, std::abs(out.v_direct.v[id] - v));
  }
  return out;
}

}  // namespace tplab
