#include "tplab/estimates.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tplab/envelopes.hpp"

namespace tplab {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 2) return std::numeric_limits<double>::quiet_NaN();
  double den = cnt * sxx - sx * sx;
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (cnt * sxy - sx * sy) / den;
}

AbpReport abp_verify(const TransmissionProblem& p, const Field& u) {
  const GridCylinder& g = *u.grid;
  AbpReport r;
  auto bmask = boundary_mask(g);
  for (std::size_t id = 0; id < u.size(); ++id) {
    if (!g.in(id)) continue;
    double um = std::max(-u.v[id], 0.0);
    r.lhs = std::max(r.lhs, um);
    if (bmask[id]) r.boundary = std::max(r.boundary, um);
  }
  if (p.g && p.mode == InterfaceMode::transmission)
    for (int k = 0; k < g.nt; ++k)
      for (int c = 0; c < g.ncols(); ++c) {
        double xp = g.xprime(c);
        if (std::abs(xp - g.center[0]) > g.r && g.n == 2) continue;
        r.g_plus = std::max(r.g_plus, p.g(xp, g.time(k)));
      }
  Field fm = source_field(p);
  for (double& v : fm.v) v = std::max(-v, 0.0);
  r.f_norm = lnp1_norm(fm);
  Field neg = u;
  for (std::size_t id = 0; id < neg.size(); ++id) neg.v[id] = neg.vm[id] = std::min(u.v[id], 0.0);
  EnvelopeResult env = parabolic_convex_envelope(neg, true);
  r.f_norm_contact = lnp1_norm(fm, &env.contact);
  double den = r.g_plus + r.f_norm;
  if (den <= 1e-8) {
    r.vacuous = true;
  } else {
    r.empirical_C = std::max(r.lhs - r.boundary, 0.0) / den;
  }
  return r;
}

bool SpaceTimeBox::contains_box(const SpaceTimeBox& o, int n) const {
  const double tol = 1e-12;
  if (o.tlo < tlo - tol || o.thi > thi + tol) return false;
  if (ball) {
    if (o.ball) {
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) d2 += std::pow(o.center[a] - center[a], 2);
      return std::sqrt(d2) + o.radius <= radius + tol;
    }
    double far2 = 0.0;
    for (int a = 0; a < n; ++a) {
      double d = std::max(std::abs(o.lo[a] - center[a]), std::abs(o.hi[a] - center[a]));
      far2 += d * d;
    }
    return std::sqrt(far2) <= radius + tol;
  }
  for (int a = 0; a < n; ++a)
    if (o.lo[a] < lo[a] - tol || o.hi[a] > hi[a] + tol) return false;
  return true;
}

bool SpaceTimeBox::disjoint(const SpaceTimeBox& o, int n) const {
  if (thi <= o.tlo || o.thi <= tlo) return true;
  for (int a = 0; a < n; ++a)
    if (hi[a] <= o.lo[a] || o.hi[a] <= lo[a]) return true;
  return false;
}

namespace {

SpaceTimeBox cube(int n, const std::array<double, 2>& c, double half, double tlo, double thi) {
  SpaceTimeBox b;
  for (int a = 0; a < n; ++a) {
    b.lo[a] = c[a] - half;
    b.hi[a] = c[a] + half;
  }
  b.center = c;
  b.tlo = tlo;
  b.thi = thi;
  return b;
}

SpaceTimeBox ball_box(int n, const std::array<double, 2>& c, double R, double tlo, double thi) {
  SpaceTimeBox b = cube(n, c, R, tlo, thi);
  b.ball = true;
  b.radius = R;
  return b;
}

bool in_box(const SpaceTimeBox& b, const Point& p, int n) {
  if (!(p.t > b.tlo && p.t <= b.thi + 1e-12)) return false;
  if (b.ball) {
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) d2 += std::pow(p.x[a] - b.center[a], 2);
    return d2 < b.radius * b.radius;
  }
  for (int a = 0; a < n; ++a)
    if (!(p.x[a] > b.lo[a] && p.x[a] < b.hi[a])) return false;
  return true;
}

}  // namespace

HarnackGeometry harnack_geometry(int n, const InterfaceGraph* gamma) {
  if (n != 1 && n != 2) throw std::invalid_argument("harnack_geometry: n must be 1 or 2");
  HarnackGeometry G;
  G.n = n;
  G.r = 1.0 / (4.0 * std::sqrt(static_cast<double>(n)));
  G.sigma = 1.0 / (2.0 * (1.0 + 2.0 * G.r));
  G.r0 = G.sigma * G.r;
  const double s = G.sigma, r = G.r;
  G.xbar = {0.0, 0.0};
  G.xbar[n - 1] = 2.0 * s * r;
  G.tbar = -12.0 * s * s * r * r;
  G.ttilde = G.tbar + 2.0 * s * s * r * r;
  G.P = ball_box(n, G.xbar, s, G.ttilde, G.ttilde + s * s);
  G.K1 = cube(n, G.xbar, s * r, G.ttilde, G.ttilde + s * s * r * r);
  G.K2 = cube(n, G.xbar, 3.0 * s * r, G.ttilde + s * s * r * r, G.ttilde + 10.0 * s * s * r * r);
  G.K3 = ball_box(n, G.xbar, s * r / 4.0, G.tbar - s * s * r * r / 4.0, G.tbar);
  G.K1_in_P = G.P.contains_box(G.K1, n);
  G.K2_in_P = G.P.contains_box(G.K2, n);
  G.K3_K1_disjoint = G.K3.disjoint(G.K1, n);
  if (gamma && gamma->sup_abs > s * r / 2.0 + 1e-15)
    throw std::domain_error("harnack_geometry: sup |psi| exceeds sigma r / 2");
  return G;
}

std::vector<std::uint8_t> cylinder_mask(const GridCylinder& g, double rho) {
  std::vector<std::uint8_t> m(g.size(), 0);
  const double tol = 1e-12;
  for (std::size_t id = 0; id < g.size(); ++id) {
    if (!g.in(id)) continue;
    Point p = g.point(id);
    double d2 = 0.0;
    for (int a = 0; a < g.n; ++a) d2 += std::pow(p.x[a] - g.center[a], 2);
    if (d2 <= rho * rho * (1.0 + tol) && p.t >= g.t0 - rho * rho - tol) m[id] = 1;
  }
  return m;
}

double oscillation(const Field& u, const std::vector<std::uint8_t>& mask) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t id = 0; id < u.size(); ++id) {
    if (!mask[id]) continue;
    lo = std::min(lo, u.v[id]);
    hi = std::max(hi, u.v[id]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

HarnackReport harnack_verify(const TransmissionProblem& p, const Field& u, double eps0) {
  const GridCylinder& g = *u.grid;
  HarnackGeometry G = harnack_geometry(g.n, p.mode == InterfaceMode::none ? nullptr : &p.gamma);
  HarnackReport r;
  r.sup_abs = u.sup_norm();
  if (r.sup_abs > 1.0 + 5.0 * g.h) throw std::invalid_argument("harnack_verify: ||u|| exceeds 1");
  Point pb;
  pb.x = G.xbar;
  pb.t = G.tbar;
  r.u_bar = u.sample(pb);
  if (r.u_bar < 0.0) throw std::invalid_argument("harnack_verify: u(xbar, tbar) < 0");
  double gsup = 0.0;
  if (p.g && p.mode == InterfaceMode::transmission)
    for (int k = 0; k < g.nt; ++k)
      for (int c = 0; c < g.ncols(); ++c) gsup = std::max(gsup, std::abs(p.g(g.xprime(c), g.time(k))));
  r.data_size = gsup + lnp1_norm(source_field(p));
  if (r.data_size > eps0) throw std::invalid_argument("harnack_verify: data exceed eps0");
  auto mask = cylinder_mask(g, G.r0);
  double inf0 = INFINITY;
  r.sup_K3 = -INFINITY;
  r.inf_K1 = INFINITY;
  for (std::size_t id = 0; id < u.size(); ++id) {
    if (!g.in(id)) continue;
    if (mask[id]) inf0 = std::min(inf0, u.v[id]);
    Point q = g.point(id);
    if (in_box(G.K3, q, g.n)) r.sup_K3 = std::max(r.sup_K3, u.v[id]);
    if (in_box(G.K1, q, g.n)) r.inf_K1 = std::min(r.inf_K1, u.v[id]);
  }
  r.measured_c = 1.0 + inf0;
  r.passed = r.measured_c > -5.0 * g.h;
  return r;
}

OscillationReport oscillation_decay(const Field& u, double r0, double data_term, double C) {
  const GridCylinder& g = *u.grid;
  OscillationReport r;
  std::vector<std::uint8_t> all(u.size(), 0);
  for (std::size_t id = 0; id < u.size(); ++id) all[id] = g.in(id);
  r.osc_outer = oscillation(u, all);
  r.osc_inner = oscillation(u, cylinder_mask(g, r0));
  r.correction = C * data_term;
  if (r.osc_outer < 1e-10) {
    r.vacuous = true;
    return r;
  }
  r.mu_est = (r.osc_inner - r.correction) / r.osc_outer;
  return r;
}

HolderEstimate holder_estimate(const Field& u, double alpha1_guess, double data_norm, bool with_norm) {
  const GridCylinder& g = *u.grid;
  HolderEstimate e;
  for (double R = g.r; R >= 4.0 * g.h - 1e-12; R *= 0.5) {
    e.radii.push_back(R);
    e.osc.push_back(oscillation(u, cylinder_mask(g, R)));
  }
  if (e.osc.empty() || e.osc.front() < 1e-10) {
    e.vacuous = true;
    return e;
  }
  e.fitted_alpha = loglog_slope(e.radii, e.osc);
  if (with_norm) {
    auto half = cylinder_mask(g, 0.5 * g.r);
    e.norm = holder_norm(u, alpha1_guess, &half);
    double denom = u.sup_norm() + data_norm;
    if (denom > 0.0)
      e.data_ratio = (e.norm.sup_norm + e.norm.space_seminorm + e.norm.time_seminorm) / denom;
  }
  return e;
}

AffineFitSequence c1alpha_fit(const Field& u, const InterfaceGraph& gamma, double g0, double rho, int K) {
  const GridCylinder& g = *u.grid;
  const int n = g.n;
  AffineFitSequence out;
  out.rho = rho;
  std::vector<double> radii, res;
  for (int k = 0; k <= K; ++k) {
    AffineLevel L;
    L.k = k;
    L.radius = std::pow(rho, k) * g.r;
    auto mask = cylinder_mask(g, L.radius);
    std::vector<std::size_t> ids;
    std::vector<int> side;
    int np = 0, nm = 0;
    for (std::size_t id = 0; id < u.size(); ++id) {
      if (!mask[id]) continue;
      Point q = g.point(id);
      double xp = n == 2 ? q.x[0] : 0.0;
      int s = q.x[n - 1] - gamma.psi_fn(xp, q.t) >= 0.0 ? 1 : -1;
      ids.push_back(id);
      side.push_back(s);
      (s > 0 ? np : nm)++;
    }
    L.nodes = ids.size();
    L.usable = L.radius >= 8.0 * g.h - 1e-12 && np > 0 && nm > 0 && ids.size() >= static_cast<std::size_t>(n + 3);
    if (!L.usable) {
      out.levels.push_back(L);
      continue;
    }
    // Unknowns: A^- (n entries), g_hat, b.
    Eigen::MatrixXd M(ids.size(), n + 2);
    Eigen::VectorXd y(ids.size());
    for (std::size_t a = 0; a < ids.size(); ++a) {
      Point q = g.point(ids[a]);
      for (int d = 0; d < n; ++d) M(a, d) = q.x[d] - g.center[d];
      M(a, n) = side[a] > 0 ? q.x[n - 1] - g.center[n - 1] : 0.0;
      M(a, n + 1) = 1.0;
      y(a) = u.v[ids[a]];
    }
    Eigen::VectorXd c = M.colPivHouseholderQr().solve(y);
    for (int d = 0; d < n; ++d) L.A_minus[d] = L.A_plus[d] = c(d);
    L.A_plus[n - 1] = c(n - 1) + c(n);
    L.g_hat = L.A_plus[n - 1] - L.A_minus[n - 1];
    L.b = c(n + 1);
    double cr = 0.0;
    for (int d = 0; d < n; ++d) {
      double e = L.A_plus[d] - L.A_minus[d] - (d == n - 1 ? L.g_hat : 0.0);
      cr = std::max(cr, std::abs(e));
    }
    L.constraint_residual = cr;
    for (std::size_t a = 0; a < ids.size(); ++a) {
      Point q = g.point(ids[a]);
      const auto& A = side[a] > 0 ? L.A_plus : L.A_minus;
      double l = L.b;
      for (int d = 0; d < n; ++d) l += A[d] * (q.x[d] - g.center[d]);
      L.residual = std::max(L.residual, std::abs(u.v[ids[a]] - l));
    }
    radii.push_back(L.radius);
    res.push_back(L.residual);
    out.g_hat = L.g_hat;
    ++out.usable;
    out.levels.push_back(L);
  }
  if (out.usable < 2) throw std::invalid_argument("c1alpha_fit: fewer than 2 usable levels");
  out.slope = loglog_slope(radii, res);
  out.fitted_alpha = out.slope - 1.0;
  out.g_error = std::abs(out.g_hat - g0);
  return out;
}

StabilityReport stability_experiment(const std::vector<double>& deltas, const TransmissionProblem& base) {
  StabilityReport rep;
  const GridCylinder& g = *base.grid;
  const int n = g.n;
  auto half = cylinder_mask(g, 0.5 * g.r);
  std::vector<double> xs, ys;
  for (double d : deltas) {
    if (d < 0.0 || d >= 0.25) throw std::invalid_argument("stability_experiment: delta must be in [0, 1/4)");
    TransmissionProblem curved = base, over = base, under = base;
    curved.gamma = make_interface(base.grid, "bump", {{"A", d}, {"alpha", base.gamma.alpha}}, base.gamma.alpha);
    over.gamma = make_interface(base.grid, "flat", {{"a", d}});
    under.gamma = make_interface(base.grid, "flat", {{"a", -d}});
    Field u = solve(curved).first;
    Field vbar = solve(over).first;
    Field vunder = solve(under).first;
    StabilityRow row;
    row.delta = d;
    for (std::size_t id = 0; id < u.size(); ++id) {
      if (!g.in(id)) continue;
      row.flat_gap = std::max(row.flat_gap, std::abs(vbar.v[id] - vunder.v[id]));
      if (!half[id]) continue;
      Point q = g.point(id);
      double xp = n == 2 ? q.x[0] : 0.0;
      bool plus = q.x[n - 1] - curved.gamma.psi_fn(xp, q.t) > 0.0;
      double v = plus ? vunder.v[id] : vbar.v[id];
      row.glue_gap = std::max(row.glue_gap, std::abs(u.v[id] - v));
    }
    rep.rows.push_back(row);
    if (d > 0.0) {
      xs.push_back(d);
      ys.push_back(row.glue_gap);
    }
  }
  rep.tau = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
  return rep;
}

}  // namespace tplab
