#include "tplab/interface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace tplab {

namespace {

double param(const std::map<std::string, double>& p, const char* key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

InterfaceGraph make_interface_fn(GridPtr grid, PsiFn psi, PsiFn dpsi, double alpha,
                                 const std::string& family) {
  const GridCylinder& g = *grid;
  InterfaceGraph G;
  G.n = g.n;
  G.family = family;
  G.psi_fn = std::move(psi);
  G.dpsi_fn = dpsi ? std::move(dpsi) : PsiFn([](double, double) { return 0.0; });
  G.grid = grid;
  G.alpha = alpha;
  const int nc = g.ncols();
  G.psi.resize(static_cast<std::size_t>(g.nt) * nc);
  G.dpsi.resize(G.psi.size());
  for (int k = 0; k < g.nt; ++k)
    for (int c = 0; c < nc; ++c) {
      double xp = g.xprime(c), t = g.time(k);
      double v = G.psi_fn(xp, t);
      double d = g.n == 2 ? G.dpsi_fn(xp, t) : 0.0;
      if (!std::isfinite(v) || !std::isfinite(d)) throw std::domain_error("interface: non-finite psi sample");
      G.psi[static_cast<std::size_t>(k) * nc + c] = v;
      G.dpsi[static_cast<std::size_t>(k) * nc + c] = d;
      G.sup_abs = std::max(G.sup_abs, std::abs(v - g.center[g.n - 1]));
    }
  if (G.sup_abs >= g.r) throw std::domain_error("interface leaves the cylinder (|psi| >= r)");

  // Pointwise [psi]_{C^{1,alpha}} at the center.
  const double x0 = g.n == 2 ? g.center[0] : 0.0;
  const double p0 = G.psi_fn(x0, g.t0), d0 = g.n == 2 ? G.dpsi_fn(x0, g.t0) : 0.0;
  for (int k = 0; k < g.nt; ++k)
    for (int c = 0; c < nc; ++c) {
      double xp = g.xprime(c) - x0, t = g.time(k) - g.t0;
      if (std::abs(xp) > g.r) continue;
      double den = std::pow(xp * xp + std::abs(t), 0.5 * (1.0 + alpha));
      if (den == 0.0) continue;
      double num = std::abs(G.psi[static_cast<std::size_t>(k) * nc + c] - p0 - d0 * xp);
      G.c1alpha_seminorm = std::max(G.c1alpha_seminorm, num / den);
    }
  return G;
}

InterfaceGraph make_interface(GridPtr grid, const std::string& family,
                              const std::map<std::string, double>& params, double alpha) {
  const int n = grid->n;
  PsiFn psi, dpsi;
  if (family == "flat") {
    double a = param(params, "a", 0.0);
    psi = [a](double, double) { return a; };
  } else if (family == "tilt") {
    double s = param(params, "slope", 0.0);
    if (n == 1) {
      psi = [s](double, double t) { return s * t; };
    } else {
      psi = [s](double x, double) { return s * x; };
      dpsi = [s](double, double) { return s; };
    }
  } else if (family == "bump") {
    double A = param(params, "A", 0.05), a = param(params, "alpha", alpha);
    psi = [A, a, n](double x, double t) {
      double q = (n == 2 ? x * x : 0.0) + std::abs(t);
      return A * std::pow(q, 0.5 * (1.0 + a));
    };
    dpsi = [A, a](double x, double t) {
      double q = x * x + std::abs(t);
      return q == 0.0 ? 0.0 : A * (1.0 + a) * std::pow(q, 0.5 * (a - 1.0)) * x;
    };
  } else if (family == "wave") {
    double A = param(params, "A", 0.05), k = param(params, "k", 3.0);
    if (n == 1) {
      psi = [A, k](double, double t) { return A * std::sin(k * t); };
    } else {
      psi = [A, k](double x, double) { return A * std::sin(k * x); };
      dpsi = [A, k](double x, double) { return A * k * std::cos(k * x); };
    }
  } else if (family == "dini") {
    double kap = param(params, "kappa", 0.25), b = param(params, "beta", 0.5);
    if (n == 1) {
      psi = [kap, b](double, double t) { return kap * std::pow(std::abs(t), 0.5 * (1.0 + b)); };
    } else {
      psi = [kap, b](double x, double) { return kap * std::pow(std::abs(x), 1.0 + b); };
      dpsi = [kap, b](double x, double) { return kap * (1.0 + b) * std::pow(std::abs(x), b) * sgn(x); };
    }
  } else {
    throw std::invalid_argument("unknown interface family '" + family + "'");
  }
  InterfaceGraph G = make_interface_fn(std::move(grid), psi, dpsi, alpha, family);
  G.params = params;
  return G;
}

void InterfaceGraph::write_csv(std::ostream& os) const {
  const GridCylinder& g = *grid;
  os << (n == 1 ? "t,psi\n" : "x1prime,t,psi,gradpsi1\n");
  auto saved = os.precision(17);
  for (int k = 0; k < g.nt; ++k)
    for (int c = 0; c < g.ncols(); ++c) {
      if (n == 2) os << g.xprime(c) << ',';
      os << g.time(k) << ',' << psi_at(k, c);
      if (n == 2) os << ',' << dpsi_at(k, c);
      os << '\n';
    }
  os.precision(saved);
}

std::array<double, 2> normal_from_gradient(int n, double dpsi) {
  if (n == 1) return {1.0, 0.0};
  double s = std::sqrt(1.0 + dpsi * dpsi);
  return {-dpsi / s, 1.0 / s};
}

std::array<double, 2> normal_vector(const InterfaceGraph& gamma, double xprime, double t) {
  return normal_from_gradient(gamma.n, gamma.n == 2 ? gamma.dpsi_fn(xprime, t) : 0.0);
}

const char* to_string(NodeTag t) {
  switch (t) {
    case NodeTag::plus_interior: return "plus_interior";
    case NodeTag::minus_interior: return "minus_interior";
    case NodeTag::band_plus: return "band_plus";
    case NodeTag::band_minus: return "band_minus";
    case NodeTag::boundary: return "boundary";
  }
  return "?";
}

NodeClassification classify_nodes(const GridCylinder& g, const InterfaceGraph& gamma) {
  if (!gamma.grid || gamma.grid->nt != g.nt || gamma.grid->ncols() != g.ncols())
    throw std::invalid_argument("classify_nodes: interface not sampled on this grid");
  NodeClassification c;
  c.tag.assign(g.size(), NodeTag::boundary);
  c.sdist.assign(g.size(), 0.0);
  c.side.assign(g.size(), 1);
  for (int k = 0; k < g.nt; ++k)
    for (std::size_t s = 0; s < g.ns; ++s) {
      if (!g.inside[s]) continue;
      std::size_t id = g.node(k, s);
      double d = g.xn(g.row_of(s)) - gamma.psi_at(k, g.col_of(s));
      c.sdist[id] = d;
      c.side[id] = d >= 0.0 ? 1 : -1;
      if (k == 0 || g.lateral[s]) continue;
      if (d > g.h) c.tag[id] = NodeTag::plus_interior;
      else if (d < -g.h) c.tag[id] = NodeTag::minus_interior;
      else c.tag[id] = d >= 0.0 ? NodeTag::band_plus : NodeTag::band_minus;
    }
  return c;
}

bool is_slaved(double sdist, double h, bool on_boundary) {
  return !on_boundary && std::abs(sdist) < 0.5 * h;
}

ColumnGeometry column_geometry(const GridCylinder& g, int col, double psi, double dpsi,
                               bool bottom_level, int order) {
  ColumnGeometry geo;
  geo.psi = psi;
  geo.dpsi = dpsi;
  geo.lo = g.m;
  geo.hi = -1;
  for (int j = 0; j < g.m; ++j)
    if (g.inside[g.at_col_row(col, j)]) {
      geo.lo = std::min(geo.lo, j);
      geo.hi = std::max(geo.hi, j);
    }
  if (geo.lo > geo.hi) return geo;
  const double tiny = 1e-12 * g.h;
  auto boundary = [&](int j) { return bottom_level || g.lateral[g.at_col_row(col, j)] != 0; };
  // First row on the plus side (x_n - psi >= 0).
  int first_plus = geo.lo;
  while (first_plus <= geo.hi && g.xn(first_plus) - psi < 0.0) ++first_plus;
  for (int j = first_plus; j <= geo.hi && geo.np < order; ++j) {
    double s = g.xn(j) - psi;
    if (s < tiny || is_slaved(s, g.h, boundary(j))) continue;
    geo.prow[geo.np] = j;
    geo.pdist[geo.np++] = s;
  }
  for (int j = first_plus - 1; j >= geo.lo && geo.nm < order; --j) {
    double s = psi - g.xn(j);
    if (s < tiny || is_slaved(-s, g.h, boundary(j))) continue;
    geo.mrow[geo.nm] = j;
    geo.mdist[geo.nm++] = s;
  }
  geo.active = geo.np > 0 && geo.nm > 0;
  return geo;
}

namespace {

// Weights of the upward one-sided derivative at distance-0 from nodes at a (and b).
void one_sided_weights(int cnt, const std::array<double, 2>& d, double& c0, double& c1, double& c2) {
  if (cnt >= 2) {
    double a = d[0], b = d[1];
    c0 = -(a + b) / (a * b);
    c1 = b / (a * (b - a));
    c2 = -a / (b * (b - a));
  } else {
    c0 = -1.0 / d[0];
    c1 = 1.0 / d[0];
    c2 = 0.0;
  }
}

}  // namespace

TraceStencil trace_stencil(const ColumnGeometry& geo) {
  TraceStencil st;
  if (!geo.active) return st;
  st.active = true;
  st.gscale = 1.0 / std::sqrt(1.0 + geo.dpsi * geo.dpsi);
  double p0, p1, p2, m0, m1, m2;
  one_sided_weights(geo.np, geo.pdist, p0, p1, p2);
  one_sided_weights(geo.nm, geo.mdist, m0, m1, m2);
  st.coef = p0 + m0;
  st.row[st.nw] = geo.prow[0];
  st.w[st.nw++] = p1;
  if (geo.np >= 2) {
    st.row[st.nw] = geo.prow[1];
    st.w[st.nw++] = p2;
  }
  st.row[st.nw] = geo.mrow[0];
  st.w[st.nw++] = m1;
  if (geo.nm >= 2) {
    st.row[st.nw] = geo.mrow[1];
    st.w[st.nw++] = m2;
  }
  return st;
}

double solve_trace(const GridCylinder& g, int col, const TraceStencil& st, const double* level,
                   double gval) {
  if (!st.active) return std::numeric_limits<double>::quiet_NaN();
  double acc = st.gscale * gval;
  for (int i = 0; i < st.nw; ++i) acc -= st.w[i] * level[g.at_col_row(col, st.row[i])];
  return acc / st.coef;
}

std::vector<double> TraceSystem::traces(const Field& u, int k) const {
  const GridCylinder& gr = *grid;
  std::vector<double> out(gr.ncols());
  const double* level = u.v.data() + static_cast<std::size_t>(k) * gr.ns;
  for (int c = 0; c < gr.ncols(); ++c) {
    std::size_t i = index(k, c);
    out[c] = solve_trace(gr, c, stencil[i], level, g[i]);
  }
  return out;
}

TraceSystem build_trace_system(const NodeClassification& cls, const InterfaceGraph& gamma,
                               const JumpFn& gfn, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("trace order must be 1 or 2");
  const GridCylinder& g = *gamma.grid;
  if (cls.tag.size() != g.size()) throw std::invalid_argument("build_trace_system: classification size mismatch");
  TraceSystem ts;
  ts.grid = gamma.grid;
  ts.order = order;
  const std::size_t total = static_cast<std::size_t>(g.nt) * g.ncols();
  ts.geom.resize(total);
  ts.stencil.resize(total);
  ts.g.resize(total);
  for (int k = 0; k < g.nt; ++k)
    for (int c = 0; c < g.ncols(); ++c) {
      std::size_t i = ts.index(k, c);
      ts.geom[i] = column_geometry(g, c, gamma.psi_at(k, c), gamma.dpsi_at(k, c), k == 0, order);
      ts.stencil[i] = trace_stencil(ts.geom[i]);
      ts.g[i] = gfn ? gfn(g.xprime(c), g.time(k)) : 0.0;
      if (ts.stencil[i].active && !(ts.stencil[i].coef < -1e-12))
        throw std::domain_error("singular local jump equation");
    }
  return ts;
}

double one_sided_dn(const GridCylinder& g, int col, const ColumnGeometry& geo, int side,
                    double trace_value, const double* level) {
  double c0, c1, c2;
  if (side > 0) {
    if (geo.np == 0) throw std::domain_error("one-sided derivative: no plus-side stencil");
    one_sided_weights(geo.np, geo.pdist, c0, c1, c2);
    double d = c0 * trace_value + c1 * level[g.at_col_row(col, geo.prow[0])];
    if (geo.np >= 2) d += c2 * level[g.at_col_row(col, geo.prow[1])];
    return d;
  }
  if (geo.nm == 0) throw std::domain_error("one-sided derivative: no minus-side stencil");
  one_sided_weights(geo.nm, geo.mdist, c0, c1, c2);
  double d = c0 * trace_value + c1 * level[g.at_col_row(col, geo.mrow[0])];
  if (geo.nm >= 2) d += c2 * level[g.at_col_row(col, geo.mrow[1])];
  return -d;
}

double one_sided_normal_derivative(const Field& u, double trace_value, const TraceSystem& ts, int k,
                                   int col, int side, double trace_slope) {
  const GridCylinder& g = *ts.grid;
  const ColumnGeometry& geo = ts.geom[ts.index(k, col)];
  const double* level = u.v.data() + static_cast<std::size_t>(k) * g.ns;
  double d = one_sided_dn(g, col, geo, side, trace_value, level);
  if (g.n == 1) return d;
  double q = geo.dpsi;
  return (d * (1.0 + q * q) - q * trace_slope) / std::sqrt(1.0 + q * q);
}

}  // namespace tplab
