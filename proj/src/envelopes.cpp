#include "tplab/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tplab {

std::vector<double> lower_hull_1d(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<std::size_t> hull;
  hull.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull.back();
      // Drop b when it lies on or above the chord a-i.
      double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<double> out(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 1 < hull.size() && hull[seg + 1] <= i) ++seg;
    std::size_t a = hull[seg];
    if (a == i) {
      out[i] = y[i];
      continue;
    }
    std::size_t b = hull[seg + 1];
    double w = (x[i] - x[a]) / (x[b] - x[a]);
    out[i] = std::min(y[i], (1.0 - w) * y[a] + w * y[b]);
  }
  return out;
}

namespace {

// Extended lattice used by the envelope: the original box padded by E nodes.
struct Lattice {
  int n = 1, M = 0, E = 0;
  std::vector<std::uint8_t> mask;  // in the (extended) ball
  std::vector<long> orig;          // original spatial index, or -1
};

Lattice make_lattice(const GridCylinder& g, bool extend, double margin) {
  Lattice L;
  L.n = g.n;
  L.E = extend ? static_cast<int>(std::lround((margin - 1.0) * g.r / g.h)) : 0;
  L.M = g.m + 2 * L.E;
  const double R = extend ? g.r + L.E * g.h : g.r;
  const std::size_t total = g.n == 1 ? L.M : static_cast<std::size_t>(L.M) * L.M;
  L.mask.assign(total, 0);
  L.orig.assign(total, -1);
  for (std::size_t q = 0; q < total; ++q) {
    int i = g.n == 1 ? static_cast<int>(q) : static_cast<int>(q % L.M);
    int j = g.n == 1 ? 0 : static_cast<int>(q / L.M);
    int oi = i - L.E, oj = g.n == 1 ? 0 : j - L.E;
    bool in_box = oi >= 0 && oi < g.m && oj >= 0 && (g.n == 1 || oj < g.m);
    if (in_box) {
      std::size_t s = g.spatial_index(oi, oj);
      if (g.inside[s]) L.orig[q] = static_cast<long>(s);
    }
    double dx = (i - L.E) * g.h - g.r, dy = g.n == 1 ? 0.0 : (j - L.E) * g.h - g.r;
    bool in_ball = dx * dx + dy * dy <= R * R * (1.0 + 1e-12);
    if (!extend) in_ball = L.orig[q] >= 0;
    L.mask[q] = in_ball || L.orig[q] >= 0;
  }
  return L;
}

// One pass of 1D convexification along every lattice line in direction (di, dj).
double sweep(const Lattice& L, std::vector<double>& w, int di, int dj) {
  double change = 0.0;
  const int M = L.M;
  std::vector<double> xs, ys;
  std::vector<std::size_t> ids;
  auto flush = [&]() {
    if (ids.size() >= 3) {
      auto hv = lower_hull_1d(xs, ys);
      for (std::size_t a = 0; a < ids.size(); ++a) {
        change = std::max(change, w[ids[a]] - hv[a]);
        w[ids[a]] = hv[a];
      }
    }
    xs.clear();
    ys.clear();
    ids.clear();
  };
  for (int j0 = 0; j0 < M; ++j0)
    for (int i0 = 0; i0 < M; ++i0) {
      int pi = i0 - di, pj = j0 - dj;
      if (pi >= 0 && pi < M && pj >= 0 && pj < M) continue;  // not a line start
      int i = i0, j = j0, step = 0;
      while (i >= 0 && i < M && j >= 0 && j < M) {
        std::size_t q = static_cast<std::size_t>(i + M * j);
        if (L.mask[q]) {
          xs.push_back(step);
          ys.push_back(w[q]);
          ids.push_back(q);
        } else {
          flush();
        }
        i += di;
        j += dj;
        ++step;
      }
      flush();
    }
  return change;
}

}  // namespace

EnvelopeResult parabolic_convex_envelope(const Field& u, bool extend_zero, double margin) {
  if (!u.grid) throw std::invalid_argument("parabolic_convex_envelope: empty field");
  const GridCylinder& g = *u.grid;
  for (std::size_t id = 0; id < u.size(); ++id)
    if (g.in(id) && !std::isfinite(u.v[id]))
      throw std::invalid_argument("parabolic_convex_envelope: non-finite value");
  if (extend_zero && !(margin > 1.0)) throw std::invalid_argument("parabolic_convex_envelope: margin must exceed 1");
  Lattice L = make_lattice(g, extend_zero, margin);
  const std::size_t total = L.mask.size();
  const double big = std::numeric_limits<double>::infinity();
  std::vector<double> run(total, extend_zero ? 0.0 : big), w(total, 0.0), prev;
  EnvelopeResult res;
  res.envelope = Field(u.grid);
  for (int k = 0; k < g.nt; ++k) {
    for (std::size_t q = 0; q < total; ++q)
      if (L.orig[q] >= 0) run[q] = std::min(run[q], u.v[g.node(k, static_cast<std::size_t>(L.orig[q]))]);
    if (g.n == 1) {
      std::vector<double> xs, ys;
      std::vector<std::size_t> ids;
      for (std::size_t q = 0; q < total; ++q)
        if (L.mask[q]) {
          xs.push_back(static_cast<double>(q));
          ys.push_back(run[q]);
          ids.push_back(q);
        }
      auto hv = lower_hull_1d(xs, ys);
      for (std::size_t a = 0; a < ids.size(); ++a) w[ids[a]] = hv[a];
    } else {
      for (std::size_t q = 0; q < total; ++q)
        if (L.mask[q]) w[q] = k == 0 ? run[q] : std::min(run[q], prev[q]);
      for (int it = 0; it < 20000; ++it) {
        double c = 0.0;
        c = std::max(c, sweep(L, w, 1, 0));
        c = std::max(c, sweep(L, w, 0, 1));
        c = std::max(c, sweep(L, w, 1, 1));
        c = std::max(c, sweep(L, w, 1, -1));
        ++res.sweeps;
        if (c < 1e-10) break;
      }
      prev = w;
    }
    for (std::size_t q = 0; q < total; ++q)
      if (L.orig[q] >= 0) {
        std::size_t id = g.node(k, static_cast<std::size_t>(L.orig[q]));
        res.envelope.v[id] = res.envelope.vm[id] = w[q];
      }
  }
  Field ref = u;
  if (extend_zero)
    for (std::size_t id = 0; id < ref.size(); ++id) ref.v[id] = std::min(ref.v[id], 0.0);
  res.contact = contact_set(ref, res.envelope);
  res.krylov_tso_integral = krylov_tso_integrand(res.envelope, res.contact).integral;
  return res;
}

std::vector<std::uint8_t> contact_set(const Field& u, const Field& envelope, double tol) {
  const GridCylinder& g = *u.grid;
  if (tol < 0.0) tol = 10.0 * g.h * g.h;
  std::vector<std::uint8_t> c(u.size(), 0);
  for (std::size_t id = 0; id < u.size(); ++id)
    if (g.in(id) && u.v[id] - envelope.v[id] <= tol) c[id] = 1;
  return c;
}

KrylovTsoResult krylov_tso_integrand(const Field& env, const std::vector<std::uint8_t>& contact) {
  const GridCylinder& g = *env.grid;
  KrylovTsoResult r;
  r.integrand = Field(env.grid);
  const double ih2 = 1.0 / (g.h * g.h);
  auto inside = [&](int i, int j) {
    if (i < 0 || i >= g.m || j < 0 || (g.n == 2 && j >= g.m)) return false;
    return g.inside[g.spatial_index(i, j)] != 0;
  };
  for (std::size_t id = 0; id < env.size(); ++id) {
    if (!contact[id]) continue;
    int k = g.level(id);
    std::size_t s = g.spatial(id);
    int i = g.axis_index(s, 0), j = g.n == 2 ? g.axis_index(s, 1) : 0;
    bool ok = k >= 1 && inside(i - 1, j) && inside(i + 1, j);
    if (g.n == 2)
      ok = ok && inside(i, j - 1) && inside(i, j + 1) && inside(i - 1, j - 1) && inside(i + 1, j + 1) &&
           inside(i - 1, j + 1) && inside(i + 1, j - 1);
    if (!ok) {
      ++r.excluded;
      continue;
    }
    auto at = [&](int di, int dj) { return env.v[g.node(k, g.spatial_index(i + di, j + dj))]; };
    double c = at(0, 0);
    double dtm = (env.v[g.node(k - 1, s)] - c) / g.dt;
    double d11 = (at(-1, 0) - 2.0 * c + at(1, 0)) * ih2;
    double det = d11;
    if (g.n == 2) {
      double d22 = (at(0, -1) - 2.0 * c + at(0, 1)) * ih2;
      double d12 = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) * 0.25 * ih2;
      det = d11 * d22 - d12 * d12;
    }
    if (dtm < 0.0) { r.clamped_time += -dtm; dtm = 0.0; }
    if (det < 0.0) { r.clamped_det += -det; det = 0.0; }
    double v = dtm * det;
    r.integrand.v[id] = r.integrand.vm[id] = v;
    r.integral += v;
    ++r.used;
  }
  r.integral *= std::pow(g.h, g.n) * g.dt;
  return r;
}

namespace {

// min_q f[q] + c (p - q)^2 for p = 0..n-1 with its argmin.
void parabola_envelope(const std::vector<double>& f, double c, std::vector<double>& d, std::vector<int>& arg) {
  const int n = static_cast<int>(f.size());
  d.assign(n, 0.0);
  arg.assign(n, 0);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  auto key = [&](int q) { return f[q] + c * static_cast<double>(q) * q; };
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = (key(q) - key(v[k])) / (2.0 * c * (q - v[k]));
      if (s <= z[k] && k > 0) --k;
      else break;
    }
    if (s <= z[k]) {  // k == 0 and q dominates everywhere
      v[0] = q;
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int p = 0; p < n; ++p) {
    while (z[k + 1] < p) ++k;
    int q = v[k];
    d[p] = f[q] + c * static_cast<double>(p - q) * (p - q);
    arg[p] = q;
  }
}

}  // namespace

EpsEnvelope upper_eps_envelope(const Field& u, double eps, double rho) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps envelope: eps must be positive");
  const GridCylinder& g = *u.grid;
  if (!(rho > 0.0 && rho < g.r)) throw std::invalid_argument("eps envelope: need 0 < rho < r");
  EpsEnvelope e;
  e.eps = eps;
  e.rho = rho;
  e.upper = true;
  e.values = Field(u.grid);
  e.domain.assign(u.size(), 0);
  e.arg_x.assign(u.size(), 0.0);
  e.arg_t.assign(u.size(), 0.0);
  const double tol = 1e-12;
  int kmin = 0;
  while (kmin < g.nt && g.time(kmin) < g.t0 - rho * rho - tol) ++kmin;
  std::vector<std::uint8_t> in_ball(g.ns, 0);
  for (std::size_t s = 0; s < g.ns; ++s) {
    if (!g.inside[s]) continue;
    double d2 = 0.0;
    for (int a = 0; a < g.n; ++a) d2 += std::pow(g.coord(s, a) - g.center[a], 2);
    in_ball[s] = d2 <= rho * rho * (1.0 + tol);
  }
  const int nl = g.nt - kmin;
  // Pass over t: G(x, s) = max_t u(x, t) - (t - s)^2 / eps.
  std::vector<double> G(u.size(), 0.0);
  std::vector<int> argk(u.size(), 0);
  std::vector<double> f(nl), d;
  std::vector<int> arg;
  for (std::size_t s = 0; s < g.ns; ++s) {
    if (!in_ball[s]) continue;
    for (int a = 0; a < nl; ++a) f[a] = -u.v[g.node(kmin + a, s)];
    parabola_envelope(f, g.dt * g.dt / eps, d, arg);
    for (int a = 0; a < nl; ++a) {
      std::size_t id = g.node(kmin + a, s);
      G[id] = -d[a];
      argk[id] = kmin + arg[a];
      e.domain[id] = 1;
    }
  }
  if (g.n == 1) {
    for (std::size_t id = 0; id < u.size(); ++id) {
      if (!e.domain[id]) continue;
      e.values.v[id] = e.values.vm[id] = G[id];
      e.arg_x[id] = g.coord(g.spatial(id), 0);
      e.arg_t[id] = g.time(argk[id]);
    }
    return e;
  }
  // Pass over x' along each row of fixed y_n.
  for (int k = kmin; k < g.nt; ++k)
    for (int j = 0; j < g.m; ++j) {
      int lo = -1, hi = -2;
      for (int i = 0; i < g.m; ++i)
        if (in_ball[g.spatial_index(i, j)]) {
          if (lo < 0) lo = i;
          hi = i;
        }
      if (lo < 0) continue;
      int len = hi - lo + 1;
      f.assign(len, 0.0);
      for (int a = 0; a < len; ++a) f[a] = -G[g.node(k, g.spatial_index(lo + a, j))];
      parabola_envelope(f, g.h * g.h / eps, d, arg);
      for (int a = 0; a < len; ++a) {
        std::size_t id = g.node(k, g.spatial_index(lo + a, j));
        std::size_t src = g.node(k, g.spatial_index(lo + arg[a], j));
        e.values.v[id] = e.values.vm[id] = -d[a];
        e.arg_x[id] = g.coord(g.spatial_index(lo + arg[a], j), 0);
        e.arg_t[id] = g.time(argk[src]);
      }
    }
  return e;
}

EpsEnvelope lower_eps_envelope(const Field& u, double eps, double rho) {
  Field neg = u;
  for (std::size_t id = 0; id < neg.size(); ++id) {
    neg.v[id] = -neg.v[id];
    neg.vm[id] = -neg.vm[id];
  }
  EpsEnvelope e = upper_eps_envelope(neg, eps, rho);
  for (std::size_t id = 0; id < e.values.size(); ++id) {
    e.values.v[id] = -e.values.v[id];
    e.values.vm[id] = -e.values.vm[id];
  }
  e.upper = false;
  return e;
}

EpsPropertyReport verify_eps_properties(const EpsEnvelope& env, const Field& u) {
  const GridCylinder& g = *u.grid;
  EpsPropertyReport r;
  const double sgn = env.upper ? 1.0 : -1.0;
  double unorm = 0.0;
  for (std::size_t id = 0; id < u.size(); ++id)
    if (env.domain[id]) unorm = std::max(unorm, std::abs(u.v[id]));
  r.lipschitz_bound = 4.0 * env.rho / env.eps;
  r.displacement_bound = std::sqrt(2.0 * env.eps * unorm);
  auto note = [&](const std::string& what, std::size_t id) {
    if (r.violations.size() < 20) {
      std::ostringstream os;
      os << what << " at node " << id;
      r.violations.push_back(os.str());
    }
  };
  std::vector<std::size_t> ids;
  for (std::size_t id = 0; id < u.size(); ++id) {
    if (!env.domain[id]) continue;
    ids.push_back(id);
    double diff = sgn * (env.values.v[id] - u.v[id]);
    if (diff < -1e-12) {
      r.ordered = false;
      note("order", id);
    }
    std::size_t s = g.spatial(id);
    double dx = g.n == 2 ? env.arg_x[id] - g.coord(s, 0) : 0.0;
    double dt = env.arg_t[id] - g.time(g.level(id));
    double disp = std::sqrt(dx * dx + dt * dt);
    r.max_displacement = std::max(r.max_displacement, disp);
    if (disp > r.displacement_bound * (1.0 + 1e-12) + 1e-12) {
      r.displacement = false;
      note("displacement", id);
    }
  }
  // Lipschitz over all pairs sharing y_n.
  auto yrow = [&](std::size_t id) { return g.row_of(g.spatial(id)); };
  std::vector<std::vector<std::size_t>> rows(g.m);
  for (std::size_t id : ids) rows[yrow(id)].push_back(id);
  for (const auto& row : rows)
    for (std::size_t a = 0; a < row.size(); ++a)
      for (std::size_t b = a + 1; b < row.size(); ++b) {
        std::size_t p = row[a], q = row[b];
        double dy = g.n == 2 ? std::abs(g.coord(g.spatial(p), 0) - g.coord(g.spatial(q), 0)) : 0.0;
        if (g.n == 1 && g.spatial(p) != g.spatial(q)) continue;
        double ds = std::abs(g.time(g.level(p)) - g.time(g.level(q)));
        double L = std::abs(env.values.v[p] - env.values.v[q]) / (dy + ds);
        r.lipschitz_measured = std::max(r.lipschitz_measured, L);
      }
  if (r.lipschitz_measured > r.lipschitz_bound + 1e-9) r.lipschitz = false;
  // Semiconvexity along x' (n = 2).
  if (g.n == 2) {
    for (std::size_t id : ids) {
      std::size_t s = g.spatial(id);
      int i = g.axis_index(s, 0), j = g.axis_index(s, 1);
      if (i == 0 || i + 1 >= g.m) continue;
      std::size_t l = g.node(g.level(id), g.spatial_index(i - 1, j));
      std::size_t rr = g.node(g.level(id), g.spatial_index(i + 1, j));
      if (!env.domain[l] || !env.domain[rr]) continue;
      auto w = [&](std::size_t q) {
        double y = g.coord(g.spatial(q), 0) - g.center[0];
        return sgn * env.values.v[q] + y * y / env.eps;
      };
      double d2 = w(l) - 2.0 * w(id) + w(rr);
      r.worst_second_difference = std::min(r.worst_second_difference, d2);
      if (d2 < -1e-9) {
        r.semiconvex = false;
        note("semiconvexity", id);
      }
    }
  }
  return r;
}

}  // namespace tplab
