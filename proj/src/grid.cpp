#include "tplab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tplab {

namespace {

bool is_integer_ratio(double num, double den, long& out) {
  double q = num / den;
  double rq = std::round(q);
  if (rq < 1.0 || std::abs(q - rq) > 1e-9 * std::max(1.0, rq)) return false;
  out = static_cast<long>(rq);
  return true;
}

}  // namespace

double parabolic_distance(const Point& p, const Point& q, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += (p.x[a] - q.x[a]) * (p.x[a] - q.x[a]);
  return std::sqrt(s + std::abs(p.t - q.t));
}

Point GridCylinder::point(std::size_t id) const {
  Point p;
  std::size_t s = spatial(id);
  for (int a = 0; a < n; ++a) p.x[a] = coord(s, a);
  p.t = time(level(id));
  return p;
}

GridPtr make_grid(int n, double r, double h, double dt, std::array<double, 2> center, double t0) {
  if (n != 1 && n != 2) throw std::invalid_argument("grid: n must be 1 or 2");
  if (!(r > 0.0)) throw std::invalid_argument("grid: radius must be positive");
  if (!(h > 0.0) || !(dt > 0.0)) throw std::invalid_argument("grid: h and dt must be positive");
  long cells = 0, steps = 0;
  if (!is_integer_ratio(2.0 * r, h, cells)) throw std::invalid_argument("grid: h must divide 2r");
  if (!is_integer_ratio(r * r, dt, steps)) throw std::invalid_argument("grid: dt must divide r^2");

  auto g = std::make_shared<GridCylinder>();
  g->n = n;
  g->center = center;
  g->t0 = t0;
  g->r = r;
  g->h = 2.0 * r / static_cast<double>(cells);
  g->dt = r * r / static_cast<double>(steps);
  g->m = static_cast<int>(cells) + 1;
  g->nt = static_cast<int>(steps) + 1;
  g->ns = n == 1 ? static_cast<std::size_t>(g->m) : static_cast<std::size_t>(g->m) * g->m;
  g->inside.assign(g->ns, 1);
  g->lateral.assign(g->ns, 0);

  if (n == 1) {
    g->lateral[0] = 1;
    g->lateral[g->m - 1] = 1;
  } else {
    const int m = g->m;
    const double tol = 1e-12 * r * r;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        double x1 = -r + g->h * i, x2 = -r + g->h * j;
        g->inside[i + m * j] = (x1 * x1 + x2 * x2 <= r * r + tol) ? 1 : 0;
      }
    auto in = [&](int i, int j) {
      return i >= 0 && j >= 0 && i < m && j < m && g->inside[i + m * j];
    };
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        if (!g->inside[i + m * j]) continue;
        if (!in(i - 1, j) || !in(i + 1, j) || !in(i, j - 1) || !in(i, j + 1))
          g->lateral[i + m * j] = 1;
      }
  }
  return g;
}

std::vector<std::size_t> parabolic_boundary(const GridCylinder& g) {
  std::vector<std::size_t> out;
  for (int k = 0; k < g.nt; ++k)
    for (std::size_t s = 0; s < g.ns; ++s) {
      if (!g.inside[s]) continue;
      if (k == 0 || g.lateral[s]) out.push_back(g.node(k, s));
    }
  return out;
}

std::vector<std::uint8_t> boundary_mask(const GridCylinder& g) {
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (std::size_t id : parabolic_boundary(g)) mask[id] = 1;
  return mask;
}

Field::Field(GridPtr g, double fill)
    : grid(std::move(g)), v(grid->size(), fill), vm(grid->size(), fill), dual(grid->size(), 0) {}

void Field::set_dual(std::size_t id, double plus, double minus_value) {
  v[id] = plus;
  vm[id] = minus_value;
  dual[id] = 1;
}

Field Field::from_function(GridPtr g, const std::function<double(const Point&)>& fn) {
  Field f(g);
  for (std::size_t id = 0; id < f.size(); ++id)
    if (g->in(id)) f.v[id] = f.vm[id] = fn(g->point(id));
  return f;
}

double Field::sample(const Point& p) const {
  const GridCylinder& g = *grid;
  double ft = (p.t - g.time(0)) / g.dt;
  int k0 = std::clamp(static_cast<int>(std::floor(ft)), 0, g.nt - 1);
  int k1 = std::min(k0 + 1, g.nt - 1);
  double wt = std::clamp(ft - k0, 0.0, 1.0);

  int i0[2] = {0, 0}, i1[2] = {0, 0};
  double w[2] = {0.0, 0.0};
  for (int a = 0; a < g.n; ++a) {
    double fx = (p.x[a] - (g.center[a] - g.r)) / g.h;
    i0[a] = std::clamp(static_cast<int>(std::floor(fx)), 0, g.m - 1);
    i1[a] = std::min(i0[a] + 1, g.m - 1);
    w[a] = std::clamp(fx - i0[a], 0.0, 1.0);
  }
  double acc = 0.0, wsum = 0.0;
  for (int ck = 0; ck < 2; ++ck) {
    int k = ck ? k1 : k0;
    double wk = ck ? wt : 1.0 - wt;
    if (wk == 0.0) continue;
    int ncorner = g.n == 1 ? 2 : 4;
    for (int c = 0; c < ncorner; ++c) {
      int ii = (c & 1) ? i1[0] : i0[0];
      double wi = (c & 1) ? w[0] : 1.0 - w[0];
      int jj = 0;
      double wj = 1.0;
      if (g.n == 2) {
        jj = (c & 2) ? i1[1] : i0[1];
        wj = (c & 2) ? w[1] : 1.0 - w[1];
      }
      double ww = wk * wi * wj;
      if (ww == 0.0) continue;
      std::size_t s = g.spatial_index(ii, jj);
      if (!g.inside[s]) continue;
      acc += ww * v[g.node(k, s)];
      wsum += ww;
    }
  }
  if (wsum == 0.0) throw std::out_of_range("Field::sample: point outside the grid");
  return acc / wsum;
}

void Field::validate() const {
  for (std::size_t id = 0; id < v.size(); ++id) {
    if (!grid->in(id)) continue;
    if (!std::isfinite(v[id]) || (dual[id] && !std::isfinite(vm[id])))
      throw std::runtime_error("non-finite field value at node " + std::to_string(id));
  }
}

double Field::sup_norm() const {
  double s = 0.0;
  for (std::size_t id = 0; id < v.size(); ++id) {
    if (!grid->in(id)) continue;
    s = std::max(s, std::abs(v[id]));
    if (dual[id]) s = std::max(s, std::abs(vm[id]));
  }
  return s;
}

void Field::write_csv(std::ostream& os) const {
  const GridCylinder& g = *grid;
  os << (g.n == 1 ? "x1,t,side,value\n" : "x1,x2,t,side,value\n");
  auto saved = os.precision(17);
  for (std::size_t id = 0; id < v.size(); ++id) {
    if (!g.in(id)) continue;
    Point p = g.point(id);
    auto row = [&](const char* side, double value) {
      os << p.x[0] << ',';
      if (g.n == 2) os << p.x[1] << ',';
      os << p.t << ',' << side << ',' << value << '\n';
    };
    if (dual[id]) {
      row("+", v[id]);
      row("-", vm[id]);
    } else {
      row("0", v[id]);
    }
  }
  os.precision(saved);
}

namespace {

constexpr std::size_t kExactLimit = 20000;

std::vector<std::size_t> collect(const Field& u, const std::vector<std::uint8_t>* include) {
  std::vector<std::size_t> ids;
  for (std::size_t id = 0; id < u.size(); ++id)
    if (u.grid->in(id) && (!include || (*include)[id])) ids.push_back(id);
  return ids;
}

double pw(double d, double a) { return a == 1.0 ? d : (a == 0.5 ? std::sqrt(d) : std::pow(d, a)); }

struct PairScan {
  std::vector<std::size_t> ids;
  bool exact = true;
};

PairScan subsample(std::vector<std::size_t> ids) {
  PairScan ps;
  if (ids.size() <= kExactLimit) {
    ps.ids = std::move(ids);
    return ps;
  }
  std::size_t stride = (ids.size() + kExactLimit - 1) / kExactLimit;
  for (std::size_t i = 0; i < ids.size(); i += stride) ps.ids.push_back(ids[i]);
  ps.exact = false;
  return ps;
}

// sup over pairs of |F(p)-F(q)| / d_p^alpha for a vector-valued node function.
template <class Diff>
double space_time_seminorm(const GridCylinder& g, const std::vector<std::size_t>& ids, double alpha,
                           Diff diff, std::size_t& pairs) {
  double best = 0.0;
  std::vector<Point> pts(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) pts[i] = g.point(ids[i]);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      double d = parabolic_distance(pts[i], pts[j], g.n);
      if (d == 0.0) continue;
      double du = diff(ids[i], ids[j]);
      if (du == 0.0) continue;
      best = std::max(best, du / pw(d, alpha));
      ++pairs;
    }
  return best;
}

double time_seminorm(const Field& u, const std::vector<std::size_t>& ids, double expo,
                     std::size_t& pairs) {
  const GridCylinder& g = *u.grid;
  std::vector<std::vector<int>> levels(g.ns);
  for (std::size_t id : ids) levels[g.spatial(id)].push_back(g.level(id));
  double best = 0.0;
  for (std::size_t s = 0; s < g.ns; ++s) {
    const auto& ks = levels[s];
    for (std::size_t a = 0; a < ks.size(); ++a)
      for (std::size_t b = a + 1; b < ks.size(); ++b) {
        double dtt = std::abs(g.time(ks[a]) - g.time(ks[b]));
        double du = std::abs(u.v[g.node(ks[a], s)] - u.v[g.node(ks[b], s)]);
        best = std::max(best, du / pw(dtt, expo));
        ++pairs;
      }
  }
  return best;
}

}  // namespace

NormReport holder_norm(const Field& u, double alpha, const std::vector<std::uint8_t>* include) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("holder_norm: alpha must be in (0,1]");
  auto all = collect(u, include);
  if (all.empty()) throw std::invalid_argument("holder_norm: empty field");
  NormReport rep;
  rep.alpha = alpha;
  for (std::size_t id : all) rep.sup_norm = std::max(rep.sup_norm, std::abs(u.v[id]));
  PairScan ps = subsample(all);
  rep.exact = ps.exact;
  rep.space_seminorm = space_time_seminorm(
      *u.grid, ps.ids, alpha, [&](std::size_t a, std::size_t b) { return std::abs(u.v[a] - u.v[b]); },
      rep.pairs);
  rep.time_seminorm = time_seminorm(u, ps.ids, alpha / 2.0, rep.pairs);
  return rep;
}

std::vector<Field> central_gradient(const Field& u, std::vector<std::uint8_t>& out_mask,
                                    const std::vector<std::uint8_t>* include) {
  const GridCylinder& g = *u.grid;
  std::vector<Field> grad(g.n, Field(u.grid));
  out_mask.assign(g.size(), 0);
  auto ok = [&](std::size_t id) { return g.in(id) && (!include || (*include)[id]); };
  for (std::size_t id = 0; id < g.size(); ++id) {
    if (!ok(id)) continue;
    int k = g.level(id);
    std::size_t s = g.spatial(id);
    bool full = true;
    double comp[2] = {0.0, 0.0};
    for (int a = 0; a < g.n && full; ++a) {
      int i = g.axis_index(s, 0), j = g.n == 2 ? g.axis_index(s, 1) : 0;
      int ia = a == 0 ? i - 1 : i, ib = a == 0 ? i + 1 : i;
      int ja = a == 1 ? j - 1 : j, jb = a == 1 ? j + 1 : j;
      if (ia < 0 || ja < 0 || ib >= g.m || jb >= g.m) { full = false; break; }
      std::size_t lo = g.node(k, g.spatial_index(ia, ja)), hi = g.node(k, g.spatial_index(ib, jb));
      if (!ok(lo) || !ok(hi)) { full = false; break; }
      comp[a] = (u.v[hi] - u.v[lo]) / (2.0 * g.h);
    }
    if (!full) continue;
    out_mask[id] = 1;
    for (int a = 0; a < g.n; ++a) grad[a].v[id] = grad[a].vm[id] = comp[a];
  }
  return grad;
}

NormReport c1alpha_norm(const Field& u, const std::vector<Field>* grad, double alpha,
                        const std::vector<std::uint8_t>* include) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("c1alpha_norm: alpha must be in (0,1]");
  const GridCylinder& g = *u.grid;
  std::vector<Field> own;
  std::vector<std::uint8_t> gmask;
  if (!grad) {
    own = central_gradient(u, gmask, include);
    grad = &own;
  } else {
    gmask.assign(g.size(), 0);
    for (std::size_t id = 0; id < g.size(); ++id)
      gmask[id] = (g.in(id) && (!include || (*include)[id])) ? 1 : 0;
  }
  auto all = collect(u, include);
  if (all.empty()) throw std::invalid_argument("c1alpha_norm: empty field");
  NormReport rep;
  rep.alpha = alpha;
  for (std::size_t id : all) rep.sup_norm = std::max(rep.sup_norm, std::abs(u.v[id]));

  auto gids = collect(u, &gmask);
  for (std::size_t id : gids) {
    double s = 0.0;
    for (int a = 0; a < g.n; ++a) s += (*grad)[a].v[id] * (*grad)[a].v[id];
    rep.grad_sup = std::max(rep.grad_sup, std::sqrt(s));
  }
  PairScan gps = subsample(gids);
  rep.exact = gps.exact;
  rep.grad_seminorm = space_time_seminorm(
      g, gps.ids, alpha,
      [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (int c = 0; c < g.n; ++c) {
          double d = (*grad)[c].v[a] - (*grad)[c].v[b];
          s += d * d;
        }
        return std::sqrt(s);
      },
      rep.pairs);
  PairScan ps = subsample(all);
  rep.exact = rep.exact && ps.exact;
  rep.time_c1_seminorm = time_seminorm(u, ps.ids, (1.0 + alpha) / 2.0, rep.pairs);
  return rep;
}

}  // namespace tplab
