#include "tplab/catalog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tplab/rng.hpp"

namespace tplab {

namespace {

double param(const Params& p, const char* key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"const", "expr", "constant {value}"},
      {"kink", "expr", "p_plus (x_n-a)^+ - p_minus (x_n-a)^- {p_plus=1.5, p_minus=-0.5, a=0}; jump p_plus - p_minus"},
      {"abs-kink", "expr", "(g0/2)|x_n - a| {g0=1, a=0}"},
      {"heat-sep", "expr", "exp(-pi^2 n t/4) prod_i cos(pi x_i/2); caloric, zero on |x_i| = 1"},
      {"paraboloid", "expr", "|x|^2 + 2 n t; caloric"},
      {"random-smooth", "expr", "seeded sum of 4 cosine modes {amp=1, offset=0, kmax=2}"},
      {"positive-part", "expr", "max(x_n - a, 0) {a=0}"},
      {"flat", "psi", "psi = a {a=0}"},
      {"tilt", "psi", "psi = slope * x1 (n=2) or slope * t (n=1) {slope=0}"},
      {"bump", "psi", "psi = A (|x'|^2 + |t|)^((1+alpha)/2) {A=0.05, alpha=0.5}"},
      {"wave", "psi", "psi = A sin(k x1) (n=2) or A sin(k t) (n=1) {A=0.05, k=3}"},
      {"dini", "psi", "psi = kappa |x'|^(1+beta) (n=2) or kappa |t|^((1+beta)/2) (n=1) {kappa=0.25, beta=0.5}"},
  };
  return entries;
}

SpaceTimeFn random_smooth(int n, std::uint64_t seed, std::uint64_t stream, double amp, int modes,
                          double offset, double kmax) {
  CounterRng rng(seed, stream);
  struct Mode { double c, k1, k2, w, th; };
  std::vector<Mode> ms(modes);
  double total = 0.0;
  for (int j = 0; j < modes; ++j) {
    ms[j].c = rng.uniform(-1.0, 1.0) / (1.0 + j);
    ms[j].k1 = rng.uniform(-kmax, kmax);
    ms[j].k2 = rng.uniform(-kmax, kmax);
    ms[j].w = rng.uniform(-1.0, 1.0);
    ms[j].th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    total += std::abs(ms[j].c);
  }
  for (auto& m : ms) m.c *= total > 0.0 ? amp / total : 0.0;
  return [ms, n, offset](const Point& p) {
    double s = offset;
    for (const auto& m : ms) {
      double arg = m.k1 * p.x[0] + (n == 2 ? m.k2 * p.x[1] : 0.0) + m.w * p.t + m.th;
      s += m.c * std::cos(arg);
    }
    return s;
  };
}

SpaceTimeFn make_expr(const std::string& id, const Params& p, int n, std::uint64_t seed) {
  if (id == "const") {
    double v = param(p, "value", 0.0);
    return [v](const Point&) { return v; };
  }
  if (id == "kink") {
    double pp = param(p, "p_plus", 1.5), pm = param(p, "p_minus", -0.5), a = param(p, "a", 0.0);
    return [pp, pm, a, n](const Point& q) {
      double z = q.x[n - 1] - a;
      return z >= 0.0 ? pp * z : pm * z;
    };
  }
  if (id == "abs-kink") {
    double g0 = param(p, "g0", 1.0), a = param(p, "a", 0.0);
    return [g0, a, n](const Point& q) { return 0.5 * g0 * std::abs(q.x[n - 1] - a); };
  }
  if (id == "heat-sep") {
    const double pi = std::numbers::pi;
    return [pi, n](const Point& q) {
      double s = std::exp(-pi * pi * n * q.t / 4.0);
      for (int i = 0; i < n; ++i) s *= std::cos(pi * q.x[i] / 2.0);
      return s;
    };
  }
  if (id == "paraboloid") {
    return [n](const Point& q) {
      double s = 2.0 * n * q.t;
      for (int i = 0; i < n; ++i) s += q.x[i] * q.x[i];
      return s;
    };
  }
  if (id == "random-smooth") {
    return random_smooth(n, seed, static_cast<std::uint64_t>(param(p, "stream", 0.0)), param(p, "amp", 1.0),
                         4, param(p, "offset", 0.0), param(p, "kmax", 2.0));
  }
  if (id == "positive-part") {
    double a = param(p, "a", 0.0);
    return [a, n](const Point& q) { return std::max(q.x[n - 1] - a, 0.0); };
  }
  throw std::invalid_argument("unknown expression id '" + id + "'");
}

}  // namespace tplab
