#include <cmath>

#include "doctest.h"
#include "tplab/catalog.hpp"
#include "tplab/experiments.hpp"
#include "tplab/solver.hpp"

using namespace tplab;

namespace {
TransmissionProblem base(int n, double h, double dt) {
  TransmissionProblem p;
  p.grid = make_grid(n, 1.0, h, dt);
  p.F_plus = p.F_minus = OperatorSpec::make(OperatorKind::trace_laplace, 1.0, 1.0);
  p.gamma = make_interface(p.grid, "flat", {{"a", 0.0}});
  p.phi = [](const Point&) { return 0.0; };
  return p;
}

double max_error(const Field& u, const SpaceTimeFn& ex) {
  double e = 0.0;
  for (std::size_t id = 0; id < u.size(); ++id)
    if (u.grid->in(id)) e = std::max(e, std::abs(u.v[id] - ex(u.grid->point(id))));
  return e;
}

SpaceTimeFn kink(double pp, double pm, double slope, int n) {
  double nrm = std::sqrt(1.0 + slope * slope);
  return [=](const Point& q) {
    double d = (q.x[n - 1] - (n == 2 ? slope * q.x[0] : 0.0)) / nrm;
    return d > 0 ? pp * d : pm * d;
  };
}
}  // namespace

TEST_CASE("kink is a discrete fixed point under nonlinear operators") {
  for (int n : {1, 2}) {
    TransmissionProblem p = base(n, 0.0625, 1.0 / 64);
    p.F_plus = OperatorSpec::make(OperatorKind::pucci_plus, 0.5, 2.0);
    p.F_minus = OperatorSpec::make(OperatorKind::pucci_minus, 0.5, 2.0);
    p.phi = kink(1.5, -0.5, 0.0, n);
    p.g = [](double, double) { return 2.0; };
    auto [u, rep] = solve(p);
    CHECK(max_error(u, p.phi) <= 1e-10);
    CHECK(rep.cfl_ratio <= 1.0);
  }
}

TEST_CASE("tilted kink with the normal jump") {
  TransmissionProblem p = base(2, 0.0625, 1.0 / 64);
  p.gamma = make_interface(p.grid, "tilt", {{"slope", 0.25}});
  p.phi = kink(2.0, 0.5, 0.25, 2);
  p.g = [](double, double) { return 1.5; };
  auto [u, rep] = solve(p);
  CHECK(max_error(u, p.phi) <= 1e-10);
}

TEST_CASE("paraboloid is reproduced without an interface") {
  for (int n : {1, 2}) {
    TransmissionProblem p = base(n, 0.125, 1.0 / 64);
    p.mode = InterfaceMode::none;
    p.phi = make_expr("paraboloid", {}, n);
    Field u = solve(p).first;
    CHECK(max_error(u, p.phi) <= 1e-10);
  }
}

TEST_CASE("separable heat solution converges at second order") {
  double prev = 0.0;
  for (double h : {0.125, 0.0625, 0.03125}) {
    TransmissionProblem p = base(1, h, auto_dt(1.0, h));
    p.mode = InterfaceMode::none;
    p.phi = make_expr("heat-sep", {}, 1);
    double e = max_error(solve(p).first, p.phi);
    if (prev > 0.0) CHECK(prev / e > 3.0);
    prev = e;
  }
}

TEST_CASE("cfl step divides the span") {
  GridPtr g = make_grid(2, 1.0, 0.0625, 1.0 / 64);
  CflStep c = cfl_dt(*g, 2.0, 0.4, g->dt);
  CHECK(c.dt <= c.raw);
  CHECK(c.raw == doctest::Approx(0.4 * g->h * g->h / (2 * 2 * 2.0 + 4 * 2.0)));
  CHECK(c.dt * c.steps == doctest::Approx(g->dt).epsilon(1e-14));
}

TEST_CASE("n=1 update weights are nonnegative") {
  TransmissionProblem p = base(1, 0.0625, 1.0 / 64);
  p.F_plus = OperatorSpec::make(OperatorKind::pucci_plus, 0.5, 2.0);
  p.F_minus = OperatorSpec::make(OperatorKind::pucci_minus, 0.25, 1.5);
  p.gamma = make_interface(p.grid, "flat", {{"a", 0.11}});
  double w = 0.0;
  CHECK(monotone_weights_n1(p, 3, &w));
  CHECK(w >= -1e-14);
}

TEST_CASE("maximum principle and barrier sandwich on a flat problem") {
  TransmissionProblem p = base(1, 0.03125, auto_dt(1.0, 0.03125));
  p.F_plus = OperatorSpec::make(OperatorKind::pucci_plus, 0.5, 2.0);
  p.gamma = make_interface(p.grid, "flat", {{"a", 0.1}});
  p.phi = random_smooth(1, 4, 0, 0.5, 4, 0.5);
  p.g = [](double, double) { return -0.7; };
  auto [u, rep] = solve(p);
  double mn = INFINITY;
  for (std::size_t id = 0; id < u.size(); ++id) mn = std::min(mn, u.v[id]);
  CHECK(mn >= -5.0 * p.grid->h);
  auto [lo, up] = perron_barriers(p);
  for (std::size_t id = 0; id < u.size(); ++id) {
    CHECK(u.v[id] >= lo.v[id] - 5.0 * p.grid->h);
    CHECK(u.v[id] <= up.v[id] + 5.0 * p.grid->h);
  }
}

TEST_CASE("barriers with zero data bracket the jump") {
  TransmissionProblem p = base(1, 0.0625, 1.0 / 64);
  p.g = [](double, double) { return 1.0; };
  auto [lo, up] = perron_barriers(p);
  const GridCylinder& g = *p.grid;
  for (std::size_t id = 0; id < lo.size(); ++id) {
    CHECK(lo.v[id] <= 1e-12);
    CHECK(up.v[id] >= -1e-12);
    double x = std::abs(g.point(id).x[0]);
    if (g.level(id) == g.nt - 1 && x <= 0.25) CHECK(up.v[id] - lo.v[id] >= x - 1e-12);
  }
}

TEST_CASE("decomposition is exact for the pure kink") {
  TransmissionProblem p = base(1, 0.0625, 1.0 / 64);
  p.phi = make_expr("abs-kink", {{"g0", 1.0}, {"a", 0.25}}, 1);
  DecompositionResult d = flat_decomposition_solve(p, 0.25, 1.0);
  CHECK(d.error <= 1e-12);
  CHECK(d.w.sup_norm() <= 1e-12);
  p.phi = random_smooth(1, 2, 0, 1.0);
  DecompositionResult z = flat_decomposition_solve(p, 0.0, 0.0);
  CHECK(z.v_decomposed.v == z.w.v);
  CHECK(z.error <= 5.0 * p.grid->h);
}

TEST_CASE("ill-posed problems are rejected") {
  TransmissionProblem p = base(1, 0.0625, 1.0 / 64);
  p.gamma = make_interface(make_grid(1, 1.0, 0.125, 1.0 / 64), "flat", {});
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
  TransmissionProblem q = base(1, 0.0625, 1.0 / 64);
  q.phi = nullptr;
  CHECK_THROWS_AS(solve(q), std::invalid_argument);
  TransmissionProblem r = base(1, 0.0625, 1.0 / 64);
  r.phi = [](const Point& x) { return x.x[0] > 0.9 ? NAN : 0.0; };
  CHECK_THROWS_AS(solve(r), std::runtime_error);
}

TEST_CASE("repeated solves are bitwise identical") {
  TransmissionProblem p = base(2, 0.125, 1.0 / 64);
  p.F_plus = OperatorSpec::make(OperatorKind::pucci_minus, 0.5, 2.0);
  p.gamma = make_interface(p.grid, "wave", {{"A", 0.05}, {"k", 3.0}});
  p.phi = random_smooth(2, 9, 0, 1.0);
  p.g = [](double x, double) { return 0.5 + x; };
  Field a = solve(p).first, b = solve(p).first;
  CHECK(a.v == b.v);
}
