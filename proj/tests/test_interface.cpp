#include <cmath>

#include "doctest.h"
#include "tplab/interface.hpp"

using namespace tplab;

TEST_CASE("interface families and their errors") {
  GridPtr g = make_grid(2, 1.0, 0.125, 1.0 / 64);
  InterfaceGraph flat = make_interface(g, "flat", {{"a", 0.2}});
  CHECK(flat.psi_at(3, 4) == doctest::Approx(0.2));
  CHECK(flat.sup_abs == doctest::Approx(0.2));
  InterfaceGraph tilt = make_interface(g, "tilt", {{"slope", 0.25}});
  CHECK(tilt.psi_fn(0.5, -0.3) == doctest::Approx(0.125));
  CHECK(tilt.dpsi_fn(0.5, -0.3) == doctest::Approx(0.25));
  InterfaceGraph bump = make_interface(g, "bump", {{"A", 0.05}, {"alpha", 0.5}});
  CHECK(bump.psi_fn(0.0, 0.0) == doctest::Approx(0.0));
  CHECK(bump.psi_fn(0.5, 0.0) == doctest::Approx(0.05 * std::pow(0.25, 0.75)));
  CHECK_THROWS_AS(make_interface(g, "spiral", {}), std::invalid_argument);
  CHECK_THROWS_AS(make_interface(g, "flat", {{"a", 1.5}}), std::domain_error);
}

TEST_CASE("normal vector is the normalized graph normal") {
  auto nu = normal_from_gradient(2, 0.75);
  CHECK(nu[0] == doctest::Approx(-0.6));
  CHECK(nu[1] == doctest::Approx(0.8));
  auto e = normal_from_gradient(1, 0.0);
  CHECK(e[0] == doctest::Approx(1.0));
}

TEST_CASE("classification tags the band and the boundary") {
  GridPtr g = make_grid(1, 1.0, 0.125, 1.0 / 64);
  InterfaceGraph gam = make_interface(g, "flat", {{"a", 0.05}});
  NodeClassification c = classify_nodes(*g, gam);
  std::size_t id = g->node(5, 8);  // x = 0
  CHECK(c.tag[id] == NodeTag::band_minus);
  CHECK(c.sdist[id] == doctest::Approx(-0.05));
  CHECK(c.tag[g->node(5, 9)] == NodeTag::band_plus);
  CHECK(c.tag[g->node(5, 12)] == NodeTag::plus_interior);
  CHECK(c.tag[g->node(5, 2)] == NodeTag::minus_interior);
  CHECK(c.tag[g->node(0, 9)] == NodeTag::boundary);
  CHECK(c.tag[g->node(5, 0)] == NodeTag::boundary);
}

TEST_CASE("trace recovers the interface value of a kink") {
  // u = 3 (x - a)^+ - 1 (x - a)^- + 0.4 has jump 2 and trace 0.4.
  for (int order : {1, 2}) {
    GridPtr g = make_grid(1, 1.0, 0.125, 1.0 / 64);
    const double a = 0.03;
    InterfaceGraph gam = make_interface(g, "flat", {{"a", a}});
    ColumnGeometry geo = column_geometry(*g, 0, a, 0.0, false, order);
    REQUIRE(geo.active);
    CHECK(geo.np == order);
    CHECK(geo.pdist[0] >= 0.5 * g->h);
    std::vector<double> level(g->ns);
    for (std::size_t s = 0; s < g->ns; ++s) {
      double d = g->xn(static_cast<int>(s)) - a;
      level[s] = 0.4 + (d > 0 ? 3.0 * d : 1.0 * d);
    }
    TraceStencil st = trace_stencil(geo);
    CHECK(st.coef < 0.0);
    CHECK(solve_trace(*g, 0, st, level.data(), 2.0) == doctest::Approx(0.4).epsilon(1e-12));
  }
}

TEST_CASE("second-order trace coefficient on a centered interface") {
  GridPtr g = make_grid(1, 1.0, 0.125, 1.0 / 64);
  // Interface halfway between nodes: distances h/2 and 3h/2 on both sides.
  ColumnGeometry geo = column_geometry(*g, 0, 0.0625, 0.0, false, 2);
  TraceStencil st = trace_stencil(geo);
  double h = g->h;
  double side = -(0.5 * h + 1.5 * h) / (0.5 * h * 1.5 * h);
  CHECK(st.coef == doctest::Approx(2.0 * side));
}
