#include <cmath>

#include "doctest.h"
#include "tplab/catalog.hpp"
#include "tplab/estimates.hpp"
#include "tplab/experiments.hpp"

using namespace tplab;

TEST_CASE("log-log slope of a power law") {
  std::vector<double> x{1, 0.5, 0.25, 0.125}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
  CHECK(loglog_slope(x, y) == doctest::Approx(1.7));
}

TEST_CASE("harnack geometry in one dimension") {
  HarnackGeometry G = harnack_geometry(1);
  CHECK(G.r == doctest::Approx(0.25));
  CHECK(G.sigma == doctest::Approx(1.0 / 3.0));
  CHECK(G.r0 == doctest::Approx(1.0 / 12.0));
  CHECK(G.xbar[0] == doctest::Approx(2.0 / 3.0 * 0.25));
  CHECK(G.tbar == doctest::Approx(-12.0 / 9.0 / 16.0));
  CHECK(G.K1_in_P);
  CHECK(G.K2_in_P);
  CHECK(G.K3_K1_disjoint);
  HarnackGeometry G2 = harnack_geometry(2);
  CHECK(G2.r == doctest::Approx(1.0 / (4.0 * std::sqrt(2.0))));
  GridPtr g = make_grid(1, 1.0, 0.0625, 1.0 / 64);
  InterfaceGraph far = make_interface(g, "flat", {{"a", 0.1}});
  CHECK_THROWS_AS(harnack_geometry(1, &far), std::domain_error);
}

TEST_CASE("abp on a problem driven downwards by its source") {
  TransmissionProblem p;
  p.grid = make_grid(1, 1.0, 0.0625, auto_dt(1.0, 0.0625));
  p.F_plus = p.F_minus = OperatorSpec::make(OperatorKind::trace_laplace, 1.0, 1.0);
  p.gamma = make_interface(p.grid, "flat", {});
  p.phi = [](const Point&) { return 0.0; };
  p.f_plus = p.f_minus = [](const Point&) { return -1.0; };
  Field u = solve(p).first;
  AbpReport a = abp_verify(p, u);
  CHECK(a.lhs > 0.0);
  CHECK(a.boundary == doctest::Approx(0.0));
  CHECK(a.f_norm == doctest::Approx(std::pow(2.0, 0.5)).epsilon(0.05));
  CHECK(a.f_norm_contact <= a.f_norm);
  CHECK(a.holds(a.empirical_C));
  CHECK_FALSE(a.vacuous);
}

TEST_CASE("oscillation of a linear field on nested cylinders") {
  GridPtr g = make_grid(1, 1.0, 0.0625, 1.0 / 64);
  Field u = Field::from_function(g, [](const Point& p) { return p.x[0]; });
  auto m = cylinder_mask(*g, 0.5);
  CHECK(oscillation(u, m) == doctest::Approx(1.0));
  OscillationReport o = oscillation_decay(u, 0.25);
  CHECK(o.osc_outer == doctest::Approx(2.0));
  CHECK(o.osc_inner == doctest::Approx(0.5));
  CHECK(o.mu_est == doctest::Approx(0.25));
}

TEST_CASE("affine fit of a flat kink recovers the jump") {
  TransmissionProblem p;
  p.grid = make_grid(1, 1.0, 0.03125, auto_dt(1.0, 0.03125));
  p.F_plus = p.F_minus = OperatorSpec::make(OperatorKind::trace_laplace, 1.0, 1.0);
  p.gamma = make_interface(p.grid, "flat", {});
  p.phi = make_expr("kink", {{"p_plus", 2.0}, {"p_minus", 0.5}}, 1);
  p.g = [](double, double) { return 1.5; };
  Field u = solve(p).first;
  AffineFitSequence f = c1alpha_fit(u, p.gamma, 1.5, 0.5, 6);
  CHECK(f.usable >= 2);
  CHECK(f.g_error <= 1e-10);
  for (const auto& L : f.levels) {
    CHECK(L.constraint_residual == 0.0);
    if (L.usable) CHECK(L.residual <= 1e-10);
  }
}
