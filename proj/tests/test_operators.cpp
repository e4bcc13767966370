#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "tplab/grid.hpp"
#include "tplab/operators.hpp"
#include "tplab/rng.hpp"

using namespace tplab;

namespace {
double eigen_pucci(const SymMatrix& M, double lam, double Lam, bool plus) {
  Eigen::Matrix2d A;
  A << M.a11, M.a12, M.a12, M.a22;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    double e = es.eigenvalues()[i];
    s += plus ? (e > 0 ? Lam : lam) * e : (e > 0 ? lam : Lam) * e;
  }
  return s;
}
}  // namespace

TEST_CASE("pucci operators match an eigen-solver reference") {
  CounterRng rng(1, 1);
  for (int i = 0; i < 500; ++i) {
    SymMatrix M = SymMatrix::make2(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    double lam = rng.uniform(0.1, 1.0), Lam = rng.uniform(1.0, 3.0);
    CHECK(pucci_plus(M, lam, Lam) == doctest::Approx(eigen_pucci(M, lam, Lam, true)).epsilon(1e-12));
    CHECK(pucci_minus(M, lam, Lam) == doctest::Approx(eigen_pucci(M, lam, Lam, false)).epsilon(1e-12));
    CHECK(pucci_minus(M, lam, Lam) == doctest::Approx(-pucci_plus(-M, lam, Lam)).epsilon(1e-12));
  }
}

TEST_CASE("pucci on a diagonal matrix") {
  SymMatrix M = SymMatrix::make2(2.0, 0.0, -1.0);
  CHECK(pucci_plus(M, 0.5, 2.0) == doctest::Approx(2.0 * 2.0 - 0.5 * 1.0));
  CHECK(pucci_minus(M, 0.5, 2.0) == doctest::Approx(0.5 * 2.0 - 2.0 * 1.0));
  CHECK(pucci_plus(SymMatrix::diag1(-3.0), 1.0, 4.0) == doctest::Approx(-3.0));
}

TEST_CASE("ellipticity check accepts pucci and rejects a bad rule") {
  auto F = OperatorSpec::make(OperatorKind::pucci_plus, 0.5, 2.0);
  CHECK(check_ellipticity(F, 200).passed);
  auto bad = OperatorSpec::make(OperatorKind::custom, 1.0, 2.0, [](const SymMatrix& M) { return 3.0 * M.trace(); });
  auto rep = check_ellipticity(bad, 200);
  CHECK_FALSE(rep.passed);
  CHECK(rep.witness.has_value());
  CHECK_THROWS_AS(OperatorSpec::make(OperatorKind::pucci_plus, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(OperatorSpec::make(OperatorKind::custom, 1.0, 1.0, [](const SymMatrix&) { return 1.0; }),
                  std::invalid_argument);
}

TEST_CASE("discrete hessian of a quadratic is exact") {
  GridPtr g = make_grid(2, 1.0, 0.125, 1.0 / 64);
  Field u = Field::from_function(g, [](const Point& p) {
    return 1.5 * p.x[0] * p.x[0] - 0.7 * p.x[0] * p.x[1] + 0.25 * p.x[1] * p.x[1];
  });
  std::size_t id = g->node(3, g->spatial_index(8, 8));
  SymMatrix H = discrete_hessian(u, id);
  CHECK(H.a11 == doctest::Approx(3.0));
  CHECK(H.a12 == doctest::Approx(-0.7));
  CHECK(H.a22 == doctest::Approx(0.5));
  CHECK_THROWS_AS(discrete_hessian(u, g->node(3, g->spatial_index(0, 8))), std::out_of_range);
}
