#include <cmath>

#include "doctest.h"
#include "tplab/hopf.hpp"
#include "tplab/rng.hpp"

using namespace tplab;

TEST_CASE("dini integrals with closed forms") {
  DiniCheck p = dini_check(DiniModulus::make("power", 0.2, 0.5), 1.0);
  CHECK(p.integral == doctest::Approx(0.4).epsilon(1e-6));  // kappa / alpha
  CHECK(p.is_dini);
  DiniCheck l = dini_check(DiniModulus::make("log", 0.1), 1.0);
  CHECK(l.integral == doctest::Approx(0.1 * (1.0 - 1.0 / (1.0 - std::log(1e-12)))).epsilon(1e-6));
  CHECK(l.is_dini);
  DiniCheck z = dini_check(DiniModulus::make("zero", 0.0), 1.0);
  CHECK(z.integral == 0.0);
  CHECK(z.is_dini);
  DiniCheck inv = dini_check(DiniModulus::make("inverse_log", 0.1), 0.5);
  CHECK_FALSE(inv.convergent);
  CHECK_FALSE(inv.is_dini);
  CHECK_THROWS_AS(DiniModulus::make("cubic", 1.0), std::invalid_argument);
}

TEST_CASE("recursion with zero modulus is geometric") {
  HopfRecursion h = hopf_recursion(DiniModulus::make("zero", 0.0), 0.1, 0.5, 0.25, 20);
  double q = std::sqrt(0.1);
  for (int k = 0; k <= 20; ++k) CHECK(h.A[k] == doctest::Approx(0.25 * std::pow(q, k)).epsilon(1e-12));
  CHECK(h.partial.back() == doctest::Approx(0.25 * (1 - std::pow(q, 21)) / (1 - q)).epsilon(1e-12));
  CHECK(h.within_bound);
  CHECK(h.recurrence_exact);
}

TEST_CASE("power modulus below c0 leaves the recursion unchanged") {
  HopfRecursion h = hopf_recursion(DiniModulus::make("power", 0.1, 0.5), 0.1, 0.5, 0.25, 30);
  for (int k = 0; k <= 30; ++k)
    CHECK(h.A[k] == doctest::Approx(0.25 * std::pow(0.1, 0.5 * k)).epsilon(1e-12));
}

TEST_CASE("recursion preconditions") {
  auto z = DiniModulus::make("zero", 0.0);
  CHECK_THROWS_AS(hopf_recursion(z, 0.5, 0.5, 0.25, 10), std::invalid_argument);
  CHECK_THROWS_AS(hopf_recursion(DiniModulus::make("power", 1.0, 1.0), 0.1, 0.5, 0.25, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(hopf_recursion(DiniModulus::make("log", 0.3), 0.1, 0.5, 0.25, 10), std::invalid_argument);
  CHECK_THROWS_AS(hopf_recursion(z, 1.5, 0.5, 0.25, 10), std::invalid_argument);
}

TEST_CASE("sums are monotone in c0 and in the modulus") {
  CounterRng rng(8, 0);
  for (int i = 0; i < 50; ++i) {
    double rho = rng.uniform(0.01, 0.2), a0 = rng.uniform(0.3, 0.9);
    if ((1 - std::pow(rho, a0)) * (1 - rho) < 0.5) continue;
    double c0 = rng.uniform(0.05, 0.2);
    double k1 = rng.uniform(0.0, 0.5) * c0, k2 = k1 + rng.uniform(0.0, 0.5) * c0;
    auto s = [&](double kap, double c) {
      return hopf_recursion(DiniModulus::make("log", kap), rho, a0, c, 64).partial.back();
    };
    CHECK(s(k1, c0) <= s(k2, c0));
    CHECK(s(k1, c0) <= s(k1, 1.2 * c0));
  }
}

TEST_CASE("hopf ratios of a linear profile and scale invariance") {
  GridPtr g = make_grid(2, 1.0, 0.0625, 1.0 / 64);
  Field u = Field::from_function(g, [](const Point& p) { return std::max(p.x[1], 0.0); });
  std::vector<std::array<double, 2>> dirs{{0.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)}};
  HopfReport r = hopf_verify(u, dirs, {0.5, 0.25, 0.125});
  for (const auto& p : r.probes) CHECK(p.ratio == doctest::Approx(2.0));
  CHECK(r.passed);
  Field v = u;
  for (auto& x : v.v) x *= 7.5;
  HopfReport s = hopf_verify(v, dirs, {0.5, 0.25, 0.125});
  for (std::size_t i = 0; i < r.probes.size(); ++i) CHECK(s.probes[i].ratio == doctest::Approx(r.probes[i].ratio));
  for (auto& x : v.v) x = -x;
  CHECK_THROWS_AS(hopf_verify(v, dirs, {0.5}), std::invalid_argument);
}
