#include <cmath>

#include "doctest.h"
#include "tplab/catalog.hpp"
#include "tplab/envelopes.hpp"
#include "tplab/rng.hpp"

using namespace tplab;

namespace {
// Hull value at x_k as the minimum over chords through pairs bracketing x_k.
double chord_min(const std::vector<double>& x, const std::vector<double>& y, std::size_t k) {
  double best = y[k];
  for (std::size_t i = 0; i <= k; ++i)
    for (std::size_t j = k; j < x.size(); ++j) {
      if (i == j) continue;
      double t = (x[k] - x[i]) / (x[j] - x[i]);
      best = std::min(best, (1 - t) * y[i] + t * y[j]);
    }
  return best;
}
}  // namespace

TEST_CASE("lower hull matches the chord characterization") {
  CounterRng rng(5, 0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x, y;
    double xv = 0.0;
    for (int i = 0; i < 15; ++i) {
      xv += rng.uniform(0.1, 1.0);
      x.push_back(xv);
      y.push_back(rng.uniform(-1, 1));
    }
    auto hull = lower_hull_1d(x, y);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(hull[k] == doctest::Approx(chord_min(x, y, k)).epsilon(1e-12));
  }
}

TEST_CASE("parabolic envelope of convex nonincreasing data is the data") {
  GridPtr g = make_grid(2, 1.0, 0.125, 1.0 / 16);
  Field u = Field::from_function(g, [](const Point& p) { return p.x[0] * p.x[0] + 0.5 * p.x[1] * p.x[1] - p.t; });
  EnvelopeResult e = parabolic_convex_envelope(u);
  for (std::size_t id = 0; id < u.size(); ++id)
    if (g->in(id)) CHECK(e.envelope.v[id] == doctest::Approx(u.v[id]).epsilon(1e-8));
}

TEST_CASE("n=1 envelope of a double well and its contact set") {
  GridPtr g = make_grid(1, 1.0, 0.0625, 0.25);
  Field u = Field::from_function(g, [](const Point& p) { return (p.x[0] * p.x[0] - 0.25) * (p.x[0] * p.x[0] - 0.25); });
  EnvelopeResult e = parabolic_convex_envelope(u);
  for (int k = 0; k < g->nt; ++k) {
    CHECK(e.envelope.v[g->node(k, 16)] == doctest::Approx(0.0).epsilon(1e-12));  // x = 0 on the flat part
    CHECK(e.contact[g->node(k, 24)] == 1);                                         // x = 0.5 touches
    CHECK(e.contact[g->node(k, 16)] == 0);
  }
}

TEST_CASE("extension by zero clamps the envelope at zero") {
  GridPtr g = make_grid(1, 1.0, 0.0625, 0.25);
  Field u = Field::from_function(g, [](const Point& p) { return 1.0 - p.x[0] * p.x[0]; });
  EnvelopeResult e = parabolic_convex_envelope(u, true);
  for (std::size_t id = 0; id < u.size(); ++id) {
    CHECK(e.envelope.v[id] <= 1e-12);
    CHECK(e.envelope.v[id] >= -1e-12);
  }
}

TEST_CASE("krylov-tso integrand of a time-linear paraboloid") {
  // C = |x|^2 - t: -dt C = 1, det D2 C = 4 on the contact set.
  GridPtr g = make_grid(2, 1.0, 0.125, 1.0 / 16);
  Field u = Field::from_function(g, [](const Point& p) { return p.x[0] * p.x[0] + p.x[1] * p.x[1] - p.t; });
  EnvelopeResult e = parabolic_convex_envelope(u);
  KrylovTsoResult k = krylov_tso_integrand(e.envelope, e.contact);
  CHECK(k.used > 0);
  for (std::size_t id = 0; id < u.size(); ++id)
    if (k.integrand.v[id] != 0.0) CHECK(k.integrand.v[id] == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("eps-envelopes on random fields") {
  GridPtr g = make_grid(2, 1.0, 0.125, 1.0 / 16);
  for (std::uint64_t s = 0; s < 5; ++s) {
    Field u = Field::from_function(g, random_smooth(2, s, 0, 1.0, 4, 0.0, 4.0));
    for (double eps : {0.05, 0.2}) {
      EpsEnvelope up = upper_eps_envelope(u, eps, 0.5);
      EpsPropertyReport r = verify_eps_properties(up, u);
      CHECK(r.passed());
      EpsEnvelope lo = lower_eps_envelope(u, eps, 0.5);
      CHECK(verify_eps_properties(lo, u).passed());
    }
  }
  Field u = Field::from_function(g, [](const Point&) { return 0.0; });
  CHECK_THROWS_AS(upper_eps_envelope(u, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(upper_eps_envelope(u, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("upper eps-envelope against direct maximization") {
  GridPtr g = make_grid(2, 1.0, 0.25, 0.25);
  Field u = Field::from_function(g, random_smooth(2, 11, 0, 1.0, 4, 0.0, 4.0));
  const double eps = 0.1, rho = 0.5;
  EpsEnvelope up = upper_eps_envelope(u, eps, rho);
  for (std::size_t id = 0; id < u.size(); ++id) {
    if (!up.domain[id]) continue;
    Point y = g->point(id);
    double best = -INFINITY;
    for (std::size_t jd = 0; jd < u.size(); ++jd) {
      if (!up.domain[jd]) continue;
      Point x = g->point(jd);
      if (std::abs(x.x[1] - y.x[1]) > 1e-12) continue;
      double dx = x.x[0] - y.x[0], dt = x.t - y.t;
      best = std::max(best, u.v[jd] - (dx * dx + dt * dt) / eps);
    }
    CHECK(up.values.v[id] == doctest::Approx(best).epsilon(1e-12));
  }
}
