#include "tplab/hopf.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace tplab {

DiniModulus DiniModulus::make(const std::string& kind, double kappa, double alpha) {
  if (kind != "power" && kind != "log" && kind != "zero" && kind != "inverse_log")
    throw std::invalid_argument("unknown modulus kind '" + kind + "'");
  if (!(kappa >= 0.0)) throw std::invalid_argument("modulus: kappa must be nonnegative");
  if (kind == "power" && !(alpha > 0.0)) throw std::invalid_argument("modulus: alpha must be positive");
  return DiniModulus{kind, kappa, alpha};
}

double DiniModulus::at_log(double s) const {
  if (kind == "power") return kappa * std::exp(-alpha * s);
  if (kind == "log") return kappa / ((1.0 + std::abs(s)) * (1.0 + std::abs(s)));
  if (kind == "inverse_log") return s > 0.0 ? kappa / s : INFINITY;
  return 0.0;
}

double DiniModulus::operator()(double r) const {
  if (r <= 0.0) return 0.0;
  if (kind == "power") return kappa * std::pow(r, alpha);
  return at_log(-std::log(r));
}

namespace {

using Fn = std::function<double(double)>;

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const Fn& f, double a, double fa, double b, double fb, double m, double fm, double whole,
             double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const Fn& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  return adapt(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), tol, 40);
}

}  // namespace

DiniCheck dini_check(const DiniModulus& omega, double r1) {
  if (!(r1 > 0.0)) throw std::invalid_argument("dini_check: r1 must be positive");
  DiniCheck c;
  const double rmin = 1e-12;
  Fn w = [&](double s) { return omega.at_log(s); };
  const double s0 = -std::log(r1), s1 = -std::log(rmin);
  c.integral = s1 > s0 ? integrate(w, s0, s1, 1e-12) : 0.0;
  const int N = 10000;
  double prev = omega(rmin);
  for (int i = 1; i < N; ++i) {
    double r = rmin * std::pow(r1 / rmin, static_cast<double>(i) / (N - 1));
    double v = omega(r);
    if (v < prev - 1e-15 * std::max(1.0, std::abs(prev))) c.monotone = false;
    prev = v;
  }
  double S = std::max(1.0, s0);
  double last = 0.0, before = 0.0;
  for (int j = 0; j < 20; ++j) {
    before = last;
    last = integrate(w, S, 2.0 * S, 1e-14);
    S *= 2.0;
  }
  c.tail_ratio = before > 1e-300 ? last / before : 0.0;
  c.convergent = c.tail_ratio <= 0.9 && std::isfinite(c.integral);
  c.is_dini = c.convergent && c.monotone;
  return c;
}

HopfRecursion hopf_recursion(const DiniModulus& omega, double rho, double alpha0, double c0, int K,
                             double C_tilde) {
  if (!(rho > 0.0 && rho < 1.0 && alpha0 > 0.0 && alpha0 < 1.0 && c0 > 0.0 && K >= 0))
    throw std::invalid_argument("hopf_recursion: need 0 < rho, alpha0 < 1, c0 > 0, K >= 0");
  if ((1.0 - std::pow(rho, alpha0)) * (1.0 - rho) < 0.5)
    throw std::invalid_argument("hopf_recursion: proviso (1 - rho^alpha0)(1 - rho) >= 1/2 violated");
  if (omega(1.0) > c0 * (1.0 + 1e-12)) throw std::invalid_argument("hopf_recursion: omega(1) exceeds c0");
  DiniCheck d = dini_check(omega, 1.0);
  if (!d.is_dini || d.integral > c0 * (1.0 + 1e-9))
    throw std::invalid_argument("hopf_recursion: Dini integral on (0,1] exceeds c0");
  HopfRecursion h;
  h.rho = rho;
  h.alpha0 = alpha0;
  h.c0 = c0;
  h.C_tilde = C_tilde;
  const double q = std::pow(rho, alpha0);
  double sum = 0.0, ak = 0.0;
  for (int k = 0; k <= K; ++k) {
    double A = k == 0 ? c0 : std::max(omega(std::pow(rho, k)), q * h.A.back());
    h.A.push_back(A);
    sum += A;
    ak += C_tilde * A;
    h.partial.push_back(sum);
    h.a.push_back(ak);
  }
  h.bound = 4.0 * c0;
  h.within_bound = sum <= h.bound;
  h.recurrence_exact = h.A[0] == c0;
  for (int k = 1; k <= K; ++k)
    if (h.A[k] != std::max(omega(std::pow(rho, k)), q * h.A[k - 1])) h.recurrence_exact = false;
  return h;
}

HopfReport hopf_verify(const Field& u, const std::vector<std::array<double, 2>>& directions,
                       const std::vector<double>& r_values) {
  const GridCylinder& g = *u.grid;
  const int n = g.n;
  HopfReport rep;
  Point pn;
  pn.x = {0.0, 0.0};
  pn.x[n - 1] = 0.5;
  pn.t = -0.75;
  rep.normalization = u.sample(pn);
  if (!(rep.normalization > 0.0)) throw std::invalid_argument("hopf_verify: u(e_n/2, -3/4) <= 0");
  rep.measured_c = INFINITY;
  double cres = INFINITY;
  for (const auto& l : directions) {
    if (!(l[n - 1] > 0.0)) throw std::invalid_argument("hopf_verify: direction needs l_n > 0");
    for (double r : r_values) {
      HopfProbe p;
      p.l = l;
      p.r = r;
      Point q;
      for (int a = 0; a < n; ++a) q.x[a] = r * l[a];
      q.t = 0.0;
      p.value = u.sample(q);
      p.ratio = p.value / (l[n - 1] * rep.normalization * r);
      p.resolved = r >= 8.0 * g.h - 1e-12;
      rep.measured_c = std::min(rep.measured_c, p.ratio);
      if (p.resolved) cres = std::min(cres, p.ratio);
      rep.probes.push_back(p);
    }
  }
  if (rep.probes.empty()) rep.measured_c = 0.0;
  rep.measured_c_resolved = std::isfinite(cres) ? cres : 0.0;
  rep.passed = rep.measured_c > 0.0;
  return rep;
}

}  // namespace tplab
