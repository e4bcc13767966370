#include "tplab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tplab/rng.hpp"

namespace tplab {

std::array<double, 2> SymMatrix::eigenvalues() const {
  if (n == 1) return {a11, 0.0};
  double m = 0.5 * (a11 + a22);
  double q = 0.5 * (a11 - a22);
  double d = std::sqrt(q * q + a12 * a12);
  return {m - d, m + d};
}

double SymMatrix::spectral_norm() const {
  auto e = eigenvalues();
  return n == 1 ? std::abs(e[0]) : std::max(std::abs(e[0]), std::abs(e[1]));
}

namespace {

void check_constants(double lambda, double Lambda) {
  if (!(lambda > 0.0) || !(Lambda >= lambda))
    throw std::invalid_argument("ellipticity constants need 0 < lambda <= Lambda");
}

double extremal(const SymMatrix& M, double pos, double neg) {
  auto e = M.eigenvalues();
  double s = 0.0;
  for (int i = 0; i < M.n; ++i) s += e[i] > 0.0 ? pos * e[i] : neg * e[i];
  return s;
}

}  // namespace

double pucci_plus(const SymMatrix& M, double lambda, double Lambda) {
  check_constants(lambda, Lambda);
  return extremal(M, Lambda, lambda);
}

double pucci_minus(const SymMatrix& M, double lambda, double Lambda) {
  check_constants(lambda, Lambda);
  return extremal(M, lambda, Lambda);
}

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::pucci_plus: return "pucci_plus";
    case OperatorKind::pucci_minus: return "pucci_minus";
    case OperatorKind::trace_laplace: return "trace_laplace";
    case OperatorKind::custom: return "custom";
  }
  return "?";
}

OperatorKind operator_kind_from_string(const std::string& s) {
  if (s == "pucci_plus") return OperatorKind::pucci_plus;
  if (s == "pucci_minus") return OperatorKind::pucci_minus;
  if (s == "trace_laplace" || s == "trace") return OperatorKind::trace_laplace;
  throw std::invalid_argument("unknown operator kind '" + s + "'");
}

OperatorSpec OperatorSpec::make(OperatorKind kind, double lambda, double Lambda,
                                std::function<double(const SymMatrix&)> rule) {
  check_constants(lambda, Lambda);
  OperatorSpec F;
  F.kind = kind;
  F.lambda = lambda;
  F.Lambda = Lambda;
  if (kind == OperatorKind::custom) {
    if (!rule) throw std::invalid_argument("custom operator needs an evaluation rule");
    F.rule = std::move(rule);
  }
  for (int n = 1; n <= 2; ++n) {
    SymMatrix zero{n, 0.0, 0.0, 0.0};
    if (evaluate(F, zero) != 0.0) throw std::invalid_argument("operator must satisfy F(0) = 0");
  }
  return F;
}

double evaluate(const OperatorSpec& F, const SymMatrix& M) {
  switch (F.kind) {
    case OperatorKind::pucci_plus: return extremal(M, F.Lambda, F.lambda);
    case OperatorKind::pucci_minus: return extremal(M, F.lambda, F.Lambda);
    case OperatorKind::trace_laplace: return M.trace();
    case OperatorKind::custom: {
      double v = F.rule(M);
      if (!std::isfinite(v)) throw std::runtime_error("custom operator returned a non-finite value");
      return v;
    }
  }
  return 0.0;
}

EllipticityReport check_ellipticity(const OperatorSpec& F, int samples, int n, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("check_ellipticity: samples must be >= 1");
  EllipticityReport rep;
  rep.samples = samples;
  rep.worst_low = rep.worst_high = INFINITY;
  CounterRng rng(seed, 0xE11);
  for (int s = 0; s < samples; ++s) {
    double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    SymMatrix M{n, scale * rng.uniform(-1, 1), n == 2 ? scale * rng.uniform(-1, 1) : 0.0,
                n == 2 ? scale * rng.uniform(-1, 1) : 0.0};
    // Rank-one N = b b^T: spectral and trace norms agree, so the Pucci
    // bounds are attained.
    double nscale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    double b1 = rng.uniform(-1, 1), b2 = rng.uniform(-1, 1);
    SymMatrix N{n, 0, 0, 0};
    if (n == 1) {
      N.a11 = nscale * b1 * b1;
    } else {
      N.a11 = nscale * b1 * b1;
      N.a12 = nscale * b1 * b2;
      N.a22 = nscale * b2 * b2;
    }
    double norm = N.spectral_norm();
    if (norm == 0.0) continue;
    double fm = evaluate(F, M), fmn = evaluate(F, M + N);
    double inc = fmn - fm;
    double tol = 1e-10 * std::max({1.0, std::abs(fm), std::abs(fmn), F.Lambda * norm});
    double low = inc - F.lambda * norm, high = F.Lambda * norm - inc;
    rep.worst_low = std::min(rep.worst_low, low);
    rep.worst_high = std::min(rep.worst_high, high);
    if ((low < -tol || high < -tol) && !rep.witness) {
      rep.passed = false;
      rep.witness = std::array<SymMatrix, 2>{M, N};
    }
  }
  return rep;
}

SymMatrix discrete_hessian(const Field& u, std::size_t node, const std::vector<std::int8_t>* side) {
  const GridCylinder& g = *u.grid;
  const int k = g.level(node);
  const std::size_t s = g.spatial(node);
  const int i = g.axis_index(s, 0), j = g.n == 2 ? g.axis_index(s, 1) : 0;
  auto val = [&](int di, int dj) {
    int ii = i + di, jj = j + dj;
    if (ii < 0 || jj < 0 || ii >= g.m || jj >= g.m) throw std::out_of_range("hessian stencil leaves the grid");
    std::size_t q = g.node(k, g.spatial_index(ii, jj));
    if (!g.in(q)) throw std::out_of_range("hessian stencil leaves the grid");
    if (side && (*side)[q] != (*side)[node]) throw std::domain_error("hessian stencil crosses the interface");
    return u.v[q];
  };
  const double ih2 = 1.0 / (g.h * g.h);
  const double c = u.v[node];
  if (g.n == 1) return SymMatrix::diag1((val(-1, 0) - 2.0 * c + val(1, 0)) * ih2);
  double d11 = (val(-1, 0) - 2.0 * c + val(1, 0)) * ih2;
  double d22 = (val(0, -1) - 2.0 * c + val(0, 1)) * ih2;
  double d12 = (val(1, 1) - val(1, -1) - val(-1, 1) + val(-1, -1)) * (0.25 * ih2);
  return SymMatrix::make2(d11, d12, d22);
}

}  // namespace tplab
