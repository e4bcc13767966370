#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tplab/grid.hpp"

namespace tplab {

/// Symmetric n x n matrix, n in {1,2}, stored as its upper triangle.
struct SymMatrix {
  int n = 1;
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;

  static SymMatrix diag1(double a) { return {1, a, 0.0, 0.0}; }
  static SymMatrix make2(double a11, double a12, double a22) { return {2, a11, a12, a22}; }
  double trace() const { return n == 1 ? a11 : a11 + a22; }
  /// Ascending eigenvalues; the second entry is unused for n = 1.
  std::array<double, 2> eigenvalues() const;
  double spectral_norm() const;
  SymMatrix operator+(const SymMatrix& o) const { return {n, a11 + o.a11, a12 + o.a12, a22 + o.a22}; }
  SymMatrix operator-() const { return {n, -a11, -a12, -a22}; }
};

double pucci_plus(const SymMatrix& M, double lambda, double Lambda);
double pucci_minus(const SymMatrix& M, double lambda, double Lambda);

enum class OperatorKind { pucci_plus, pucci_minus, trace_laplace, custom };

const char* to_string(OperatorKind k);
OperatorKind operator_kind_from_string(const std::string& s);

/// Uniformly (lambda, Lambda)-elliptic operator with F(0) = 0.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::trace_laplace;
  double lambda = 1.0;
  double Lambda = 1.0;
  std::function<double(const SymMatrix&)> rule;  // custom kind only

  /// Throws std::invalid_argument on bad constants or F(0) != 0.
  static OperatorSpec make(OperatorKind kind, double lambda, double Lambda,
                           std::function<double(const SymMatrix&)> rule = {});
  bool serializable() const { return kind != OperatorKind::custom; }
  /// Largest slope of F along rank-one directions; drives the time step.
  double max_slope() const { return kind == OperatorKind::trace_laplace ? 1.0 : Lambda; }
};

/// Throws std::runtime_error when a custom rule returns a non-finite value.
double evaluate(const OperatorSpec& F, const SymMatrix& M);

struct EllipticityReport {
  bool passed = true;
  int samples = 0;
  double worst_low = 0.0;   // min of (F(M+N)-F(M)) - lambda |N|
  double worst_high = 0.0;  // min of Lambda |N| - (F(M+N)-F(M))
  std::optional<std::array<SymMatrix, 2>> witness;  // (M, N) of the first violation
};

/// Samples pairs (M, N = b b^T != 0) in dimension n with spectral norm |N|
/// and relative tolerance 1e-10.
EllipticityReport check_ellipticity(const OperatorSpec& F, int samples, int n = 2,
                                    std::uint64_t seed = 0);

/// Central second differences at `node` on its time level; the n = 2 cross
/// term uses the 4-point corner difference. With `side` (+1/-1 per node) the
/// stencil must stay on the node's side. Throws std::out_of_range when the
/// stencil leaves the grid and std::domain_error when it crosses sides.
SymMatrix discrete_hessian(const Field& u, std::size_t node,
                           const std::vector<std::int8_t>* side = nullptr);

}  // namespace tplab
