#pragma once

#include <array>
#include <string>
#include <vector>

#include "tplab/grid.hpp"

namespace tplab {

/// power: kappa r^alpha; log: kappa / (1 + |log r|)^2; zero: 0;
/// inverse_log: kappa / |log r| (not Dini, for r < 1).
struct DiniModulus {
  std::string kind = "zero";
  double kappa = 0.0;
  double alpha = 1.0;

  double operator()(double r) const;
  /// omega(e^{-s}), evaluated without forming e^{-s} for large s.
  double at_log(double s) const;
  /// Throws std::invalid_argument on an unknown kind or negative kappa.
  static DiniModulus make(const std::string& kind, double kappa, double alpha = 1.0);
};

struct DiniCheck {
  double integral = 0.0;  // int_{1e-12}^{r1} omega(r)/r dr
  bool monotone = true;   // on a 10^4 point log-spaced sample
  bool convergent = true;
  double tail_ratio = 0.0;  // ratio of the last two doubling increments in s = -log r
  bool is_dini = true;
};

/// Adaptive Simpson in s = -log r with Richardson correction. Divergence is
/// detected from the increments of the integral over doubling s-intervals.
DiniCheck dini_check(const DiniModulus& omega, double r1);

struct HopfRecursion {
  double rho = 0.0, alpha0 = 0.0, c0 = 0.0, C_tilde = 1.0;
  std::vector<double> A;        // A_0 = c0, A_k = max{omega(rho^k), rho^alpha0 A_{k-1}}
  std::vector<double> a;        // a_k = a_{k-1} + C_tilde A_k, a_{-1} = 0
  std::vector<double> partial;  // sum_{j <= k} A_j
  double bound = 0.0;           // 4 c0
  bool within_bound = false;
  bool recurrence_exact = false;
};

/// Throws std::invalid_argument unless (1 - rho^alpha0)(1 - rho) >= 1/2,
/// omega(1) <= c0 and the Dini integral on (0, 1] is at most c0.
HopfRecursion hopf_recursion(const DiniModulus& omega, double rho, double alpha0, double c0, int K,
                             double C_tilde = 1.0);

struct HopfProbe {
  std::array<double, 2> l{};
  double r = 0.0;
  double value = 0.0;  // u(r l, 0)
  double ratio = 0.0;  // value / (l_n u(e_n/2, -3/4) r)
  bool resolved = false;  // r >= 8h
};

struct HopfReport {
  double normalization = 0.0;  // u(e_n/2, -3/4)
  std::vector<HopfProbe> probes;
  double measured_c = 0.0;           // min ratio over all probes
  double measured_c_resolved = 0.0;  // min ratio over resolved probes (0 when none)
  bool passed = false;               // measured_c > 0
};

/// Probes the top slice of u at r l for every pair (l, r); each l must have l_n > 0.
/// Throws std::invalid_argument when u(e_n/2, -3/4) <= 0.
HopfReport hopf_verify(const Field& u, const std::vector<std::array<double, 2>>& directions,
                       const std::vector<double>& r_values);

}  // namespace tplab
