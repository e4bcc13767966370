#pragma once

#include <array>
#include <string>
#include <vector>

#include "tplab/grid.hpp"
#include "tplab/interface.hpp"
#include "tplab/solver.hpp"

namespace tplab {

// ---- ABP ----------------------------------------------------------------

/// Data driving u downwards: g+ on Gamma and f- = max(-f, 0) for
/// dt u - F(D^2 u) = f.
struct AbpReport {
  double lhs = 0.0;            // sup u^-
  double boundary = 0.0;       // sup over d_p of u^-
  double g_plus = 0.0;         // max g^+ over the sampled interface
  double f_norm = 0.0;         // ||f^-||_{L^{n+1}} over the cylinder
  double f_norm_contact = 0.0; // same norm restricted to the contact set of -u^-
  double empirical_C = 0.0;
  bool vacuous = false;        // g-f term below 1e-8
  bool holds(double C, double slack = 0.0) const {
    return lhs <= boundary + C * (g_plus + f_norm) + slack;
  }
};

AbpReport abp_verify(const TransmissionProblem& problem, const Field& u);

// ---- Harnack / oscillation ---------------------------------------------

/// Axis-aligned space-time box; `ball` marks B_radius(center) x (tlo, thi].
struct SpaceTimeBox {
  std::array<double, 2> lo{}, hi{};
  double tlo = 0.0, thi = 0.0;
  bool ball = false;
  std::array<double, 2> center{};
  double radius = 0.0;
  bool contains_box(const SpaceTimeBox& o, int n) const;  // closure-level containment
  bool disjoint(const SpaceTimeBox& o, int n) const;      // open in time at the bottom
};

struct HarnackGeometry {
  int n = 1;
  double r = 0.0, sigma = 0.0, r0 = 0.0;
  std::array<double, 2> xbar{};
  double tbar = 0.0, ttilde = 0.0;
  SpaceTimeBox K1, K2, K3, P;
  bool K1_in_P = false, K2_in_P = false, K3_K1_disjoint = false;
};

/// Throws std::domain_error when sup |psi| > sigma r / 2.
HarnackGeometry harnack_geometry(int n, const InterfaceGraph* gamma = nullptr);

struct HarnackReport {
  bool passed = false;
  double measured_c = 0.0;  // 1 + inf over C_{r0} of u
  double u_bar = 0.0;       // u(xbar, tbar)
  double sup_K3 = 0.0, inf_K1 = 0.0;
  double data_size = 0.0;   // ||g|| + ||f||_{L^{n+1}}
  double sup_abs = 0.0;
};

/// Throws std::invalid_argument when ||u|| > 1 + 5h, u(xbar, tbar) < 0 or the
/// data exceed eps0.
HarnackReport harnack_verify(const TransmissionProblem& problem, const Field& u, double eps0 = 0.01);

/// Nodes of C_rho(center, t0) on the grid of u.
std::vector<std::uint8_t> cylinder_mask(const GridCylinder& g, double rho);
double oscillation(const Field& u, const std::vector<std::uint8_t>& mask);

struct OscillationReport {
  double osc_outer = 0.0, osc_inner = 0.0;
  double correction = 0.0;  // C (||g|| + ||f||) with the supplied C
  double mu_est = 0.0;
  bool vacuous = false;
};

OscillationReport oscillation_decay(const Field& u, double r0, double data_term = 0.0, double C = 0.0);

struct HolderEstimate {
  NormReport norm;               // on C_{1/2}
  std::vector<double> radii, osc;  // dyadic oscillation sequence
  double fitted_alpha = 0.0;
  double data_ratio = 0.0;       // ||u||_{C^alpha(C_1/2)} / (||u|| + ||g|| + ||f||)
  bool vacuous = false;
};

/// Exponent fitted by least squares on log osc_{C_{2^-j}} against log 2^-j
/// over radii >= 4h. The norm on C_{1/2} uses alpha1_guess.
HolderEstimate holder_estimate(const Field& u, double alpha1_guess, double data_norm = 0.0,
                               bool with_norm = true);

// ---- C^{1,alpha} affine fits -------------------------------------------

struct AffineLevel {
  int k = 0;
  double radius = 0.0;
  bool usable = false;  // radius >= 8h and both sides populated
  std::array<double, 2> A_plus{}, A_minus{};
  double b = 0.0;
  double g_hat = 0.0;
  double residual = 0.0;  // sup |u - l| over both sides of C_radius
  double constraint_residual = 0.0;
  std::size_t nodes = 0;
};

struct AffineFitSequence {
  double rho = 0.5;
  std::vector<AffineLevel> levels;
  double slope = 0.0;         // log residual against log rho^k over usable levels
  double fitted_alpha = 0.0;  // slope - 1
  double g_hat = 0.0;         // from the finest usable level
  double g_error = 0.0;       // |g_hat - g0|
  int usable = 0;
};

/// Throws std::invalid_argument with fewer than 2 usable levels.
AffineFitSequence c1alpha_fit(const Field& u, const InterfaceGraph& gamma, double g0, double rho, int K);

// ---- stability ------------------------------------------------------------

struct StabilityRow {
  double delta = 0.0;
  double flat_gap = 0.0;  // || vbar - vunder ||_inf on C_1
  double glue_gap = 0.0;  // || u - v ||_inf on C_{1/2}
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  double tau = 0.0;  // slope of log glue_gap against log delta (positive deltas)
};

/// Curved problem: bump interface of amplitude delta; flat problems at
/// a = +delta (vbar) and a = -delta (vunder); v = vunder on Omega+, vbar on
/// the closure of Omega-.
StabilityReport stability_experiment(const std::vector<double>& deltas, const TransmissionProblem& base);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tplab
