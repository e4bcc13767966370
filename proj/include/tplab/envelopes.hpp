#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tplab/grid.hpp"

namespace tplab {

struct EnvelopeResult {
  Field envelope;
  std::vector<std::uint8_t> contact;  // per node, 1 on {u - C_u <= tol}
  double krylov_tso_integral = 0.0;
  int sweeps = 0;  // n = 2 directional passes until the change drops below 1e-10
};

/// Largest function below u that is convex in x on each slice and
/// nonincreasing in t: the lower convex hull of the running minimum
/// m_t(y) = min_{s <= t} u(y, s). With `extend_zero`, u is extended by 0 on
/// B_{margin r} and on earlier times before the hull is taken; the envelope is
/// returned on the original nodes. Throws std::invalid_argument on non-finite data.
EnvelopeResult parabolic_convex_envelope(const Field& u, bool extend_zero = false, double margin = 2.0);

/// Nodes with u - C_u <= tol (default 10 h^2).
std::vector<std::uint8_t> contact_set(const Field& u, const Field& envelope, double tol = -1.0);

struct KrylovTsoResult {
  Field integrand;            // zero off the contact set
  double integral = 0.0;      // sum integrand h^n dt
  double clamped_time = 0.0;  // sum of the negative parts cut from -d_t C
  double clamped_det = 0.0;   // sum of the negative parts cut from det D^2 C
  long excluded = 0;          // contact nodes without an interior stencil
  long used = 0;
};

/// (-d_t C)_+ (det D^2 C)_+ per contact node, backward difference in time.
KrylovTsoResult krylov_tso_integrand(const Field& envelope, const std::vector<std::uint8_t>& contact);

struct EpsEnvelope {
  double eps = 0.0;
  double rho = 0.0;
  bool upper = true;
  Field values;                    // meaningful on `domain`
  std::vector<std::uint8_t> domain;  // nodes of C_rho
  std::vector<double> arg_x;       // attaining x' per node (n = 2; y_n for n = 1)
  std::vector<double> arg_t;       // attaining t per node
};

/// u^eps(y, s) = sup u((x', y_n), t) - |x' - y'|^2 / eps - (t - s)^2 / eps over
/// C_rho nodes, by separable lower envelopes of parabolas (t first, then x').
/// For n = 1 only t is penalized. Throws std::invalid_argument for eps <= 0
/// or rho >= r.
EpsEnvelope upper_eps_envelope(const Field& u, double eps, double rho);
/// u_eps = -(-u)^eps.
EpsEnvelope lower_eps_envelope(const Field& u, double eps, double rho);

struct EpsPropertyReport {
  bool ordered = true;       // u^eps >= u (upper) or u_eps <= u (lower)
  bool lipschitz = true;     // at fixed y_n, |du| <= (4 rho / eps)(|dy'| + |ds|) + 1e-9
  bool semiconvex = true;    // u^eps + |y'|^2/eps convex along x' (lower: concave)
  bool displacement = true;  // |x' - y'|^2 + (t - s)^2 <= 2 eps ||u||
  double lipschitz_measured = 0.0;
  double lipschitz_bound = 0.0;
  double max_displacement = 0.0;  // max sqrt(|x' - y'|^2 + (t - s)^2)
  double displacement_bound = 0.0;
  double worst_second_difference = 0.0;
  std::vector<std::string> violations;
  bool passed() const { return ordered && lipschitz && semiconvex && displacement; }
};

EpsPropertyReport verify_eps_properties(const EpsEnvelope& env, const Field& u);

/// Lower convex hull of points (x_i, y_i), x strictly increasing, evaluated at the x_i.
std::vector<double> lower_hull_1d(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tplab
