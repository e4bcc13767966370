#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tplab/grid.hpp"

namespace tplab {

using PsiFn = std::function<double(double xprime, double t)>;

/// Interface x_n = psi(x', t), sampled on the (x', t) projection of a grid.
/// For n = 1 there is no x' and psi depends on t only.
struct InterfaceGraph {
  int n = 1;
  std::string family = "flat";
  std::map<std::string, double> params;
  PsiFn psi_fn;
  PsiFn dpsi_fn;  // d psi / d x1 (n = 2), zero for n = 1
  GridPtr grid;
  std::vector<double> psi;   // nt x ncols
  std::vector<double> dpsi;  // nt x ncols
  double alpha = 0.5;
  double c1alpha_seminorm = 0.0;  // pointwise [psi]_{C^{1,alpha}} at (0,0)
  double sup_abs = 0.0;           // max |psi - center_n| over samples

  double psi_at(int k, int col) const { return psi[static_cast<std::size_t>(k) * grid->ncols() + col]; }
  double dpsi_at(int k, int col) const { return dpsi[static_cast<std::size_t>(k) * grid->ncols() + col]; }
  void write_csv(std::ostream& os) const;
};

/// Built-in families: flat {a}, tilt {slope}, bump {A, alpha}, wave {A, k},
/// dini {kappa, beta}. Throws std::invalid_argument on an unknown family and
/// std::domain_error when |psi| reaches the cylinder radius.
InterfaceGraph make_interface(GridPtr grid, const std::string& family,
                              const std::map<std::string, double>& params, double alpha = 0.5);
InterfaceGraph make_interface_fn(GridPtr grid, PsiFn psi, PsiFn dpsi, double alpha = 0.5,
                                 const std::string& family = "custom");

/// Unit normal (-grad' psi, 1)/sqrt(1 + |grad' psi|^2); for n = 1 it is e_1.
std::array<double, 2> normal_from_gradient(int n, double dpsi);
std::array<double, 2> normal_vector(const InterfaceGraph& gamma, double xprime, double t);

enum class NodeTag : std::uint8_t { plus_interior, minus_interior, band_plus, band_minus, boundary };
const char* to_string(NodeTag t);

struct NodeClassification {
  std::vector<NodeTag> tag;
  std::vector<double> sdist;      // x_n - psi(x', t)
  std::vector<std::int8_t> side;  // +1 when sdist >= 0, else -1
};

NodeClassification classify_nodes(const GridCylinder& grid, const InterfaceGraph& gamma);

/// Per-column geometry at one time level. Nodes with |x_n - psi| < h/2 that
/// are not on the parabolic boundary are slaved: their value is interpolated
/// between the trace and the nearest free node on the same side. The trace
/// stencil on each side uses the first `order` non-slaved nodes.
struct ColumnGeometry {
  bool active = false;
  int lo = 0, hi = -1;  // unmasked row range
  double psi = 0.0, dpsi = 0.0;
  int np = 0, nm = 0;
  std::array<int, 2> prow{}, mrow{};
  std::array<double, 2> pdist{}, mdist{};  // distances to the interface, > 0
};

bool is_slaved(double sdist, double h, bool on_boundary);

ColumnGeometry column_geometry(const GridCylinder& g, int col, double psi, double dpsi,
                               bool bottom_level, int order);

/// Local jump equation D+ u - D- u = g / sqrt(1 + |grad' psi|^2), written as
/// coef * u_G + sum w_i u(row_i) = gscale * g, solved for u_G in closed form.
struct TraceStencil {
  bool active = false;
  double coef = 0.0;  // coefficient of u_G, < 0
  int nw = 0;
  std::array<int, 4> row{};
  std::array<double, 4> w{};
  double gscale = 1.0;
};

TraceStencil trace_stencil(const ColumnGeometry& geom);

/// u_G from a level array indexed by spatial node.
double solve_trace(const GridCylinder& g, int col, const TraceStencil& st, const double* level_values,
                   double gval);

struct TraceSystem {
  GridPtr grid;
  int order = 2;
  std::vector<ColumnGeometry> geom;  // nt x ncols
  std::vector<TraceStencil> stencil;
  std::vector<double> g;  // jump data at the foot points

  std::size_t index(int k, int col) const { return static_cast<std::size_t>(k) * grid->ncols() + col; }
  /// Trace values at level k from field u; inactive columns give NaN.
  std::vector<double> traces(const Field& u, int k) const;
};

using JumpFn = std::function<double(double xprime, double t)>;

/// Throws std::domain_error when some coefficient of u_G is above -1e-12.
TraceSystem build_trace_system(const NodeClassification& cls, const InterfaceGraph& gamma,
                               const JumpFn& g, int order = 2);

/// One-sided derivative along e_n at the foot point (upward for both sides).
double one_sided_dn(const GridCylinder& g, int col, const ColumnGeometry& geom, int side,
                    double trace_value, const double* level_values);

/// u_nu on `side` at column `col`, level k: the e_n difference combined with
/// the tangential correction -grad' psi . grad' u, where grad' u on the side is
/// recovered from the tangential slope T of the trace along Gamma.
double one_sided_normal_derivative(const Field& u, double trace_value, const TraceSystem& ts, int k,
                                   int col, int side, double trace_slope = 0.0);

}  // namespace tplab
