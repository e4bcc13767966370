#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace tplab {

/// Space-time point. x[n-1] is the normal coordinate x_n.
struct Point {
  std::array<double, 2> x{};
  double t = 0.0;
};

double parabolic_distance(const Point& p, const Point& q, int n);

/// Tensor-product discretization of C_r(x0,t0) = B_r(x0) x (t0 - r^2, t0].
///
/// Spatial nodes live on the bounding box of B_r; nodes outside the closed
/// ball are masked. Level 0 is the bottom slice t0 - r^2, level nt-1 is t0.
/// For n = 2 the spatial index is s = i + m*j with i along x1, j along x2.
struct GridCylinder {
  int n = 1;
  std::array<double, 2> center{};
  double t0 = 0.0;
  double r = 1.0;
  double h = 0.0;
  double dt = 0.0;
  int m = 0;        // nodes per spatial axis
  int nt = 0;       // time levels, bottom included
  std::size_t ns = 0;  // spatial nodes in the bounding box
  std::vector<std::uint8_t> inside;   // per spatial node
  std::vector<std::uint8_t> lateral;  // per spatial node, staircase of dB_r

  std::size_t size() const { return ns * static_cast<std::size_t>(nt); }
  std::size_t node(int k, std::size_t s) const { return static_cast<std::size_t>(k) * ns + s; }
  int level(std::size_t id) const { return static_cast<int>(id / ns); }
  std::size_t spatial(std::size_t id) const { return id % ns; }
  std::size_t spatial_index(int i, int j = 0) const {
    return n == 1 ? static_cast<std::size_t>(i) : static_cast<std::size_t>(i + m * j);
  }
  /// Axis index of spatial node s along `axis`.
  int axis_index(std::size_t s, int axis) const {
    if (n == 1) return static_cast<int>(s);
    return axis == 0 ? static_cast<int>(s % m) : static_cast<int>(s / m);
  }
  double coord(std::size_t s, int axis) const {
    return center[axis] - r + h * axis_index(s, axis);
  }
  double time(int k) const { return t0 - r * r + dt * k; }
  Point point(std::size_t id) const;
  bool in(std::size_t id) const { return inside[spatial(id)] != 0; }

  /// Columns are lines along x_n; one column for n = 1.
  int ncols() const { return n == 1 ? 1 : m; }
  int col_of(std::size_t s) const { return n == 1 ? 0 : static_cast<int>(s % m); }
  int row_of(std::size_t s) const { return n == 1 ? static_cast<int>(s) : static_cast<int>(s / m); }
  std::size_t at_col_row(int col, int row) const {
    return n == 1 ? static_cast<std::size_t>(row) : static_cast<std::size_t>(col + m * row);
  }
  double xprime(int col) const { return n == 1 ? 0.0 : center[0] - r + h * col; }
  double xn(int row) const { return center[n - 1] - r + h * row; }
};

using GridPtr = std::shared_ptr<const GridCylinder>;

/// Throws std::invalid_argument unless h divides 2r and dt divides r^2.
GridPtr make_grid(int n, double r, double h, double dt,
                  std::array<double, 2> center = {0.0, 0.0}, double t0 = 0.0);

/// Node ids of the bottom slice plus the lateral staircase at every level.
std::vector<std::size_t> parabolic_boundary(const GridCylinder& g);

/// Per-node flag, 1 on the parabolic boundary.
std::vector<std::uint8_t> boundary_mask(const GridCylinder& g);

/// Node-indexed scalar values. Band nodes may carry a second (minus side)
/// value; elsewhere `minus(id)` falls back to the single value.
struct Field {
  GridPtr grid;
  std::vector<double> v;
  std::vector<double> vm;
  std::vector<std::uint8_t> dual;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0);

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t id) { return v[id]; }
  double operator[](std::size_t id) const { return v[id]; }
  double minus(std::size_t id) const { return dual[id] ? vm[id] : v[id]; }
  void set_dual(std::size_t id, double plus, double minus_value);

  static Field from_function(GridPtr g, const std::function<double(const Point&)>& fn);

  /// Multilinear interpolation in (x, t) from unmasked nodes.
  double sample(const Point& p) const;
  /// Throws std::runtime_error on a non-finite value.
  void validate() const;
  double sup_norm() const;
  /// CSV with header `x1[,x2],t,side,value`; side is + or - on dual nodes, 0 elsewhere.
  void write_csv(std::ostream& os) const;
};

struct NormReport {
  double sup_norm = 0.0;
  double alpha = 1.0;
  double space_seminorm = 0.0;  // sup |du| / d_p^alpha over node pairs
  double time_seminorm = 0.0;   // sup |du| / |dt|^(alpha/2) over same-x pairs
  double grad_sup = 0.0;
  double grad_seminorm = 0.0;
  double time_c1_seminorm = 0.0;  // exponent (1 + alpha)/2
  bool exact = true;
  std::size_t pairs = 0;
};

/// Nodes are restricted to unmasked nodes with include[id] != 0 when given.
/// Exact over all pairs up to 20000 nodes, strided subsample beyond.
NormReport holder_norm(const Field& u, double alpha,
                       const std::vector<std::uint8_t>* include = nullptr);

/// Central-difference gradient; out_mask marks nodes with a full stencil
/// inside `include`.
std::vector<Field> central_gradient(const Field& u, std::vector<std::uint8_t>& out_mask,
                                    const std::vector<std::uint8_t>* include = nullptr);

/// ||u|| + ||grad u|| + [grad u]_alpha + [u]_{C_t^{(1+alpha)/2}}. When grad is
/// null it is computed by central differences on `include`.
NormReport c1alpha_norm(const Field& u, const std::vector<Field>* grad, double alpha,
                        const std::vector<std::uint8_t>* include = nullptr);

}  // namespace tplab
