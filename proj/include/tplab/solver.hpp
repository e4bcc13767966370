#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tplab/catalog.hpp"
#include "tplab/grid.hpp"
#include "tplab/interface.hpp"
#include "tplab/operators.hpp"

namespace tplab {

/// transmission: jump condition through the trace system.
/// continuous:   centered stencils straddle Gamma, operator chosen by side.
/// one_phase:    u = 0 on Gamma and below it; only the plus side evolves.
/// none:         single operator F_plus and source f_plus everywhere.
enum class InterfaceMode { transmission, continuous, one_phase, none };

const char* to_string(InterfaceMode m);

/// dt_t u - F+-(D^2 u) = f+- in Omega+-, u_nu+ - u_nu- = g on Gamma, u = phi on d_p.
struct TransmissionProblem {
  GridPtr grid;
  OperatorSpec F_plus, F_minus;
  SpaceTimeFn f_plus, f_minus;  // empty means zero
  JumpFn g;                     // empty means zero
  InterfaceGraph gamma;
  SpaceTimeFn phi;
  InterfaceMode mode = InterfaceMode::transmission;
  int trace_order = 1;
  double theta = 0.4;  // CFL safety; band monotonicity needs theta <= 1/2
  int ellipticity_samples = 200;
};

struct SolveReport {
  long steps = 0;
  int substeps = 1;  // solver steps per stored level
  double dt = 0.0;
  double cfl_ratio = 0.0;  // dt / (h^2 / (2 n Lambda + 4 Lambda [n = 2]))
  double max_interface_residual = 0.0;
  double sandwich_margin = 0.0;  // set by callers that compare against barriers
  bool has_sandwich = false;
  double wall_time = 0.0;
  long ghost_fallbacks = 0;
  long cross_fallbacks = 0;
  std::string isa;
};

struct CflStep {
  double raw = 0.0;  // theta h^2 / (2 n Lambda + 4 Lambda [n = 2])
  double dt = 0.0;   // largest value <= raw dividing `span`
  long steps = 0;    // span / dt
};

/// Rounds down so dt divides `span` (r^2 by default).
CflStep cfl_dt(const GridCylinder& grid, double Lambda, double theta, double span = -1.0);

/// One explicit Euler step of all spatial nodes from time t to t + dt.
/// `at_bottom` marks the bottom slice, where every node carries data.
class Stepper {
 public:
  explicit Stepper(const TransmissionProblem& p);
  void step(const std::vector<double>& cur, double t, double dt, bool at_bottom,
            std::vector<double>& next);
  /// Fills slaved nodes of `level` at time t from the trace; returns the max
  /// jump-equation residual over active columns.
  double finalize(std::vector<double>& level, double t, bool at_bottom);
  long ghost_fallbacks() const { return ghost_fallbacks_; }
  long cross_fallbacks() const { return cross_fallbacks_; }

 private:
  void geometry(double t, bool at_bottom);
  void traces(const std::vector<double>& level, double t);
  double neighbor(const std::vector<double>& cur, std::size_t p, int di, int dj, bool& ok);

  const TransmissionProblem& P;
  const GridCylinder& g;
  std::vector<double> xs1_, xs2_;
  std::vector<double> sdist_;
  std::vector<std::int8_t> side_;
  std::vector<std::uint8_t> slaved_;
  std::vector<ColumnGeometry> geo_;
  std::vector<double> ugam_;
  std::vector<double> fbuf_, a11_, a12_, a22_, fout_;
  std::vector<std::size_t> idx_;
  long ghost_fallbacks_ = 0;
  long cross_fallbacks_ = 0;
};

/// Throws std::invalid_argument for an ill-posed problem and
/// std::runtime_error on a non-finite update (naming node and level).
std::pair<Field, SolveReport> solve(const TransmissionProblem& problem);

/// Next stored level from level k of `u` (all solver substeps applied).
std::vector<double> step_explicit(const TransmissionProblem& problem, const Field& u, int k);

/// For n = 1: linear weights of the update of every interior node at level k,
/// with F replaced by its steepest slope. True iff all weights are >= -1e-14.
bool monotone_weights_n1(const TransmissionProblem& problem, int k, double* min_weight = nullptr);

/// Barriers of the flat problem (interface x_n = a). Lower: Pucci- with source
/// -||f||, data phi - ||g|| |x_n - a|/2, then + ||g|| |x_n - a|/2. Upper: Pucci+
/// with +||f||, data phi + ||g|| |x_n - a|/2, then - ||g|| |x_n - a|/2.
std::pair<Field, Field> perron_barriers(const TransmissionProblem& problem);

struct DecompositionResult {
  Field v_direct;
  Field w;
  Field v_decomposed;
  double error = 0.0;  // || v_direct - v_decomposed ||_inf
};

/// v = w + (g0/2)|x_n - a| with w the zero-jump solution (continuous stencil
/// path) for data phi - (g0/2)|x_n - a|; v_direct from the transmission path.
DecompositionResult flat_decomposition_solve(const TransmissionProblem& base, double a, double g0);

/// Discrete || f ||_{L^{n+1}} = (sum |f|^{n+1} h^n dt)^{1/(n+1)} over unmasked nodes.
double lnp1_norm(const Field& f, const std::vector<std::uint8_t>* include = nullptr);

/// Source field f+- sampled by node side (zero where unset).
Field source_field(const TransmissionProblem& p);

}  // namespace tplab
