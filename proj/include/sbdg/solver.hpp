#pragma once

// Time integration of M dU/dt = K U + S + b, steady-state driver for the
// manufactured problem, L2 errors and convergence tables.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "sbdg/operators.hpp"
#include "sbdg/types.hpp"

namespace sbdg {

/// Mode magnitude above which a run is declared blown up.
inline constexpr double kBlowUpThreshold = 1e12;

enum class Verdict { steady, max_time, blow_up };

std::string to_string(Verdict v);

struct SimState {
  VectorXd modes;
  double time = 0.0;
  long step_count = 0;
};

struct BlowUpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularBlockError : std::runtime_error {
  SingularBlockError(const std::string& what, int block) : std::runtime_error(what), block(block) {}
  int block;
};

/// True when any mode is non-finite or exceeds kBlowUpThreshold.
bool blown_up(const VectorXd& modes);

/// M^{-1}(K U + S + b), block by block.
VectorXd time_derivative(const GlobalSystem<double>& system, const VectorXd& u);

/// One step of Heun (s = 2), SSP3 (s = 3) or classical RK4 (s = 4).
/// Throws BlowUpError when the new state is blown up.
SimState step_explicit(const SimState& state, const GlobalSystem<double>& system, double dt,
                       int order);

/// Implicit Euler for a fixed dt. The shifted system is block lower
/// bidiagonal and is solved by forward substitution over cells; the periodic
/// system falls back to a dense LU.
class ImplicitEulerStepper {
 public:
  ImplicitEulerStepper(const GlobalSystem<double>& system, double dt);

  SimState step(const SimState& state) const;
  /// Solves (M - dt K) x = rhs.
  VectorXd solve(const VectorXd& rhs) const;
  double dt() const { return dt_; }

 private:
  const GlobalSystem<double>* system_;
  double dt_;
  Eigen::PartialPivLU<MatrixXd> first_, interior_;
  std::optional<Eigen::PartialPivLU<MatrixXd>> dense_;
};

SimState step_implicit_euler(const SimState& state, const GlobalSystem<double>& system, double dt);

struct RunConfig {
  int degree = 1;
  int n_elements = 20;
  double d_over_dx = 0.0;
  double cfl = 1.0;
  Integrator integrator = Integrator::explicit_rk;
  double max_time = 200.0;
  double residual_tol = 0.0;  // 0: 1e-13 * ||M^{-1}(S + b)||_inf
  bool raw_dt = false;
  int error_points = 0;       // 0: p + 1 Gauss points per cell
  ManufacturedCase mcase = ManufacturedCase::sine();
};

struct RunResult {
  SimState state;
  double l2_error = 0.0;
  double residual = 0.0;  // ||M^{-1}(K U + S + b)||_inf at the final state
  Verdict verdict = Verdict::max_time;
  GlobalSystem<double> system;
};

/// Marches from the projected exact solution until the residual falls below
/// the tolerance or stops improving at round-off level, the time limit is
/// reached, or the state blows up.
RunResult run_to_steady(const RunConfig& config);

/// sqrt(sum_e int (u_h - u)^2 dx) with an n-point Gauss rule per cell
/// (n = 0 selects p + 1).
double l2_error(const VectorXd& modes, const GlobalSystem<double>& system,
                const std::function<double(double)>& exact, int points = 0);

/// Value of the discrete solution at reference coordinate xi of cell e.
double evaluate(const VectorXd& modes, const GlobalSystem<double>& system, int e, double xi);

struct ConvergenceRow {
  int n_elements;
  double l2_error;
  std::optional<double> eoa;
  Verdict verdict;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
};

struct ConvergenceFailure : std::runtime_error {
  ConvergenceFailure(const std::string& what, int n_elements)
      : std::runtime_error(what), n_elements(n_elements) {}
  int n_elements;
};

/// Runs `config` on each mesh; meshes must double. Throws ConvergenceFailure
/// on the first blow-up.
ConvergenceTable convergence_study(const RunConfig& config, const std::vector<int>& meshes);

}  // namespace sbdg
