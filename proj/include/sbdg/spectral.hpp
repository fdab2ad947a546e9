#pragma once

// Spectra of M^{-1} K, fully discrete amplification factors and stability
// scans over (d, CFL).

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sbdg/operators.hpp"
#include "sbdg/types.hpp"

namespace sbdg {

/// Single classification threshold: stable <=> rho <= 1 + kStabilityTolerance.
inline constexpr double kStabilityTolerance = 1e-9;

/// Periodic ring size used for the reference CFL of the interior scheme.
inline constexpr int kReferenceCells = 16;

struct SystemId {
  int degree = 0;
  int n_elements = 0;
  bool periodic = false;
  double d_over_dx = 0.0;
};

struct Spectrum {
  VectorXc eigenvalues;  // sorted by (Re, Im)
  SystemId id;

  Index size() const { return eigenvalues.size(); }
};

struct SingularAmplification : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Eigenvalues of M^{-1} K for an assembled system (N <= 64 is the intended scale).
Spectrum eigenvalues(const GlobalSystem<double>& system);

/// Closed-form spectrum of the two-cell P1 shifted system with dx = 1:
/// {-2 -+ i sqrt(2), 3d - 2 -+ sqrt(9d^2 - 12d - 2)}.
std::array<Complex, 4> p1_analytic_eigenvalues(double d);

/// |sum_{k=0}^{s} mu^k / k!|
double rk_stability_value(Complex mu, int order);

double explicit_spectral_radius(const Spectrum& spectrum, double dt, int order);

/// max |1 / (1 - dt lambda)|; throws SingularAmplification when dt lambda = 1.
double implicit_spectral_radius(const Spectrum& spectrum, double dt);

/// Amplification for `integrator`; explicit RK uses order p + 1.
double amplification_factor(const Spectrum& spectrum, Integrator integrator, double dt);

inline bool is_stable(double rho) { return rho <= 1.0 + kStabilityTolerance; }

/// Largest dt/dx with explicit RK(p+1) stable on a periodic ring of `cells`
/// elements, by bisection to 1e-5.
double periodic_cfl_max(int p, int cells = kReferenceCells);

/// Cached periodic_cfl_max(p) used to normalise every CFL value.
double cfl_reference(int p);

/// Normalised CFL to time step: dt = cfl * CFL_max^p * dx (or cfl * dx when raw).
double time_step(int p, double cfl, double dx, bool raw_dt = false);

/// Two-cell (by default) shifted system with homogeneous datum and dx = 1.
GlobalSystem<double> analysis_system(int p, double d_over_dx, int n_elements = 2);

struct StabilityMapOptions {
  int degree = 1;
  Integrator integrator = Integrator::explicit_rk;
  double d_min = -1.0;
  double d_max = 1.0;
  double cfl_min = 0.0;
  double cfl_max = 1.0;
  int d_points = 201;
  int cfl_points = 201;
  int n_elements = 2;
  bool raw_dt = false;
  unsigned threads = 0;  // 0: SBDG_THREADS or hardware concurrency
};

struct StabilityMap {
  std::vector<double> d_grid;
  std::vector<double> cfl_grid;
  MatrixXd rho;  // rho(i, j) at (d_grid[i], cfl_grid[j])

  bool stable(Index i, Index j) const { return is_stable(rho(i, j)); }
  bool marginal(Index i, Index j) const {
    return std::abs(rho(i, j) - 1.0) <= kStabilityTolerance;
  }
};

StabilityMap stability_map(const StabilityMapOptions& options);

struct CurvePoint {
  double cfl;
  double rho;
};

std::vector<CurvePoint> amplification_curve(int p, Integrator integrator, double d_over_dx,
                                            const std::vector<double>& cfl_samples,
                                            int n_elements = 2, bool raw_dt = false);

/// Evenly spaced samples including both end points.
std::vector<double> linspace(double lo, double hi, int points);

/// Worker count from SBDG_THREADS, falling back to hardware concurrency.
unsigned default_thread_count();

}  // namespace sbdg
