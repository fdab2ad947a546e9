#include "sbdg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "sbdg/eigensolver.hpp"

namespace sbdg {

Spectrum eigenvalues(const GlobalSystem<double>& system) {
  Spectrum s;
  s.eigenvalues = dense_eigenvalues<double>(system.semi_discrete_operator());
  s.id.degree = system.degree;
  s.id.n_elements = system.n_elements;
  s.id.periodic = system.periodic;
  s.id.d_over_dx = system.boundary ? system.boundary->distance / system.dx : 0.0;
  return s;
}

std::array<Complex, 4> p1_analytic_eigenvalues(double d) {
  const Complex interior = Complex(0.0, std::sqrt(2.0));
  const Complex root = std::sqrt(Complex(9.0 * d * d - 12.0 * d - 2.0, 0.0));
  const double centre = 3.0 * d - 2.0;
  return {Complex(-2.0, 0.0) - interior, Complex(-2.0, 0.0) + interior, centre - root,
          centre + root};
}

double rk_stability_value(Complex mu, int order) {
  if (order < 1) throw std::invalid_argument("rk_stability_value: order must be >= 1");
  // Horner form of 1 + mu (1 + mu/2 (1 + mu/3 (...))).
  Complex z(1.0, 0.0);
  for (int k = order; k >= 1; --k) z = 1.0 + mu / double(k) * z;
  return std::abs(z);
}

double explicit_spectral_radius(const Spectrum& spectrum, double dt, int order) {
  if (dt < 0.0) throw std::invalid_argument("explicit_spectral_radius: dt must be >= 0");
  double rho = 0.0;
  for (const Complex& l : spectrum.eigenvalues)
    rho = std::max(rho, rk_stability_value(l * dt, order));
  return rho;
}

double implicit_spectral_radius(const Spectrum& spectrum, double dt) {
  if (dt < 0.0) throw std::invalid_argument("implicit_spectral_radius: dt must be >= 0");
  double rho = 0.0;
  for (const Complex& l : spectrum.eigenvalues) {
    const Complex denom = 1.0 - dt * l;
    if (std::abs(denom) <= 1e-14) {
      std::ostringstream msg;
      msg << "implicit amplification is singular: dt * lambda = 1 for lambda = " << l;
      throw SingularAmplification(msg.str());
    }
    rho = std::max(rho, 1.0 / std::abs(denom));
  }
  return rho;
}

double amplification_factor(const Spectrum& spectrum, Integrator integrator, double dt) {
  if (integrator == Integrator::implicit_euler) return implicit_spectral_radius(spectrum, dt);
  return explicit_spectral_radius(spectrum, dt, spectrum.id.degree + 1);
}

double periodic_cfl_max(int p, int cells) {
  if (p < 1 || p > 3) throw std::invalid_argument("periodic_cfl_max: degree must be 1, 2 or 3");
  const Spectrum s = eigenvalues(assemble_periodic<double>(p, cells, 1.0));
  const int order = p + 1;
  double lo = 0.0, hi = 1.0;
  while (is_stable(explicit_spectral_radius(s, hi, order))) hi *= 2.0;
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    if (is_stable(explicit_spectral_radius(s, mid, order)))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double cfl_reference(int p) {
  static std::once_flag once;
  static std::array<double, 4> cache{};
  std::call_once(once, [] {
    for (int q = 1; q <= 3; ++q) cache[q] = periodic_cfl_max(q);
  });
  if (p < 1 || p > 3) throw std::invalid_argument("cfl_reference: degree must be 1, 2 or 3");
  return cache[p];
}

double time_step(int p, double cfl, double dx, bool raw_dt) {
  if (cfl < 0.0) throw std::invalid_argument("time_step: CFL must be >= 0");
  return raw_dt ? cfl * dx : cfl * cfl_reference(p) * dx;
}

GlobalSystem<double> analysis_system(int p, double d_over_dx, int n_elements) {
  SbBoundarySpec<double> sb;
  sb.distance = d_over_dx;
  return assemble_shifted<double>(p, n_elements, 1.0, sb);
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2) throw std::invalid_argument("linspace: need at least two points");
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) v[i] = lo + (hi - lo) * double(i) / double(points - 1);
  v.back() = hi;
  return v;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("SBDG_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return unsigned(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

StabilityMap stability_map(const StabilityMapOptions& o) {
  if (o.d_points < 2 || o.cfl_points < 2)
    throw std::invalid_argument("stability_map: resolution must be >= 2 per axis");
  if (o.d_min < -1.0 || o.d_max > 1.0 || o.d_min > o.d_max)
    throw std::invalid_argument("stability_map: d range must lie in [-1, 1]");
  StabilityMap map;
  map.d_grid = linspace(o.d_min, o.d_max, o.d_points);
  map.cfl_grid = linspace(o.cfl_min, o.cfl_max, o.cfl_points);
  map.rho.resize(o.d_points, o.cfl_points);

  // Each d row needs one eigensolve; rows are independent.
  auto fill_row = [&](int i) {
    const double d = map.d_grid[i];
    Spectrum s;
    try {
      s = eigenvalues(analysis_system(o.degree, d, o.n_elements));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "stability_map: failure at d = " << d << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
    for (int j = 0; j < o.cfl_points; ++j) {
      const double cfl = map.cfl_grid[j];
      const double dt = time_step(o.degree, cfl, 1.0, o.raw_dt);
      try {
        map.rho(i, j) = amplification_factor(s, o.integrator, dt);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "stability_map: failure at (d, CFL) = (" << d << ", " << cfl << "): " << e.what();
        throw std::runtime_error(msg.str());
      }
    }
  };

  (void)cfl_reference(o.degree);
  const unsigned workers = std::min<unsigned>(o.threads ? o.threads : default_thread_count(),
                                              unsigned(o.d_points));
  if (workers <= 1) {
    for (int i = 0; i < o.d_points; ++i) fill_row(i);
    return map;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = int(w); i < o.d_points; i += int(workers)) fill_row(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return map;
}

std::vector<CurvePoint> amplification_curve(int p, Integrator integrator, double d_over_dx,
                                            const std::vector<double>& cfl_samples,
                                            int n_elements, bool raw_dt) {
  const Spectrum s = eigenvalues(analysis_system(p, d_over_dx, n_elements));
  std::vector<CurvePoint> curve;
  curve.reserve(cfl_samples.size());
  for (double cfl : cfl_samples)
    curve.push_back({cfl, amplification_factor(s, integrator, time_step(p, cfl, 1.0, raw_dt))});
  return curve;
}

}  // namespace sbdg
