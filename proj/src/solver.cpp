#include "sbdg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sbdg/spectral.hpp"

namespace sbdg {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::steady: return "steady";
    case Verdict::max_time: return "max_time";
    case Verdict::blow_up: return "blow_up";
  }
  return "unknown";
}

bool blown_up(const VectorXd& modes) {
  if (!modes.allFinite()) return true;
  return modes.size() > 0 && modes.cwiseAbs().maxCoeff() > kBlowUpThreshold;
}

namespace {

MatrixXd inverse_mass(const GlobalSystem<double>& system) {
  return system.element_mass.inverse();
}

// Applies the block-diagonal M^{-1} in place.
void apply_inverse_mass(const GlobalSystem<double>& system, const MatrixXd& minv, VectorXd& v) {
  const int n = system.dofs_per_element();
  for (int e = 0; e < system.n_elements; ++e) {
    const VectorXd seg = v.segment(e * n, n);
    v.segment(e * n, n).noalias() = minv * seg;
  }
}

VectorXd derivative(const GlobalSystem<double>& system, const MatrixXd& minv,
                    const VectorXd& forcing, const VectorXd& u) {
  VectorXd f = system.apply_stiffness(u) + forcing;
  apply_inverse_mass(system, minv, f);
  return f;
}

VectorXd rk_update(const GlobalSystem<double>& system, const MatrixXd& minv,
                   const VectorXd& forcing, const VectorXd& u, const VectorXd& k1, double dt,
                   int order) {
  auto f = [&](const VectorXd& v) { return derivative(system, minv, forcing, v); };
  switch (order) {
    case 2: {
      const VectorXd k2 = f(u + dt * k1);
      return u + 0.5 * dt * (k1 + k2);
    }
    case 3: {
      const VectorXd u1 = u + dt * k1;
      const VectorXd u2 = 0.75 * u + 0.25 * (u1 + dt * f(u1));
      return u / 3.0 + (2.0 / 3.0) * (u2 + dt * f(u2));
    }
    case 4: {
      const VectorXd k2 = f(u + 0.5 * dt * k1);
      const VectorXd k3 = f(u + 0.5 * dt * k2);
      const VectorXd k4 = f(u + dt * k3);
      return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    default:
      throw std::invalid_argument("step_explicit: order must be 2, 3 or 4");
  }
}

}  // namespace

VectorXd time_derivative(const GlobalSystem<double>& system, const VectorXd& u) {
  return derivative(system, inverse_mass(system), system.source_load + system.boundary_load, u);
}

SimState step_explicit(const SimState& state, const GlobalSystem<double>& system, double dt,
                       int order) {
  if (order < 2 || order > 4) throw std::invalid_argument("step_explicit: order must be 2, 3 or 4");
  const MatrixXd minv = inverse_mass(system);
  const VectorXd forcing = system.source_load + system.boundary_load;
  const VectorXd k1 = derivative(system, minv, forcing, state.modes);
  SimState next{rk_update(system, minv, forcing, state.modes, k1, dt, order), state.time + dt,
                state.step_count + 1};
  if (blown_up(next.modes))
    throw BlowUpError("step_explicit: blow-up at step " + std::to_string(next.step_count));
  return next;
}

namespace {

Eigen::PartialPivLU<MatrixXd> factor_block(const MatrixXd& a, int block) {
  Eigen::PartialPivLU<MatrixXd> lu(a);
  if (a.isZero(0.0) || !(lu.rcond() > 1e-14)) {
    std::ostringstream msg;
    msg << "implicit Euler: singular diagonal block " << block;
    throw SingularBlockError(msg.str(), block);
  }
  return lu;
}

}  // namespace

ImplicitEulerStepper::ImplicitEulerStepper(const GlobalSystem<double>& system, double dt)
    : system_(&system), dt_(dt) {
  if (dt < 0.0) throw std::invalid_argument("implicit Euler: dt must be >= 0");
  if (system.periodic) {
    const MatrixXd a = system.mass() - dt * system.stiffness();
    dense_.emplace(a);
    if (a.isZero(0.0) || !(dense_->rcond() > 1e-14))
      throw SingularBlockError("implicit Euler: singular periodic system", -1);
    return;
  }
  first_ = factor_block(system.element_mass - dt * system.boundary_block, 0);
  interior_ = factor_block(system.element_mass - dt * system.interior_block, 1);
}

VectorXd ImplicitEulerStepper::solve(const VectorXd& rhs) const {
  const GlobalSystem<double>& s = *system_;
  if (dense_) return dense_->solve(rhs);
  const int n = s.dofs_per_element();
  VectorXd x(s.size());
  x.head(n) = first_.solve(rhs.head(n));
  for (int e = 1; e < s.n_elements; ++e) {
    const VectorXd r = rhs.segment(e * n, n) + dt_ * (s.coupling_block * x.segment((e - 1) * n, n));
    x.segment(e * n, n) = interior_.solve(r);
  }
  return x;
}

SimState ImplicitEulerStepper::step(const SimState& state) const {
  const GlobalSystem<double>& s = *system_;
  const int n = s.dofs_per_element();
  VectorXd rhs = dt_ * (s.source_load + s.boundary_load);
  for (int e = 0; e < s.n_elements; ++e)
    rhs.segment(e * n, n).noalias() += s.element_mass * state.modes.segment(e * n, n);
  SimState next{solve(rhs), state.time + dt_, state.step_count + 1};
  if (blown_up(next.modes))
    throw BlowUpError("implicit Euler: blow-up at step " + std::to_string(next.step_count));
  return next;
}

SimState step_implicit_euler(const SimState& state, const GlobalSystem<double>& system, double dt) {
  return ImplicitEulerStepper(system, dt).step(state);
}

double evaluate(const VectorXd& modes, const GlobalSystem<double>& system, int e, double xi) {
  const int n = system.dofs_per_element();
  return legendre<double>(system.degree, xi).dot(modes.segment(e * n, n));
}

double l2_error(const VectorXd& modes, const GlobalSystem<double>& system,
                const std::function<double(double)>& exact, int points) {
  const QuadratureRule rule = gauss_rule(points > 0 ? points : system.degree + 1);
  double sum = 0.0;
  for (int e = 0; e < system.n_elements; ++e)
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.nodes[q];
      const double diff = evaluate(modes, system, e, xi) - exact(physical_coordinate(system, e, xi));
      sum += rule.weights[q] * 0.5 * system.dx * diff * diff;
    }
  return std::sqrt(sum);
}

RunResult run_to_steady(const RunConfig& c) {
  if (!(c.cfl > 0.0)) throw std::invalid_argument("run_to_steady: CFL must be positive");
  if (c.residual_tol < 0.0) throw std::invalid_argument("run_to_steady: residual_tol must be >= 0");
  RunResult r;
  r.system = manufactured_system(c.mcase, c.degree, c.n_elements, c.d_over_dx);
  const GlobalSystem<double>& sys = r.system;
  const double dt = time_step(c.degree, c.cfl, sys.dx, c.raw_dt);
  const MatrixXd minv = inverse_mass(sys);
  const VectorXd forcing = sys.source_load + sys.boundary_load;

  VectorXd scaled = forcing;
  apply_inverse_mass(sys, minv, scaled);
  double scale = scaled.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) scale = 1.0;
  const double tol = c.residual_tol > 0.0 ? c.residual_tol : 1e-13 * scale;
  // Once the residual has settled this close to round-off and stops
  // improving, further steps cannot reduce it.
  const double plateau = std::max(tol, 1e-9 * scale);
  const long window = std::max<long>(500, long(std::ceil(4.0 * (c.mcase.x_max - c.mcase.x_min) / dt)));

  SimState state{project_function(c.mcase.exact, sys), 0.0, 0};
  std::optional<ImplicitEulerStepper> implicit;
  if (c.integrator == Integrator::implicit_euler) implicit.emplace(sys, dt);

  double best = std::numeric_limits<double>::infinity();
  long best_step = 0;
  VectorXd k1 = derivative(sys, minv, forcing, state.modes);
  r.residual = k1.cwiseAbs().maxCoeff();
  r.verdict = Verdict::max_time;
  while (true) {
    if (r.residual < tol) {
      r.verdict = Verdict::steady;
      break;
    }
    if (r.residual < 0.5 * best) {
      best = r.residual;
      best_step = state.step_count;
    } else if (r.residual <= plateau && state.step_count - best_step > window) {
      r.verdict = Verdict::steady;
      break;
    }
    if (state.time >= c.max_time) break;
    VectorXd next;
    if (implicit) {
      try {
        state = implicit->step(state);
      } catch (const BlowUpError&) {
        r.verdict = Verdict::blow_up;
        break;
      }
      k1 = derivative(sys, minv, forcing, state.modes);
    } else {
      next = rk_update(sys, minv, forcing, state.modes, k1, dt, c.degree + 1);
      state = SimState{std::move(next), state.time + dt, state.step_count + 1};
      if (blown_up(state.modes)) {
        r.verdict = Verdict::blow_up;
        break;
      }
      k1 = derivative(sys, minv, forcing, state.modes);
    }
    r.residual = k1.cwiseAbs().maxCoeff();
    if (!std::isfinite(r.residual)) {
      r.verdict = Verdict::blow_up;
      break;
    }
  }
  r.state = state;
  r.l2_error = r.verdict == Verdict::blow_up
                   ? std::numeric_limits<double>::infinity()
                   : l2_error(state.modes, sys, c.mcase.exact, c.error_points);
  return r;
}

ConvergenceTable convergence_study(const RunConfig& config, const std::vector<int>& meshes) {
  if (meshes.empty()) throw std::invalid_argument("convergence_study: no meshes");
  for (std::size_t i = 1; i < meshes.size(); ++i)
    if (meshes[i] != 2 * meshes[i - 1])
      throw std::invalid_argument("convergence_study: each mesh must double the previous one");
  ConvergenceTable table;
  for (int ne : meshes) {
    RunConfig c = config;
    c.n_elements = ne;
    const RunResult r = run_to_steady(c);
    if (r.verdict == Verdict::blow_up)
      throw ConvergenceFailure("convergence_study: blow-up at Ne = " + std::to_string(ne), ne);
    ConvergenceRow row{ne, r.l2_error, std::nullopt, r.verdict};
    if (!table.rows.empty()) row.eoa = std::log2(table.rows.back().l2_error / r.l2_error);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace sbdg
