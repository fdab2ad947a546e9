#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <Eigen/LU>
#include <cmath>
#include <random>

#include "sbdg/solver.hpp"
#include "sbdg/spectral.hpp"

using namespace sbdg;

namespace {

MatrixXd truncated_exponential(const MatrixXd& a, double dt, int order) {
  const Index n = a.rows();
  MatrixXd term = MatrixXd::Identity(n, n), sum = term;
  for (int k = 1; k <= order; ++k) {
    term = term * a * dt / double(k);
    sum += term;
  }
  return sum;
}

VectorXd random_vector(Index n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

GlobalSystem<double> steady_system(int p, int ne, double r) {
  return manufactured_system(ManufacturedCase::sine(), p, ne, r);
}

VectorXd discrete_steady_state(const GlobalSystem<double>& sys) {
  return sys.stiffness().partialPivLu().solve(-(sys.source_load + sys.boundary_load));
}

}  // namespace

TEST(ExplicitStep, ZeroStaysZero) {
  auto sys = assemble_periodic<double>(2, 4, 0.5);
  SimState s{VectorXd::Zero(sys.size()), 0.0, 0};
  const SimState next = step_explicit(s, sys, 0.01, 3);
  EXPECT_TRUE(next.modes.isZero(0.0));
  EXPECT_EQ(next.step_count, 1);
  EXPECT_DOUBLE_EQ(next.time, 0.01);
  EXPECT_THROW(step_explicit(s, sys, 0.01, 5), std::invalid_argument);
}

TEST(ExplicitStep, MatchesTruncatedExponential) {
  std::mt19937 rng(1);
  for (int p = 1; p <= 3; ++p)
    for (bool periodic : {true, false}) {
      const auto sys = periodic ? assemble_periodic<double>(p, 2, 1.0) : analysis_system(p, 0.35, 3);
      const int order = p + 1;
      const double dt = time_step(p, 0.7, 1.0);
      const VectorXd u = random_vector(sys.size(), rng);
      const VectorXd expected = truncated_exponential(sys.semi_discrete_operator(), dt, order) * u;
      const SimState next = step_explicit({u, 0.0, 0}, sys, dt, order);
      EXPECT_LE((next.modes - expected).cwiseAbs().maxCoeff(), 1e-13) << "p=" << p;
    }
}

TEST(ExplicitStep, SteadyStateIsFixedPoint) {
  for (int p = 1; p <= 3; ++p) {
    const auto sys = steady_system(p, 10, -0.4);
    const VectorXd u = discrete_steady_state(sys);
    for (double dt : {1e-3, 0.01, 0.1}) {
      const SimState next = step_explicit({u, 0.0, 0}, sys, dt, p + 1);
      EXPECT_LE((next.modes - u).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(ExplicitStep, BlowUpSignalled) {
  auto sys = assemble_periodic<double>(1, 2, 1.0);
  SimState s{VectorXd::Constant(sys.size(), 1e12), 0.0, 0};
  EXPECT_THROW(step_explicit(s, sys, 10.0, 2), BlowUpError);
  EXPECT_TRUE(blown_up(VectorXd::Constant(2, std::nan(""))));
  EXPECT_FALSE(blown_up(VectorXd::Constant(2, 1e11)));
}

TEST(ImplicitStep, ZeroTimeStepIsIdentity) {
  std::mt19937 rng(2);
  const auto sys = steady_system(2, 6, 0.3);
  const VectorXd u = random_vector(sys.size(), rng);
  EXPECT_LE((step_implicit_euler({u, 0.0, 0}, sys, 0.0).modes - u).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ImplicitStep, SteadyStateIsFixedPoint) {
  for (int p = 1; p <= 3; ++p) {
    const auto sys = steady_system(p, 10, 0.5);
    const VectorXd u = discrete_steady_state(sys);
    for (double dt : {1e-3, 1.0, 100.0}) {
      const SimState next = step_implicit_euler({u, 0.0, 0}, sys, dt);
      EXPECT_LE((next.modes - u).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(ImplicitStep, MatchesSpectralPrediction) {
  // One step applies (I - dt A)^{-1}; on an eigenvector it scales by 1/(1 - dt lambda).
  const auto sys = analysis_system(1, -0.5);
  const MatrixXd a = sys.semi_discrete_operator();
  Eigen::EigenSolver<MatrixXd> es(a);
  const double dt = 0.37;
  for (Index k = 0; k < a.rows(); ++k) {
    const Complex lambda = es.eigenvalues()(k);
    if (std::abs(lambda.imag()) > 0) continue;  // real eigenvectors only
    const VectorXd v = es.eigenvectors().col(k).real();
    const SimState next = step_implicit_euler({v, 0.0, 0}, sys, dt);
    EXPECT_LE((next.modes - v / (1.0 - dt * lambda.real())).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ImplicitStep, BlockSolveMatchesDenseLu) {
  std::mt19937 rng(4);
  for (int p = 1; p <= 3; ++p)
    for (double r : {-1.0, 0.2, 0.9}) {
      const auto sys = steady_system(p, 12, r);
      const double dt = 0.8 * sys.dx;
      const ImplicitEulerStepper stepper(sys, dt);
      const MatrixXd dense = sys.mass() - dt * sys.stiffness();
      for (int s = 0; s < 5; ++s) {
        const VectorXd rhs = random_vector(sys.size(), rng);
        const VectorXd x = stepper.solve(rhs);
        const VectorXd ref = dense.partialPivLu().solve(rhs);
        EXPECT_LE((x - ref).norm() / ref.norm(), 1e-12);
      }
    }
}

TEST(ImplicitStep, PeriodicUsesDenseSolve) {
  std::mt19937 rng(6);
  const auto sys = assemble_periodic<double>(2, 5, 0.2);
  const ImplicitEulerStepper stepper(sys, 0.05);
  const VectorXd rhs = random_vector(sys.size(), rng);
  const VectorXd x = stepper.solve(rhs);
  EXPECT_LE(((sys.mass() - 0.05 * sys.stiffness()) * x - rhs).norm(), 1e-12);
}

TEST(ImplicitStep, SingularBlockReported) {
  GlobalSystem<double> s = analysis_system(1, 1.0);
  EXPECT_NO_THROW(ImplicitEulerStepper(s, 0.5));
  s.boundary_block = s.element_mass;  // M - dt K_0 vanishes at dt = 1
  try {
    ImplicitEulerStepper bad(s, 1.0);
    FAIL() << "expected SingularBlockError";
  } catch (const SingularBlockError& e) {
    EXPECT_EQ(e.block, 0);
  }
}

TEST(L2Error, ZeroSolutionNorm) {
  const auto sys = steady_system(2, 20, 0.0);
  const double e = l2_error(VectorXd::Zero(sys.size()), sys, ManufacturedCase::sine().exact, 8);
  EXPECT_NEAR(e, 0.1, 1e-13);
}

TEST(L2Error, ProjectionFloor) {
  const auto sys = steady_system(3, 320, 0.0);
  const VectorXd u = project_function(ManufacturedCase::sine().exact, sys);
  EXPECT_LE(l2_error(u, sys, ManufacturedCase::sine().exact, 8), 5e-12);
  EXPECT_LE(l2_error(u, sys, ManufacturedCase::sine().exact), 5e-12);
}

TEST(L2Error, DecreasesWithDegree) {
  double previous = 1.0;
  for (int p = 1; p <= 3; ++p) {
    RunConfig c;
    c.degree = p;
    const RunResult r = run_to_steady(c);
    EXPECT_EQ(r.verdict, Verdict::steady);
    EXPECT_LT(r.l2_error, previous);
    previous = r.l2_error;
  }
}

TEST(RunToSteady, FittedBoundaryCell) {
  RunConfig c;
  c.degree = 1;
  c.n_elements = 20;
  const RunResult r = run_to_steady(c);
  EXPECT_EQ(r.verdict, Verdict::steady);
  EXPECT_NEAR(r.l2_error / 4.75e-4, 1.0, 0.02);
}

TEST(RunToSteady, SmallAndLargeShift) {
  RunConfig c;
  c.degree = 2;
  c.n_elements = 20;
  c.d_over_dx = 0.1;  // d = dx^2 with dx = 0.1
  EXPECT_EQ(run_to_steady(c).verdict, Verdict::steady);
  c.d_over_dx = 0.5;
  EXPECT_EQ(run_to_steady(c).verdict, Verdict::blow_up);
}

TEST(RunToSteady, SteadyStateIndependentOfTimeStep) {
  for (int p = 1; p <= 3; ++p) {
    RunConfig a;
    a.degree = p;
    a.d_over_dx = 0.05;
    a.cfl = 0.5;
    RunConfig b = a;
    b.cfl = 0.9;
    RunConfig imp = a;
    imp.integrator = Integrator::implicit_euler;
    imp.cfl = 50.0;
    const VectorXd ua = run_to_steady(a).state.modes;
    const VectorXd ub = run_to_steady(b).state.modes;
    const VectorXd ui = run_to_steady(imp).state.modes;
    EXPECT_LE((ua - ub).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LE((ua - ui).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(RunToSteady, ReachesDiscreteSteadyState) {
  RunConfig c;
  c.degree = 2;
  c.n_elements = 40;
  c.d_over_dx = -0.5;
  c.integrator = Integrator::implicit_euler;
  c.cfl = 100.0;
  const RunResult r = run_to_steady(c);
  EXPECT_EQ(r.verdict, Verdict::steady);
  EXPECT_LE((r.state.modes - discrete_steady_state(r.system)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RunToSteady, Validation) {
  RunConfig c;
  c.cfl = 0.0;
  EXPECT_THROW(run_to_steady(c), std::invalid_argument);
}

TEST(Convergence, ImplicitDMinusOneColumn) {
  RunConfig c;
  c.degree = 1;
  c.d_over_dx = -1.0;
  c.cfl = 1.0;
  c.integrator = Integrator::implicit_euler;
  const ConvergenceTable t = convergence_study(c, {20, 40, 80, 160});
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_FALSE(t.rows[0].eoa.has_value());
  EXPECT_NEAR(t.rows[0].l2_error / 5.98e-4, 1.0, 0.02);
  EXPECT_NEAR(*t.rows[1].eoa, 2.23, 0.02);
  EXPECT_NEAR(*t.rows[3].eoa, 2.01, 0.02);
}

TEST(Convergence, P2ExternalBoundaryValues) {
  // Discrete steady state for p = 2, d = -0.5; reached here implicitly since
  // explicit RK3 at normalised CFL 0.4 lies outside its stability region.
  RunConfig c;
  c.degree = 2;
  c.d_over_dx = -0.5;
  c.cfl = 100.0;
  c.integrator = Integrator::implicit_euler;
  const ConvergenceTable t = convergence_study(c, {20, 40, 80, 160, 320});
  const double reference[] = {7.43e-4, 9.34e-5, 1.17e-5, 1.46e-6, 1.83e-7};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(t.rows[i].l2_error / reference[i], 1.0, 0.02);
  EXPECT_NEAR(*t.rows[4].eoa, 3.0, 0.01);

  c.integrator = Integrator::explicit_rk;
  c.cfl = 0.4;
  try {
    convergence_study(c, {20, 40});
    FAIL() << "expected blow-up";
  } catch (const ConvergenceFailure& e) {
    EXPECT_EQ(e.n_elements, 20);
  }
}

TEST(Convergence, MeshesMustDouble) {
  RunConfig c;
  EXPECT_THROW(convergence_study(c, {20, 30}), std::invalid_argument);
  EXPECT_THROW(convergence_study(c, {}), std::invalid_argument);
}

TEST(Consistency, StabilityClassificationPredictsBlowUp) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ud(-1.0, 1.0), uc(0.02, 1.0), ui(0.1, 10.0);
  int checked = 0, unstable = 0;
  while (checked < 50) {
    const int p = 1 + int(rng() % 3);
    const bool implicit = rng() % 3 == 0;
    const double d = ud(rng);
    const double cfl = implicit ? ui(rng) : uc(rng);
    const Integrator integ = implicit ? Integrator::implicit_euler : Integrator::explicit_rk;
    const double rho = amplification_factor(eigenvalues(analysis_system(p, d)), integ,
                                            time_step(p, cfl, 1.0));
    if (std::abs(rho - 1.0) < 1e-3) continue;
    RunConfig c;
    c.degree = p;
    c.d_over_dx = d;
    c.cfl = cfl;
    c.integrator = integ;
    const double dt = time_step(p, cfl, 2.0 / c.n_elements);
    // Enough steps for round-off to grow past the blow-up threshold.
    c.max_time = rho > 1.0 ? dt * (80.0 / std::log(rho)) + 10.0 : 200.0;
    const RunResult r = run_to_steady(c);
    EXPECT_EQ(r.verdict == Verdict::blow_up, !is_stable(rho))
        << "p=" << p << " d=" << d << " cfl=" << cfl << " implicit=" << implicit << " rho=" << rho;
    if (rho > 1.0) ++unstable;
    ++checked;
  }
  EXPECT_GT(unstable, 5);
}
