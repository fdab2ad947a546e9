#include "sbdg/operators.hpp"

#include <numbers>

#include <Eigen/Cholesky>

namespace sbdg {

ManufacturedCase ManufacturedCase::sine() {
  ManufacturedCase c;
  c.exact = [](double x) { return 0.1 * std::sin(std::numbers::pi * x); };
  c.source = [](double x) { return 0.1 * std::numbers::pi * std::cos(std::numbers::pi * x); };
  c.x_min = 0.0;
  c.x_max = 2.0;
  return c;
}

namespace {

// int_{cell e} phi_i f dx for every cell, with the fixed reference rule.
VectorXd moments(const std::function<double(double)>& f, const GlobalSystem<double>& system) {
  const QuadratureRule& rule = reference_rule();
  const int n = system.dofs_per_element();
  VectorXd out = VectorXd::Zero(system.size());
  for (int e = 0; e < system.n_elements; ++e) {
    auto seg = out.segment(e * n, n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xi = rule.nodes[q];
      const double w = rule.weights[q] * 0.5 * system.dx;
      seg += (w * f(physical_coordinate(system, e, xi))) * legendre<double>(system.degree, xi);
    }
  }
  return out;
}

}  // namespace

VectorXd project_source(const ManufacturedCase& mcase, const GlobalSystem<double>& system) {
  return moments(mcase.source, system);
}

VectorXd project_function(const std::function<double(double)>& f,
                          const GlobalSystem<double>& system) {
  const int n = system.dofs_per_element();
  VectorXd c = moments(f, system);
  for (int e = 0; e < system.n_elements; ++e)
    c.segment(e * n, n) = system.element_mass.ldlt().solve(c.segment(e * n, n));
  return c;
}

GlobalSystem<double> manufactured_system(const ManufacturedCase& mcase, int p, int n_elements,
                                         double d_over_dx) {
  if (n_elements < 2) throw std::invalid_argument("manufactured_system: need at least two elements");
  const double dx = (mcase.x_max - mcase.x_min) / n_elements;
  SbBoundarySpec<double> sb;
  sb.distance = d_over_dx * dx;
  sb.surrogate = mcase.x_min;
  sb.dirichlet_value = mcase.exact(sb.true_position());
  GlobalSystem<double> sys = assemble_shifted<double>(p, n_elements, dx, sb);
  sys.source_load = project_source(mcase, sys);
  return sys;
}

}  // namespace sbdg
