#pragma once

// Modal Legendre basis on the reference element [-1, 1] and the element-local
// DG matrices for unit-speed upwind advection.

#include <stdexcept>
#include <type_traits>
#include <vector>

#include "sbdg/types.hpp"

namespace sbdg {

/// [P_0(xi), ..., P_p(xi)] with P_j(1) = 1. Defined for every real xi; the
/// shifted-boundary correction evaluates outside the reference element.
template <typename Scalar>
Vector<Scalar> legendre(int p, const Scalar& xi) {
  if (p < 0) throw std::invalid_argument("legendre: degree must be >= 0");
  Vector<Scalar> v(p + 1);
  v(0) = Scalar(1);
  if (p >= 1) v(1) = xi;
  for (int j = 1; j < p; ++j)
    v(j + 1) = (Scalar(2 * j + 1) * xi * v(j) - Scalar(j) * v(j - 1)) / Scalar(j + 1);
  return v;
}

/// [P'_0(xi), ..., P'_p(xi)] via P'_{j+1} = P'_{j-1} + (2j+1) P_j.
template <typename Scalar>
Vector<Scalar> legendre_derivative(int p, const Scalar& xi) {
  const Vector<Scalar> v = legendre<Scalar>(p, xi);
  Vector<Scalar> d(p + 1);
  d(0) = Scalar(0);
  if (p >= 1) d(1) = Scalar(1);
  for (int j = 1; j < p; ++j) d(j + 1) = d(j - 1) + Scalar(2 * j + 1) * v(j);
  return d;
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int exactness = 0;  // highest monomial degree integrated exactly

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule with n points (1 <= n <= 32), nodes ascending.
QuadratureRule gauss_rule(int n);

/// Fixed rule used for non-polynomial integrands (source loads, projections).
const QuadratureRule& reference_rule();

template <typename Scalar>
struct ElementOperators {
  int degree = 0;
  Scalar dx = Scalar(1);
  Matrix<Scalar> mass;         // int phi_i phi_j dx
  Matrix<Scalar> stiffness;    // int phi_i' phi_j dx
  Matrix<Scalar> trace_right;  // phi_i(x_{e+1/2}) phi_j(x_{e+1/2})
  Matrix<Scalar> trace_left;   // phi_i(x_{e-1/2}) phi^{e-1}_j(x_{e-1/2})
  Vector<Scalar> left_values;  // phi_i(xi = -1)
  Vector<Scalar> right_values; // phi_i(xi = +1)

  int dofs() const { return degree + 1; }
};

/// Element matrices for a uniform cell of width dx. Floating-point scalars use
/// a (p+1)-point Gauss rule; exact scalars use the closed-form Legendre
/// integrals so that every entry stays exact.
template <typename Scalar>
ElementOperators<Scalar> element_operators(int p, const Scalar& dx) {
  if (p < 0) throw std::invalid_argument("element_operators: degree must be >= 0");
  if (!(dx > Scalar(0))) throw std::invalid_argument("element_operators: dx must be positive");
  const int n = p + 1;
  ElementOperators<Scalar> ops;
  ops.degree = p;
  ops.dx = dx;
  ops.mass = Matrix<Scalar>::Zero(n, n);
  ops.stiffness = Matrix<Scalar>::Zero(n, n);

  if constexpr (std::is_floating_point_v<Scalar>) {
    const QuadratureRule rule = gauss_rule(n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Scalar xi = Scalar(rule.nodes[q]);
      const Scalar w = Scalar(rule.weights[q]);
      const Vector<Scalar> phi = legendre<Scalar>(p, xi);
      const Vector<Scalar> dphi = legendre_derivative<Scalar>(p, xi);
      ops.mass.noalias() += (w * dx / Scalar(2)) * phi * phi.transpose();
      // d/dx = (2/dx) d/dxi cancels the Jacobian dx/2.
      ops.stiffness.noalias() += w * dphi * phi.transpose();
    }
  } else {
    for (int i = 0; i < n; ++i) {
      ops.mass(i, i) = dx / Scalar(2 * i + 1);
      for (int j = 0; j < i; ++j)
        if ((i + j) % 2 == 1) ops.stiffness(i, j) = Scalar(2);
    }
  }

  ops.right_values = legendre<Scalar>(p, Scalar(1));
  ops.left_values = legendre<Scalar>(p, Scalar(-1));
  ops.trace_right = ops.right_values * ops.right_values.transpose();
  ops.trace_left = ops.left_values * ops.right_values.transpose();
  return ops;
}

}  // namespace sbdg
