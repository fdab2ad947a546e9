#pragma once

// Shifted-boundary correction and global block assembly of M dU/dt = K U + S + b
// on a uniform 1D mesh, either periodic or with an embedded Dirichlet boundary
// on the left.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <Eigen/LU>

#include "sbdg/basis.hpp"
#include "sbdg/types.hpp"

namespace sbdg {

/// Embedded Dirichlet boundary. The true boundary sits at
/// surrogate + distance; positive distance lies inside the first cell.
template <typename Scalar>
struct SbBoundarySpec {
  Scalar distance = Scalar(0);
  Scalar surrogate = Scalar(0);
  Scalar dirichlet_value = Scalar(0);  // u_D, constant in time

  Scalar true_position() const { return surrogate + distance; }
};

template <typename Scalar>
struct GlobalSystem {
  int degree = 0;
  int n_elements = 0;
  Scalar dx = Scalar(1);
  Scalar origin = Scalar(0);  // left-most mesh interface
  bool periodic = false;
  std::optional<SbBoundarySpec<Scalar>> boundary;

  Matrix<Scalar> element_mass;    // M_e, identical for every cell
  Matrix<Scalar> boundary_block;  // first diagonal block of K
  Matrix<Scalar> interior_block;  // K^s - K^R
  Matrix<Scalar> coupling_block;  // K^L, couples each cell to its left neighbour
  Vector<Scalar> boundary_load;   // b
  Vector<Scalar> source_load;     // S

  int dofs_per_element() const { return degree + 1; }
  int size() const { return dofs_per_element() * n_elements; }

  const Matrix<Scalar>& diagonal_block(int e) const {
    return e == 0 ? boundary_block : interior_block;
  }

  Matrix<Scalar> mass() const {
    const int n = dofs_per_element();
    Matrix<Scalar> m = Matrix<Scalar>::Zero(size(), size());
    for (int e = 0; e < n_elements; ++e) m.block(e * n, e * n, n, n) = element_mass;
    return m;
  }

  Matrix<Scalar> stiffness() const {
    const int n = dofs_per_element();
    Matrix<Scalar> k = Matrix<Scalar>::Zero(size(), size());
    for (int e = 0; e < n_elements; ++e) {
      k.block(e * n, e * n, n, n) = diagonal_block(e);
      if (e > 0) k.block(e * n, (e - 1) * n, n, n) = coupling_block;
    }
    if (periodic) k.block(0, (n_elements - 1) * n, n, n) = coupling_block;
    return k;
  }

  /// Dense M^{-1} K; the mass matrix is block diagonal, so this is exact
  /// block by block.
  Matrix<Scalar> semi_discrete_operator() const {
    const int n = dofs_per_element();
    Matrix<Scalar> a = stiffness();
    Matrix<Scalar> inv;
    if constexpr (std::is_floating_point_v<Scalar>) {
      inv = element_mass.inverse();
    } else {
      // Exact scalars: the Legendre mass matrix is diagonal.
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && element_mass(i, j) != Scalar(0))
            throw std::invalid_argument("semi_discrete_operator: exact path needs a diagonal mass");
      inv = Matrix<Scalar>::Zero(n, n);
      for (int i = 0; i < n; ++i) inv(i, i) = Scalar(1) / element_mass(i, i);
    }
    for (int e = 0; e < n_elements; ++e) {
      const Matrix<Scalar> rows = a.middleRows(e * n, n);
      a.middleRows(e * n, n) = inv * rows;
    }
    return a;
  }

  /// K v in O(N p) using the block structure.
  Vector<Scalar> apply_stiffness(const Vector<Scalar>& v) const {
    const int n = dofs_per_element();
    Vector<Scalar> out(size());
    for (int e = 0; e < n_elements; ++e) {
      auto seg = out.segment(e * n, n);
      seg.noalias() = diagonal_block(e) * v.segment(e * n, n);
      if (e > 0)
        seg.noalias() += coupling_block * v.segment((e - 1) * n, n);
      else if (periodic)
        seg.noalias() += coupling_block * v.segment((n_elements - 1) * n, n);
    }
    return out;
  }
};

/// Correction matrix K^SB for the boundary cell:
///   K^SB_ij = -P_i(-1) (P_j(-1 + 2 d/dx) - P_j(-1)).
template <typename Scalar>
Matrix<Scalar> sb_correction_matrix(int p, const Scalar& d_over_dx) {
  if (d_over_dx > Scalar(1) || d_over_dx < Scalar(-1))
    throw std::invalid_argument("sb_correction_matrix: |d/dx| must not exceed 1");
  const Vector<Scalar> left = legendre<Scalar>(p, Scalar(-1));
  const Vector<Scalar> at_boundary = legendre<Scalar>(p, Scalar(-1) + Scalar(2) * d_over_dx);
  const Vector<Scalar> jump = at_boundary - left;
  return -(left * jump.transpose());
}

/// Generic assembly from element operators in any basis. `correction` is
/// added to the first diagonal block; an empty correction means periodic.
template <typename Scalar>
GlobalSystem<Scalar> assemble_blocks(const ElementOperators<Scalar>& ops, int n_elements,
                                     bool periodic, const Matrix<Scalar>& correction) {
  if (n_elements < 2) throw std::invalid_argument("assembly requires at least two elements");
  GlobalSystem<Scalar> sys;
  sys.degree = ops.degree;
  sys.n_elements = n_elements;
  sys.dx = ops.dx;
  sys.periodic = periodic;
  sys.element_mass = ops.mass;
  sys.interior_block = ops.stiffness - ops.trace_right;
  sys.boundary_block = sys.interior_block;
  if (!periodic) sys.boundary_block += correction;
  sys.coupling_block = ops.trace_left;
  sys.boundary_load = Vector<Scalar>::Zero(sys.size());
  sys.source_load = Vector<Scalar>::Zero(sys.size());
  return sys;
}

template <typename Scalar>
GlobalSystem<Scalar> assemble_periodic(int p, int n_elements, const Scalar& dx) {
  if (n_elements < 2) throw std::invalid_argument("assemble_periodic: need at least two elements");
  return assemble_blocks<Scalar>(element_operators<Scalar>(p, dx), n_elements, true,
                                 Matrix<Scalar>());
}

template <typename Scalar>
GlobalSystem<Scalar> assemble_shifted(int p, int n_elements, const Scalar& dx,
                                      const SbBoundarySpec<Scalar>& sb) {
  if (n_elements < 2) throw std::invalid_argument("assemble_shifted: need at least two elements");
  if (!(dx > Scalar(0))) throw std::invalid_argument("assemble_shifted: dx must be positive");
  if (sb.distance > dx || sb.distance < -dx)
    throw std::invalid_argument("assemble_shifted: |d| must not exceed dx");
  const ElementOperators<Scalar> ops = element_operators<Scalar>(p, dx);
  GlobalSystem<Scalar> sys =
      assemble_blocks<Scalar>(ops, n_elements, false, sb_correction_matrix<Scalar>(p, sb.distance / dx));
  sys.origin = sb.surrogate;
  sys.boundary = sb;
  // u* = u(x~) - (u(x_bar) - u_D): the datum enters only the load.
  sys.boundary_load.head(ops.dofs()) = ops.left_values * sb.dirichlet_value;
  return sys;
}

/// Stationary manufactured problem u_x = s on [x_min, x_max].
struct ManufacturedCase {
  std::function<double(double)> exact;
  std::function<double(double)> source;
  double x_min = 0.0;
  double x_max = 2.0;

  /// u = 0.1 sin(pi x), s = 0.1 pi cos(pi x) on [0, 2].
  static ManufacturedCase sine();
};

/// S_{e,i} = int_{cell e} phi_i s(x) dx with the fixed 8-point rule.
VectorXd project_source(const ManufacturedCase& mcase, const GlobalSystem<double>& system);

/// Modal L2 projection of f onto the discrete space of `system`.
VectorXd project_function(const std::function<double(double)>& f,
                          const GlobalSystem<double>& system);

/// Centre-to-interface map of cell e: x(xi) = origin + dx (e + (xi + 1)/2).
inline double physical_coordinate(const GlobalSystem<double>& system, int e, double xi) {
  return system.origin + system.dx * (e + 0.5 * (xi + 1.0));
}

/// Shifted-boundary system on the manufactured case mesh: uniform cells over
/// [x_min, x_max], true boundary at x_min + d, datum u_D = exact(x_min + d),
/// source load projected.
GlobalSystem<double> manufactured_system(const ManufacturedCase& mcase, int p, int n_elements,
                                         double d_over_dx);

}  // namespace sbdg
