#pragma once

#include <complex>
#include <Eigen/Core>

namespace sbdg {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Complex = std::complex<double>;
using VectorXc = Vector<Complex>;

enum class Integrator { explicit_rk, implicit_euler };

}  // namespace sbdg
