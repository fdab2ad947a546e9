#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "sbdg/eigensolver.hpp"
#include "sbdg/spectral.hpp"
#include "test_util.hpp"

using namespace sbdg;

namespace {

VectorXc reference(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a, false);
  return es.eigenvalues();
}

}  // namespace

TEST(DenseEigenvalues, Trivial) {
  EXPECT_EQ(dense_eigenvalues<double>(MatrixXd(0, 0)).size(), 0);
  MatrixXd one(1, 1);
  one << -3.5;
  EXPECT_EQ(dense_eigenvalues<double>(one)(0), Complex(-3.5, 0));
  EXPECT_THROW(dense_eigenvalues<double>(MatrixXd(2, 3)), std::invalid_argument);
  MatrixXd bad = MatrixXd::Identity(3, 3);
  bad(1, 2) = std::nan("");
  EXPECT_THROW(dense_eigenvalues<double>(bad), EigenSolverError);
}

TEST(DenseEigenvalues, Rotation) {
  MatrixXd r(2, 2);
  r << 0, -2, 2, 0;
  const VectorXc e = dense_eigenvalues<double>(r);
  EXPECT_NEAR(std::abs(e(0) - Complex(0, -2)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e(1) - Complex(0, 2)), 0.0, 1e-14);
}

TEST(DenseEigenvalues, SortedByRealThenImaginary) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  MatrixXd a(12, 12);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  const VectorXc e = dense_eigenvalues<double>(a);
  for (Index i = 1; i < e.size(); ++i) {
    EXPECT_LE(e(i - 1).real(), e(i).real());
    if (e(i - 1).real() == e(i).real()) EXPECT_LE(e(i - 1).imag(), e(i).imag());
  }
}

TEST(DenseEigenvalues, MatchesEigenOnRandomMatrices) {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 40;
    MatrixXd a(n, n);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    if (trial % 3 == 0) a = a * a.transpose();  // symmetric, real spectrum
    const VectorXc ours = dense_eigenvalues<double>(a);
    EXPECT_LE(test::spectrum_distance(ours, reference(a)), 1e-9 * std::max(1.0, a.norm()))
        << "trial " << trial;
  }
}

TEST(DenseEigenvalues, MatchesEigenOnDgOperators) {
  // Two cells keep the spectra simple away from d = 0; larger rings are
  // checked periodically where the spectrum is simple.
  for (int p = 1; p <= 3; ++p) {
    for (int k = 0; k <= 40; ++k) {
      const double d = -1.0 + 0.05 * k;
      if (std::abs(d) < 1e-12) continue;
      const MatrixXd a = analysis_system(p, d).semi_discrete_operator();
      EXPECT_LE(test::spectrum_distance(dense_eigenvalues<double>(a), reference(a)), 1e-9)
          << "p=" << p << " d=" << d;
    }
    for (int ne : {3, 8, 16}) {
      const MatrixXd a = assemble_periodic<double>(p, ne, 1.0).semi_discrete_operator();
      EXPECT_LE(test::spectrum_distance(dense_eigenvalues<double>(a), reference(a)), 1e-9);
    }
  }
}

TEST(DenseEigenvalues, CompanionMatrixRoots) {
  // Roots 1..8 of prod (x - k).
  std::vector<double> c{1.0};
  for (int k = 1; k <= 8; ++k) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= k * c[i];
    }
    c = next;
  }
  MatrixXd comp = MatrixXd::Zero(8, 8);
  for (int i = 1; i < 8; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < 8; ++i) comp(i, 7) = -c[i];
  const VectorXc e = dense_eigenvalues<double>(comp);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(std::abs(e(k) - Complex(k + 1, 0)), 0.0, 1e-7);
}
