#pragma once

// Exact characteristic polynomials of M^{-1} K by Faddeev-LeVerrier.

#include <string>
#include <vector>

#include "sbdg/rational.hpp"
#include "sbdg/types.hpp"

namespace sbdg {

/// Coefficients c_0..c_n (ascending, c_n = 1) of det(lambda I - A).
/// Needs exact division by integers, so Scalar should be a field.
template <typename Scalar>
std::vector<Scalar> faddeev_leverrier(const Matrix<Scalar>& a) {
  const Index n = a.rows();
  std::vector<Scalar> c(n + 1, Scalar(0));
  c[n] = Scalar(1);
  Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
  for (Index k = 1; k <= n; ++k) {
    m.diagonal().array() += c[n - k + 1];
    const Matrix<Scalar> am = a * m;
    c[n - k] = -Scalar(am.trace()) / Scalar(k);
    m = am;
  }
  return c;
}

struct CharPoly {
  std::vector<Rational> coefficients;  // ascending powers, monic
  Rational d;

  int degree() const { return int(coefficients.size()) - 1; }
  Complex evaluate(Complex lambda) const;
  std::string to_string() const;
};

/// Monic characteristic polynomial of the shifted system with dx = 1 and
/// d/dx = d. Exact for any degree; intended for p <= 2 and Ne <= 3.
CharPoly char_poly_exact(int p, int n_elements, const Rational& d);

/// Ascending coefficients of the product of two polynomials.
std::vector<Rational> poly_multiply(const std::vector<Rational>& a, const std::vector<Rational>& b);

}  // namespace sbdg
