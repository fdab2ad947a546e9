#pragma once

// Dense real nonsymmetric eigenvalues: diagonal balancing, Householder
// reduction to upper Hessenberg form and Francis double-shift QR.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "sbdg/types.hpp"

namespace sbdg {

struct EigenSolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Radix-2 diagonal similarity scaling so that row and column norms match.
template <typename Real>
void balance(Matrix<Real>& a) {
  const Real radix = Real(2);
  const Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Index i = 0; i < n; ++i) {
      Real col = 0, row = 0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(a(j, i));
        row += std::abs(a(i, j));
      }
      if (col == Real(0) || row == Real(0)) continue;
      const Real total = col + row;
      Real f = 1;
      Real g = row / radix;
      while (col < g) {
        f *= radix;
        col *= radix * radix;
      }
      g = row * radix;
      while (col > g) {
        f /= radix;
        col /= radix * radix;
      }
      if ((col + row) / f < Real(0.95) * total) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

/// Reflector I - beta v v^T with v(0) = 1 that maps x onto a multiple of e_0.
template <typename Real, typename Vec>
Real householder(const Vec& x, Vec& v) {
  const Real alpha = x.norm();
  v = x;
  if (alpha == Real(0)) {
    v.setZero();
    v(0) = 1;
    return Real(0);
  }
  const Real head = x(0) >= Real(0) ? x(0) + alpha : x(0) - alpha;
  v /= head;
  v(0) = 1;
  return Real(2) / v.squaredNorm();
}

template <typename Real>
void to_hessenberg(Matrix<Real>& a) {
  const Index n = a.rows();
  for (Index k = 0; k + 2 < n; ++k) {
    const Index m = n - k - 1;
    Vector<Real> x = a.col(k).tail(m);
    if (x.tail(m - 1).squaredNorm() == Real(0)) continue;
    Vector<Real> v(m);
    const Real beta = householder<Real>(x, v);
    // A <- P A P with P = I - beta v v^T acting on rows/cols k+1..n-1.
    Vector<Real> w = beta * (v.transpose() * a.bottomRows(m)).transpose();
    a.bottomRows(m).noalias() -= v * w.transpose();
    w = beta * (a.rightCols(m) * v);
    a.rightCols(m).noalias() -= w * v.transpose();
    a.col(k).tail(m - 1).setZero();
  }
}

template <typename Real>
void block_2x2(Real a, Real b, Real c, Real d, std::complex<Real>& l1, std::complex<Real>& l2) {
  const Real p = Real(0.5) * (a - d);
  const Real bc = b * c;
  const Real disc = p * p + bc;
  if (disc >= Real(0)) {
    const Real root = std::sqrt(disc);
    const Real z = p + (p >= Real(0) ? root : -root);
    const Real first = d + z;
    const Real second = z != Real(0) ? d - bc / z : d;
    l1 = {first, 0};
    l2 = {second, 0};
  } else {
    const Real mid = Real(0.5) * (a + d);
    const Real im = std::sqrt(-disc);
    l1 = {mid, im};
    l2 = {mid, -im};
  }
}

}  // namespace detail

/// Eigenvalues of a dense real matrix, sorted by (Re, Im).
/// `tol` is the relative size below which a subdiagonal entry is deflated.
template <typename Real>
Vector<std::complex<Real>> dense_eigenvalues(Matrix<Real> a, Real tol = Real(1e-12)) {
  using Cplx = std::complex<Real>;
  if (a.rows() != a.cols()) throw std::invalid_argument("dense_eigenvalues: matrix must be square");
  const Index n = a.rows();
  Vector<Cplx> eig(n);
  if (n == 0) return eig;
  if (!a.allFinite()) throw EigenSolverError("dense_eigenvalues: non-finite matrix entry");

  detail::balance(a);
  detail::to_hessenberg(a);

  Real norm = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = std::max<Index>(i - 1, 0); j < n; ++j) norm += std::abs(a(i, j));

  const long max_iterations = 100L * n;
  long total = 0;
  int since_deflation = 0;
  Index hi = n - 1;
  while (hi >= 0) {
    // Locate the start of the unreduced trailing block.
    Index lo = hi;
    while (lo > 0) {
      Real s = std::abs(a(lo - 1, lo - 1)) + std::abs(a(lo, lo));
      if (s == Real(0)) s = norm;
      if (std::abs(a(lo, lo - 1)) <= tol * s) {
        a(lo, lo - 1) = 0;
        break;
      }
      --lo;
    }

    if (lo == hi) {
      eig(hi) = Cplx(a(hi, hi), 0);
      --hi;
      since_deflation = 0;
      continue;
    }
    if (lo == hi - 1) {
      detail::block_2x2(a(hi - 1, hi - 1), a(hi - 1, hi), a(hi, hi - 1), a(hi, hi), eig(hi - 1),
                        eig(hi));
      hi -= 2;
      since_deflation = 0;
      continue;
    }

    if (++total > max_iterations)
      throw EigenSolverError("dense_eigenvalues: QR iteration did not converge after " +
                             std::to_string(max_iterations) + " sweeps");

    // Shift polynomial x^2 - trace x + det from the trailing 2x2 block, with an
    // ad hoc shift every tenth sweep to break cycles.
    Real trace, det;
    ++since_deflation;
    if (since_deflation % 10 == 0) {
      const Real s = std::abs(a(hi, hi - 1)) + std::abs(a(hi - 1, hi - 2));
      trace = Real(1.5) * s;
      det = s * s;
    } else {
      trace = a(hi - 1, hi - 1) + a(hi, hi);
      det = a(hi - 1, hi - 1) * a(hi, hi) - a(hi - 1, hi) * a(hi, hi - 1);
    }

    // First column of (H - s1)(H - s2) restricted to the active window.
    Real x = a(lo, lo) * a(lo, lo) + a(lo, lo + 1) * a(lo + 1, lo) - trace * a(lo, lo) + det;
    Real y = a(lo + 1, lo) * (a(lo, lo) + a(lo + 1, lo + 1) - trace);
    Real z = a(lo + 1, lo) * a(lo + 2, lo + 1);

    // Chase the bulge down the window [lo, hi].
    for (Index k = lo; k + 1 < hi; ++k) {
      Eigen::Matrix<Real, 3, 1> v3, x3(x, y, z);
      const Real beta = detail::householder<Real>(x3, v3);
      if (beta != Real(0)) {
        const Index c0 = std::max(lo, k - 1);
        for (Index j = c0; j <= hi; ++j) {
          const Real t = beta * (a(k, j) + v3(1) * a(k + 1, j) + v3(2) * a(k + 2, j));
          a(k, j) -= t;
          a(k + 1, j) -= t * v3(1);
          a(k + 2, j) -= t * v3(2);
        }
        const Index r1 = std::min(hi, k + 3);
        for (Index i = lo; i <= r1; ++i) {
          const Real t = beta * (a(i, k) + v3(1) * a(i, k + 1) + v3(2) * a(i, k + 2));
          a(i, k) -= t;
          a(i, k + 1) -= t * v3(1);
          a(i, k + 2) -= t * v3(2);
        }
      }
      x = a(k + 1, k);
      y = a(k + 2, k);
      z = k + 3 <= hi ? a(k + 3, k) : Real(0);
      if (k > lo) {
        // Keep the Hessenberg pattern exact below the bulge.
        a(k + 1, k - 1) = 0;
        a(k + 2, k - 1) = 0;
      }
    }
    // Final 2x2 reflector on rows hi-1, hi.
    {
      Eigen::Matrix<Real, 2, 1> v2, x2(x, y);
      const Real beta = detail::householder<Real>(x2, v2);
      const Index k = hi - 1;
      if (beta != Real(0)) {
        for (Index j = std::max(lo, k - 1); j <= hi; ++j) {
          const Real t = beta * (a(k, j) + v2(1) * a(k + 1, j));
          a(k, j) -= t;
          a(k + 1, j) -= t * v2(1);
        }
        for (Index i = lo; i <= hi; ++i) {
          const Real t = beta * (a(i, k) + v2(1) * a(i, k + 1));
          a(i, k) -= t;
          a(i, k + 1) -= t * v2(1);
        }
      }
      if (k - 1 >= lo) a(k + 1, k - 1) = 0;
    }
  }

  std::sort(eig.data(), eig.data() + n, [](const Cplx& l, const Cplx& r) {
    if (l.real() != r.real()) return l.real() < r.real();
    return l.imag() < r.imag();
  });
  return eig;
}

}  // namespace sbdg
