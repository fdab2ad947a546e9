#include "sbdg/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sbdg {

QuadratureRule gauss_rule(int n) {
  if (n < 1 || n > 32) throw std::invalid_argument("gauss_rule: point count must be in [1, 32]");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 1;

  // Roots are symmetric; solve for the positive half and mirror.
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 1; j < n; ++j) {
        const double p2 = ((2 * j + 1) * x * p1 - j * p0) / (j + 1);
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw std::runtime_error("gauss_rule: Newton iteration did not converge for n = " +
                               std::to_string(n));
    // Re-evaluate the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = x;
    for (int j = 1; j < n; ++j) {
      const double p2 = ((2 * j + 1) * x * p1 - j * p0) / (j + 1);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[k] = -x;
    rule.nodes[n - 1 - k] = x;
    rule.weights[k] = w;
    rule.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const QuadratureRule& reference_rule() {
  static const QuadratureRule rule = gauss_rule(8);
  return rule;
}

}  // namespace sbdg
