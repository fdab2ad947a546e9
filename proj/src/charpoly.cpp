#include "sbdg/charpoly.hpp"

#include <sstream>

#include "sbdg/operators.hpp"

namespace sbdg {

Complex CharPoly::evaluate(Complex lambda) const {
  Complex acc(0.0, 0.0);
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
    acc = acc * lambda + it->get_d();
  return acc;
}

std::string CharPoly::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Rational& c = coefficients[k];
    if (c == 0) continue;
    if (!first) out << (c < 0 ? " - " : " + ");
    else if (c < 0) out << "-";
    const Rational mag = abs(c);
    if (mag != 1 || k == 0) out << mag.get_str();
    if (k > 0) out << (mag != 1 ? "*" : "") << "x" << (k > 1 ? "^" + std::to_string(k) : "");
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

CharPoly char_poly_exact(int p, int n_elements, const Rational& d) {
  SbBoundarySpec<Rational> sb;
  sb.distance = d;
  const GlobalSystem<Rational> sys = assemble_shifted<Rational>(p, n_elements, Rational(1), sb);
  CharPoly cp;
  cp.coefficients = faddeev_leverrier<Rational>(sys.semi_discrete_operator());
  cp.d = d;
  return cp;
}

std::vector<Rational> poly_multiply(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Rational> out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace sbdg
