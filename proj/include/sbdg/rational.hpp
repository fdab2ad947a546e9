#pragma once

// Exact rational scalar (GMP) usable as an Eigen scalar type.

#include <gmpxx.h>

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;
  using Literal = mpq_class;
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace sbdg {

using Rational = mpq_class;

/// Parses "a/b", "a" or a terminating decimal such as "-0.25" into lowest terms.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  std::string s = text;
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw std::invalid_argument("bad rational: " + text);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::string den = "1" + std::string(s.size() - dot - 1, '0');
    s = digits + "/" + den;
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + text);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
  q.canonicalize();
  return q;
}

}  // namespace sbdg
