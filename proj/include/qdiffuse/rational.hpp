#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace qdiffuse {

/// Exact fraction used on enumeration paths.
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace qdiffuse
