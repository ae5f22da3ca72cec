#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "errors.hpp"

namespace soltile {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Closed interval with exact endpoints.
struct RationalInterval {
  Rational lo;
  Rational hi;

  friend bool operator==(const RationalInterval&, const RationalInterval&) = default;
};

inline Rational rational_pow(const Rational& base, int exponent) {
  Rational result = 1;
  Rational factor = exponent >= 0 ? base : Rational(1) / base;
  unsigned e = static_cast<unsigned>(exponent >= 0 ? exponent : -exponent);
  while (e != 0) {
    if (e & 1U) result *= factor;
    factor *= factor;
    e >>= 1U;
  }
  return result;
}

inline BigInt floor_div(const Rational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);
  BigInt quot = num / den;
  if (num % den != 0 && num < 0) quot -= 1;
  return quot;
}

inline BigInt ceil_div(const Rational& q) {
  return -floor_div(-q);
}

inline bool is_integer(const Rational& q) {
  return boost::multiprecision::denominator(q) == 1;
}

/// Exact conversion of a finite double (every double is a dyadic rational).
inline Rational to_rational(double value) {
  if (!std::isfinite(value)) throw DomainError("to_rational: non-finite value");
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  Rational r = Rational(BigInt(scaled));
  return r * rational_pow(Rational(2), exponent - 53);
}

inline double to_double(const Rational& q) {
  return q.convert_to<double>();
}

/// "p/q" form, or "p" for integers. Lossless.
inline std::string to_string(const Rational& q) {
  if (is_integer(q)) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw ParameterError("parse_rational: zero denominator in '" + text + "'");
    return Rational(BigInt(text.substr(0, slash)), den);
  } catch (const std::runtime_error&) {
    throw ParameterError("parse_rational: malformed rational '" + text + "'");
  }
}

}  // namespace soltile
