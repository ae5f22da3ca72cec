#pragma once

#include <cstdint>

#include "errors.hpp"

namespace soltile {

using Index = std::int64_t;

inline constexpr Index floor_div(Index a, Index b) {
  Index q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline constexpr Index floor_mod(Index a, Index b) { return a - b * floor_div(a, b); }

inline Index checked_pow(Index base, int exponent) {
  Index result = 1;
  for (int e = 0; e < exponent; ++e) {
    if (result > (Index{1} << 62) / base) throw OverflowError("integer power out of range");
    result *= base;
  }
  return result;
}

}  // namespace soltile
