#pragma once

// Binary (Penrose) tiling of the upper half-plane, T = { R^i S^j (P) } with
// R(Z) = 2Z, S(Z) = Z + 1 and the rectangle model P = [0,1] x [1,2] in (alpha, beta).

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "integer.hpp"
#include "rational.hpp"
#include "sequences.hpp"

namespace soltile {

struct HTileAddress {
  Index i = 0;  // row (scale)
  Index j = 0;  // horizontal index

  friend auto operator<=>(const HTileAddress&, const HTileAddress&) = default;
};

struct HTileRegion {
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double beta_min = 0.0;
  double beta_max = 0.0;

  bool contains(double alpha, double beta) const {
    return alpha_min <= alpha && alpha <= alpha_max && beta_min <= beta && beta <= beta_max;
  }
};

struct HTileRegionExact {
  RationalInterval alpha;
  RationalInterval beta;

  friend bool operator==(const HTileRegionExact&, const HTileRegionExact&) = default;
};

inline constexpr Index kMaxHyperRow = 1000;

inline HTileRegion h_region(const HTileAddress& addr) {
  if (addr.i > kMaxHyperRow || addr.i < -kMaxHyperRow) {
    throw OverflowError("h_region: row index " + std::to_string(addr.i) + " out of range");
  }
  const int e = static_cast<int>(addr.i);
  const double width = std::ldexp(1.0, e);
  const double left = std::ldexp(static_cast<double>(addr.j), e);
  return {left, left + width, width, 2.0 * width};
}

inline HTileRegionExact h_region_exact(const HTileAddress& addr) {
  if (addr.i > kMaxHyperRow || addr.i < -kMaxHyperRow) {
    throw OverflowError("h_region: row index " + std::to_string(addr.i) + " out of range");
  }
  const Rational width = rational_pow(Rational(2), static_cast<int>(addr.i));
  const Rational left = width * addr.j;
  return {{left, left + width}, {width, 2 * width}};
}

/// Tile containing (alpha, beta), half-open in both directions.
inline HTileAddress h_tile_of_point(double alpha, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(alpha)) {
    throw DomainError("h_tile_of_point: need finite alpha and beta > 0");
  }
  int exponent = 0;
  std::frexp(beta, &exponent);  // beta = m 2^exponent, m in [1/2, 1)
  const Index i = exponent - 1;
  const Index j = static_cast<Index>(std::floor(std::ldexp(alpha, -static_cast<int>(i))));
  return {i, j};
}

/// Label of a tile: rows carry omega_i.
inline int h_decorate(const HTileAddress& addr, const BiSequence& omega) { return omega.at(addr.i); }

/// Edge-adjacent tiles: two lateral, one above, two below.
inline std::vector<HTileAddress> h_neighbors(const HTileAddress& addr) {
  const Index up_j = floor_div(addr.j, 2);
  return {{addr.i, addr.j - 1},
          {addr.i, addr.j + 1},
          {addr.i + 1, up_j},
          {addr.i - 1, 2 * addr.j},
          {addr.i - 1, 2 * addr.j + 1}};
}

/// Combinatorial ball of the given radius around center.
inline std::vector<HTileAddress> h_patch(const HTileAddress& center, int radius) {
  std::map<HTileAddress, int> distance{{center, 0}};
  std::deque<HTileAddress> queue{center};
  std::vector<HTileAddress> order{center};
  while (!queue.empty()) {
    const HTileAddress current = queue.front();
    queue.pop_front();
    const int d = distance[current];
    if (d == radius) continue;
    for (const auto& next : h_neighbors(current)) {
      if (distance.emplace(next, d + 1).second) {
        queue.push_back(next);
        order.push_back(next);
      }
    }
  }
  return order;
}

/// Affine candidate Z -> 2^{scale} (Z + shift) in the subgroup generated by R and
/// dyadic translations.
struct HAffineCandidate {
  Index scale = 0;
  Rational shift = 0;
};

struct HSymmetryReport {
  bool preserved = true;
  std::optional<HTileAddress> witness;  // first tile whose image fails
  std::string reason;
};

inline HSymmetryReport h_symmetry_check(const HAffineCandidate& candidate, int patch_radius,
                                        const std::optional<BiSequence>& omega = std::nullopt) {
  const Rational factor = rational_pow(Rational(2), static_cast<int>(candidate.scale));
  HSymmetryReport report;
  for (const auto& tile : h_patch({0, 0}, patch_radius)) {
    const auto region = h_region_exact(tile);
    const HTileRegionExact image{{factor * (region.alpha.lo + candidate.shift),
                                  factor * (region.alpha.hi + candidate.shift)},
                                 {factor * region.beta.lo, factor * region.beta.hi}};
    // the image row is fixed by its bottom edge, a power of two
    const Index row = tile.i + candidate.scale;
    const Rational width = rational_pow(Rational(2), static_cast<int>(row));
    const Rational j_image = image.alpha.lo / width;
    bool is_tile = is_integer(j_image);
    if (is_tile) {
      const HTileAddress target{row, static_cast<Index>(floor_div(j_image))};
      is_tile = h_region_exact(target) == image;
      if (is_tile && omega && omega->at(target.i) != omega->at(tile.i)) {
        report.preserved = false;
        report.witness = tile;
        report.reason = "label mismatch between rows " + std::to_string(tile.i) + " and " +
                        std::to_string(target.i);
        return report;
      }
    }
    if (!is_tile) {
      report.preserved = false;
      report.witness = tile;
      report.reason = "image of tile (" + std::to_string(tile.i) + "," + std::to_string(tile.j) +
                      ") is not a tile";
      return report;
    }
  }
  return report;
}

}  // namespace soltile
