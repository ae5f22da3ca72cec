#pragma once

// The tiling of Sol(a,b) by boxes R^i S^j T_k (P), P = [0,1] x [0,1] x [0, L].
//
// Tile (i,j,k) is the box [2^i j, 2^i (j+1)] x [D^i k, D^i (k+1)] x [iL, (i+1)L] with
// D = delta = 2^{-b/a}. In the face-to-face regime (D = 1/n or D = n) every endpoint
// is rational once z is measured in units of L, and all geometry below is exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "integer.hpp"
#include "rational.hpp"
#include "sequences.hpp"
#include "solgroup.hpp"

namespace soltile {

// ---------------------------------------------------------------------------
// Isometries generating the tiling

/// Left translation by (0, 0, L): (x,y,z) -> (2x, D y, z + L).
inline GroupElement rhat(const SolParams& params, const GroupElement& p) {
  return mul(params, {0.0, 0.0, params.row_height()}, p);
}

/// Left translation by (1, 0, 0).
inline GroupElement shat(const SolParams& params, const GroupElement& p) {
  return mul(params, {1.0, 0.0, 0.0}, p);
}

/// Left translation by (0, s, 0).
inline GroupElement that(const SolParams& params, double s, const GroupElement& p) {
  return mul(params, {0.0, s, 0.0}, p);
}

inline GroupElement rhat_pow(const SolParams& params, Index power, const GroupElement& p) {
  return mul(params, {0.0, 0.0, static_cast<double>(power) * params.row_height()}, p);
}

inline GroupElement shat_pow(const SolParams& params, Index power, const GroupElement& p) {
  return mul(params, {static_cast<double>(power), 0.0, 0.0}, p);
}

// ---------------------------------------------------------------------------
// Addresses and boxes

struct TileAddress {
  Index i = 0;
  Index j = 0;
  Index k = 0;

  friend auto operator<=>(const TileAddress&, const TileAddress&) = default;
};

inline std::string to_string(const TileAddress& t) {
  return "(" + std::to_string(t.i) + "," + std::to_string(t.j) + "," + std::to_string(t.k) + ")";
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct TileBox {
  Interval x;
  Interval y;
  Interval z;

  /// Half-open membership [lo, hi) in every axis.
  bool contains(const GroupElement& p) const {
    return x.lo <= p.x && p.x < x.hi && y.lo <= p.y && p.y < y.hi && z.lo <= p.z && p.z < z.hi;
  }
};

/// Box with exact endpoints; the z-interval is measured in units of L.
struct ExactTileBox {
  RationalInterval x;
  RationalInterval y;
  RationalInterval zeta;

  friend bool operator==(const ExactTileBox&, const ExactTileBox&) = default;
};

/// A point of Sol(a,b) with exact x, y and z / L.
struct ExactPoint {
  Rational x;
  Rational y;
  Rational zeta;
};

inline constexpr Index kMaxTileRow = 900;

inline void check_row(Index i, const char* where) {
  if (i > kMaxTileRow || i < -kMaxTileRow) {
    throw OverflowError(std::string(where) + ": row " + std::to_string(i) + " out of range");
  }
}

inline TileBox tile_box(const SolParams& params, const TileAddress& t) {
  check_row(t.i, "tile_box");
  const double x_width = std::ldexp(1.0, static_cast<int>(t.i));
  const double y_width = std::pow(params.delta(), static_cast<double>(t.i));
  if (!std::isfinite(y_width) || y_width == 0.0) throw OverflowError("tile_box: y-width out of range");
  const double L = params.row_height();
  return {{x_width * static_cast<double>(t.j), x_width * static_cast<double>(t.j + 1)},
          {y_width * static_cast<double>(t.k), y_width * static_cast<double>(t.k + 1)},
          {L * static_cast<double>(t.i), L * static_cast<double>(t.i + 1)}};
}

/// D^i as an exact rational (face-to-face regime only).
inline Rational delta_power(const SolParams& params, Index i) {
  const int n = params.require_subdivision();
  const int exponent = static_cast<int>(params.heintze() ? i : -i);
  return rational_pow(Rational(n), exponent);
}

inline ExactTileBox exact_tile_box(const SolParams& params, const TileAddress& t) {
  check_row(t.i, "exact_tile_box");
  const Rational x_width = rational_pow(Rational(2), static_cast<int>(t.i));
  const Rational y_width = delta_power(params, t.i);
  return {{x_width * t.j, x_width * (t.j + 1)},
          {y_width * t.k, y_width * (t.k + 1)},
          {Rational(t.i), Rational(t.i + 1)}};
}

inline TileAddress tile_of_point(const SolParams& params, const GroupElement& p) {
  const double row = std::floor(p.z / params.row_height());
  if (!std::isfinite(row) || std::fabs(row) > static_cast<double>(kMaxTileRow)) {
    throw OverflowError("tile_of_point: z out of range");
  }
  const auto i = static_cast<Index>(row);
  const double x_width = std::ldexp(1.0, static_cast<int>(i));
  const double y_width = std::pow(params.delta(), row);
  return {i, static_cast<Index>(std::floor(p.x / x_width)),
          static_cast<Index>(std::floor(p.y / y_width))};
}

inline TileAddress exact_tile_of_point(const SolParams& params, const ExactPoint& p) {
  const BigInt row = floor_div(p.zeta);
  if (row > kMaxTileRow || row < -kMaxTileRow) throw OverflowError("exact_tile_of_point: zeta out of range");
  const auto i = row.convert_to<Index>();
  const Rational x_width = rational_pow(Rational(2), static_cast<int>(i));
  return {i, floor_div(p.x / x_width).convert_to<Index>(),
          floor_div(p.y / delta_power(params, i)).convert_to<Index>()};
}

inline bool contains(const ExactTileBox& box, const ExactPoint& p) {
  return box.x.lo <= p.x && p.x < box.x.hi && box.y.lo <= p.y && p.y < box.y.hi &&
         box.zeta.lo <= p.zeta && p.zeta < box.zeta.hi;
}

// ---------------------------------------------------------------------------
// Adjacency

enum class FaceType { XMinus, XPlus, YMinus, YPlus, Up, Down };

inline const char* to_string(FaceType face) {
  switch (face) {
    case FaceType::XMinus: return "x-";
    case FaceType::XPlus: return "x+";
    case FaceType::YMinus: return "y-";
    case FaceType::YPlus: return "y+";
    case FaceType::Up: return "up";
    case FaceType::Down: return "down";
  }
  return "?";
}

inline FaceType parse_face_type(const std::string& text) {
  for (FaceType face : {FaceType::XMinus, FaceType::XPlus, FaceType::YMinus, FaceType::YPlus,
                        FaceType::Up, FaceType::Down}) {
    if (text == to_string(face)) return face;
  }
  throw ParameterError("unknown face type '" + text + "'");
}

inline FaceType opposite(FaceType face) {
  switch (face) {
    case FaceType::XMinus: return FaceType::XPlus;
    case FaceType::XPlus: return FaceType::XMinus;
    case FaceType::YMinus: return FaceType::YPlus;
    case FaceType::YPlus: return FaceType::YMinus;
    case FaceType::Up: return FaceType::Down;
    case FaceType::Down: return FaceType::Up;
  }
  return face;
}

struct Neighbor {
  TileAddress tile;
  FaceType face;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

namespace detail {

// Indices of the cells of width w' that overlap [index * w, (index+1) * w) in positive
// length, where w / w' = num / den and one of num, den is 1.
inline std::pair<Index, Index> overlap_range(Index index, Index num, Index den) {
  const Index first = floor_div(index * num, den);
  const Index last = -floor_div(-(index + 1) * num, den) - 1;
  return {first, last};
}

}  // namespace detail

/// Face-adjacent tiles, derived from the overlap of box projections in the rows
/// above and below. For D = 1/n this gives n + 6 neighbours: four lateral, n above,
/// two below. For the Heintze convention D = n it gives 2n + 5: one above, 2n below.
inline std::vector<Neighbor> neighbors(const SolParams& params, const TileAddress& t) {
  const Index n = params.require_subdivision();
  std::vector<Neighbor> result{{{t.i, t.j - 1, t.k}, FaceType::XMinus},
                               {{t.i, t.j + 1, t.k}, FaceType::XPlus},
                               {{t.i, t.j, t.k - 1}, FaceType::YMinus},
                               {{t.i, t.j, t.k + 1}, FaceType::YPlus}};
  // (x width ratio, y width ratio) of this row relative to the target row, as num/den
  const bool heintze = params.heintze();
  for (const auto& [step, face] : {std::pair{Index{1}, FaceType::Up}, {Index{-1}, FaceType::Down}}) {
    const bool going_up = step > 0;
    // x-widths double with each row
    const auto [jx0, jx1] =
        going_up ? detail::overlap_range(t.j, 1, 2) : detail::overlap_range(t.j, 2, 1);
    // y-widths scale by D per row; D = 1/n shrinks upward, D = n grows upward
    const bool y_shrinks = going_up != heintze;
    const auto [ky0, ky1] =
        y_shrinks ? detail::overlap_range(t.k, n, 1) : detail::overlap_range(t.k, 1, n);
    for (Index j = jx0; j <= jx1; ++j) {
      for (Index k = ky0; k <= ky1; ++k) result.push_back({{t.i + step, j, k}, face});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Face-to-face verification

struct MisalignmentWitness {
  TileAddress lower;
  TileAddress upper;
  Interval lower_y;
  Interval upper_y;
};

struct FaceToFaceReport {
  bool face_to_face = true;
  std::optional<MisalignmentWitness> witness;
};

/// Scans vertically adjacent rows i, i+1 for |i| <= sample_rows: the tiling is
/// face-to-face when every pair of vertically adjacent tiles has nested x- and
/// y-projections. Exact in the face-to-face regime, relative tolerance 1e-9 otherwise.
inline FaceToFaceReport face_to_face_check(const SolParams& params, int sample_rows) {
  constexpr Index kLowerTilesPerRow = 24;
  constexpr double kTolerance = 1e-9;
  FaceToFaceReport report;
  const double delta = params.delta();
  for (Index i = -sample_rows; i < sample_rows; ++i) {
    if (params.subdivision()) {
      // exact scan
      const Rational lower_w = delta_power(params, i);
      const Rational upper_w = delta_power(params, i + 1);
      for (Index k = 0; k < kLowerTilesPerRow; ++k) {
        const RationalInterval lower{lower_w * k, lower_w * (k + 1)};
        const Index first = floor_div(lower.lo / upper_w).convert_to<Index>();
        const Index last = ceil_div(lower.hi / upper_w).convert_to<Index>() - 1;
        for (Index kk = first; kk <= last; ++kk) {
          const RationalInterval upper{upper_w * kk, upper_w * (kk + 1)};
          const bool nested = (upper.lo >= lower.lo && upper.hi <= lower.hi) ||
                              (lower.lo >= upper.lo && lower.hi <= upper.hi);
          if (!nested) {
            report.face_to_face = false;
            report.witness = MisalignmentWitness{{i, 0, k}, {i + 1, 0, kk},
                                                 {to_double(lower.lo), to_double(lower.hi)},
                                                 {to_double(upper.lo), to_double(upper.hi)}};
            return report;
          }
        }
      }
      continue;
    }
    const double lower_w = std::pow(delta, static_cast<double>(i));
    const double upper_w = std::pow(delta, static_cast<double>(i + 1));
    const double tol = kTolerance * std::min(lower_w, upper_w);
    for (Index k = 0; k < kLowerTilesPerRow; ++k) {
      const Interval lower{lower_w * static_cast<double>(k), lower_w * static_cast<double>(k + 1)};
      const auto first = static_cast<Index>(std::floor(lower.lo / upper_w + kTolerance));
      const auto last = static_cast<Index>(std::ceil(lower.hi / upper_w - kTolerance)) - 1;
      for (Index kk = first; kk <= last; ++kk) {
        const Interval upper{upper_w * static_cast<double>(kk), upper_w * static_cast<double>(kk + 1)};
        const bool nested = (upper.lo >= lower.lo - tol && upper.hi <= lower.hi + tol) ||
                            (lower.lo >= upper.lo - tol && lower.hi <= upper.hi + tol);
        if (!nested) {
          report.face_to_face = false;
          report.witness = MisalignmentWitness{{i, 0, k}, {i + 1, 0, kk}, lower, upper};
          return report;
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Decorated patches

struct Adjacency {
  TileAddress from;
  TileAddress to;
  FaceType face;  // face of `from` shared with `to`

  friend bool operator==(const Adjacency&, const Adjacency&) = default;
};

struct DecoratedPatch {
  TileAddress center;
  int radius = 0;
  std::map<TileAddress, int> tiles;  // address -> label
  std::vector<Adjacency> adjacency;  // each unordered pair once, from < to

  friend bool operator==(const DecoratedPatch&, const DecoratedPatch&) = default;
};

/// Combinatorial ball of radius r around center in the face-adjacency graph, each
/// tile labelled by omega at its row.
inline DecoratedPatch patch(const SolParams& params, const TileAddress& center, int radius,
                            const BiSequence& omega) {
  if (radius < 0) throw ParameterError("patch: radius must be >= 0");
  params.require_subdivision();
  DecoratedPatch result;
  result.center = center;
  result.radius = radius;
  std::map<TileAddress, int> distance{{center, 0}};
  std::deque<TileAddress> queue{center};
  while (!queue.empty()) {
    const TileAddress current = queue.front();
    queue.pop_front();
    const int d = distance[current];
    if (d == radius) continue;
    for (const auto& next : neighbors(params, current)) {
      if (distance.emplace(next.tile, d + 1).second) queue.push_back(next.tile);
    }
  }
  for (const auto& [tile, d] : distance) {
    check_row(tile.i, "patch");
    result.tiles.emplace(tile, omega.at(tile.i));
  }
  for (const auto& [tile, label] : result.tiles) {
    for (const auto& next : neighbors(params, tile)) {
      if (tile < next.tile && result.tiles.count(next.tile) != 0) {
        result.adjacency.push_back({tile, next.tile, next.face});
      }
    }
  }
  return result;
}

/// Canonical invariant of the radius-r decorated patch around a tile.
struct PatchClassKey {
  int radius = 0;
  Index j_residue = 0;            // j mod 2^r
  Index k_residue = 0;            // k mod n^r
  std::vector<int> label_window;  // omega_{i-r} .. omega_{i+r}

  friend auto operator<=>(const PatchClassKey&, const PatchClassKey&) = default;
};

inline PatchClassKey patch_class_key(const SolParams& params, const TileAddress& t, int radius,
                                     const BiSequence& omega) {
  const Index n = params.require_subdivision();
  if (radius < 0) throw ParameterError("patch_class_key: radius must be >= 0");
  return {radius, floor_mod(t.j, checked_pow(2, radius)), floor_mod(t.k, checked_pow(n, radius)),
          omega.window(t.i - radius, t.i + radius)};
}

// ---------------------------------------------------------------------------
// Symmetries

/// Left translation by (x_shift, y_shift, rows * L): in the face-to-face regime these
/// are the candidates that can map tiles onto tiles.
struct SolTranslation {
  Index rows = 0;
  Rational x_shift = 0;
  Rational y_shift = 0;
};

struct SolSymmetryReport {
  bool preserved = true;
  std::optional<TileAddress> witness;
  std::string reason;
};

inline ExactTileBox apply(const SolParams& params, const SolTranslation& g, const ExactTileBox& box) {
  const Rational x_scale = rational_pow(Rational(2), static_cast<int>(g.rows));
  const Rational y_scale = delta_power(params, g.rows);
  return {{g.x_shift + x_scale * box.x.lo, g.x_shift + x_scale * box.x.hi},
          {g.y_shift + y_scale * box.y.lo, g.y_shift + y_scale * box.y.hi},
          {box.zeta.lo + g.rows, box.zeta.hi + g.rows}};
}

/// Whether g maps every tile of the radius patch around (0,0,0) onto a tile of the
/// tiling (with the same label when omega is given).
inline SolSymmetryReport sol_symmetry_check(const SolParams& params, const SolTranslation& g,
                                            int patch_radius,
                                            const std::optional<BiSequence>& omega = std::nullopt) {
  const auto base = patch(params, {0, 0, 0}, patch_radius, omega.value_or(BiSequence::make_constant(0)));
  SolSymmetryReport report;
  for (const auto& [tile, label] : base.tiles) {
    const ExactTileBox image = apply(params, g, exact_tile_box(params, tile));
    const TileAddress target = exact_tile_of_point(params, {image.x.lo, image.y.lo, image.zeta.lo});
    if (exact_tile_box(params, target) != image) {
      report.preserved = false;
      report.witness = tile;
      report.reason = "image of tile " + to_string(tile) + " is not a tile";
      return report;
    }
    if (omega && omega->at(target.i) != omega->at(tile.i)) {
      report.preserved = false;
      report.witness = tile;
      report.reason = "label of row " + std::to_string(tile.i) + " differs from row " +
                      std::to_string(target.i);
      return report;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Repetitivity

struct RepetitivityReport {
  std::optional<Index> radius;  // certified bound R, or nullopt
  Index worst_row = 0;          // center row attaining R
  std::vector<int> worst_window;
};

namespace detail {

inline Index half_modulus(Index modulus) { return modulus / 2; }

// Length of the explicit path from a tile in row i to a tile of row i + h carrying
// prescribed residues (j mod 2^r, k mod n^r): |h| vertical moves whose digit choices
// fix the low-order residues, plus lateral moves made in whichever row makes them
// cheapest. The worst case over starting residues is taken, so the bound holds for
// every tile of row i.
inline Index key_path_cost(Index h, int radius, Index n, bool heintze) {
  const Index s = h >= 0 ? h : -h;
  const auto remaining = [&](Index base, bool free_digits) -> Index {
    if (radius == 0) return 0;
    const Index fixed = free_digits ? std::max<Index>(Index{radius} - s, 0) : Index{radius};
    return half_modulus(checked_pow(base, static_cast<int>(fixed)));
  };
  // Going down frees low x-digits (j -> 2j + e). Going up frees low y-digits when
  // D = 1/n (k -> nk + d); in the Heintze case going down frees both.
  const bool x_free = h < 0;
  const bool y_free = heintze ? h < 0 : h > 0;
  return s + remaining(2, x_free) + remaining(n, y_free);
}

}  // namespace detail

/// Upper bound R such that every combinatorial ball of radius R centered in a row
/// |i| <= search_bound contains a tile of every realized radius-r patch class. Each
/// class is reached by an explicit path (see key_path_cost), so R is certified; it
/// is not claimed to be minimal. nullopt if some class is not found within search_bound.
inline RepetitivityReport repetitivity_radius(const SolParams& params, int radius,
                                              const BiSequence& omega, Index search_bound) {
  const Index n = params.require_subdivision();
  if (radius < 0) throw ParameterError("repetitivity_radius: radius must be >= 0");
  const int window_len = 2 * radius + 1;
  // windows are keyed by their center row
  const Index reach = 2 * search_bound;
  const auto occurrences =
      factor_occurrences(omega, window_len, -reach - radius, reach + radius);
  const auto realized = factor_occurrences(omega, window_len, -search_bound - radius,
                                           search_bound + radius);
  RepetitivityReport report;
  Index worst = 0;
  for (Index i = -search_bound; i <= search_bound; ++i) {
    for (const auto& [word, ignored] : realized) {
      const auto& rows = occurrences.at(word);  // window start = center - radius
      Index best = -1;
      // scan outward from i; stop once |h| alone exceeds the best cost
      auto it = std::lower_bound(rows.begin(), rows.end(), i - radius);
      for (auto right = it; right != rows.end(); ++right) {
        const Index h = *right + radius - i;
        if (best >= 0 && h >= best) break;
        const Index cost = detail::key_path_cost(h, radius, n, params.heintze());
        if (best < 0 || cost < best) best = cost;
      }
      for (auto left = it; left != rows.begin();) {
        --left;
        const Index h = *left + radius - i;
        if (best >= 0 && -h >= best) break;
        const Index cost = detail::key_path_cost(h, radius, n, params.heintze());
        if (best < 0 || cost < best) best = cost;
      }
      if (best < 0 || best > search_bound) {
        report.radius = std::nullopt;
        report.worst_row = i;
        return report;
      }
      if (best > worst) {
        worst = best;
        report.worst_row = i;
        report.worst_window.clear();
        for (int t = window_len - 1; t >= 0; --t) report.worst_window.push_back(static_cast<int>((word >> t) & 1U));
      }
    }
  }
  report.radius = worst;
  return report;
}

}  // namespace soltile
