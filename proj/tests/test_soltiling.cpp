#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "soltile/soltiling.hpp"

using namespace soltile;

namespace {

constexpr double kLn2 = std::numbers::ln2;

SolParams params_n(int n, bool heintze = false) { return SolParams::from_subdivision(n, heintze); }

// Face type shared by two exact boxes, or nullopt unless they meet in a 2D face of
// positive area.
std::optional<FaceType> shared_face(const ExactTileBox& a, const ExactTileBox& b) {
  const auto overlap = [](const RationalInterval& p, const RationalInterval& q) {
    return std::min(p.hi, q.hi) - std::max(p.lo, q.lo);
  };
  const Rational ox = overlap(a.x, b.x);
  const Rational oy = overlap(a.y, b.y);
  const Rational oz = overlap(a.zeta, b.zeta);
  if (ox < 0 || oy < 0 || oz < 0) return std::nullopt;
  const int zeros = (ox == 0) + (oy == 0) + (oz == 0);
  if (zeros != 1) return std::nullopt;
  if (ox == 0) return a.x.hi == b.x.lo ? FaceType::XPlus : FaceType::XMinus;
  if (oy == 0) return a.y.hi == b.y.lo ? FaceType::YPlus : FaceType::YMinus;
  return a.zeta.hi == b.zeta.lo ? FaceType::Up : FaceType::Down;
}

std::set<std::pair<TileAddress, FaceType>> brute_force_neighbors(const SolParams& params, const TileAddress& t) {
  const int n = params.require_subdivision();
  const auto box = exact_tile_box(params, t);
  std::set<std::pair<TileAddress, FaceType>> found;
  for (Index di = -1; di <= 1; ++di) {
    const Index i = t.i + di;
    const Rational xw = rational_pow(Rational(2), static_cast<int>(i));
    const Rational yw = delta_power(params, i);
    const Index j0 = floor_div(box.x.lo / xw).convert_to<Index>() - 1;
    const Index j1 = floor_div(box.x.hi / xw).convert_to<Index>() + 1;
    const Index k0 = floor_div(box.y.lo / yw).convert_to<Index>() - 1;
    const Index k1 = floor_div(box.y.hi / yw).convert_to<Index>() + 1;
    if ((j1 - j0) * (k1 - k0) > 64 * n * n) throw std::runtime_error("scan too wide");
    for (Index j = j0; j <= j1; ++j) {
      for (Index k = k0; k <= k1; ++k) {
        const TileAddress other{i, j, k};
        if (other == t) continue;
        if (const auto face = shared_face(box, exact_tile_box(params, other))) found.emplace(other, *face);
      }
    }
  }
  return found;
}

}  // namespace

TEST(Isometries, Formulas) {
  const SolParams p(1.0, 1.0);
  const auto r = rhat(p, {1, 1, 0});
  EXPECT_NEAR(r.x, 2.0, 1e-15);
  EXPECT_NEAR(r.y, 0.5, 1e-15);
  EXPECT_NEAR(r.z, kLn2, 1e-15);
  const auto t = that(p, 2.0, {0, 0, 0});
  EXPECT_EQ(t, (GroupElement{0, 2, 0}));
  const auto s = shat(p, {0, 0, 5});
  EXPECT_EQ(s, (GroupElement{1, 0, 5}));
}

TEST(Isometries, ConjugationIdentities) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> power(-3, 3);
  const auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)}); };
  for (const auto& params : {params_n(2), params_n(3), params_n(2, true)}) {
    for (int trial = 0; trial < 2000; ++trial) {
      const GroupElement q{u(rng), u(rng), u(rng)};
      const double s = u(rng);
      const int i = power(rng);
      const auto lhs = that(params, s, rhat_pow(params, i, q));
      const auto rhs = rhat_pow(params, i, that(params, s * std::pow(params.delta(), -i), q));
      ASSERT_TRUE(close(lhs.x, rhs.x) && close(lhs.y, rhs.y) && close(lhs.z, rhs.z));
      const auto lhs2 = that(params, s, shat_pow(params, i, q));
      const auto rhs2 = shat_pow(params, i, that(params, s, q));
      ASSERT_TRUE(close(lhs2.x, rhs2.x) && close(lhs2.y, rhs2.y) && close(lhs2.z, rhs2.z));
    }
  }
}

TEST(TileBox, Examples) {
  const SolParams p(1.0, 1.0);
  const auto b0 = tile_box(p, {0, 0, 0});
  EXPECT_EQ(b0.x.hi, 1.0);
  EXPECT_EQ(b0.y.hi, 1.0);
  EXPECT_NEAR(b0.z.hi, kLn2, 1e-15);
  const auto b1 = tile_box(p, {1, 0, 0});
  EXPECT_EQ(b1.x.hi, 2.0);
  EXPECT_EQ(b1.y.hi, 0.5);
  EXPECT_NEAR(b1.z.lo, kLn2, 1e-15);
  EXPECT_NEAR(b1.z.hi, 2 * kLn2, 1e-15);
  const auto p3 = SolParams(1.0, std::log2(3.0));
  const auto e = exact_tile_box(p3, {1, 2, 5});
  EXPECT_EQ(e.x.lo, 4);
  EXPECT_EQ(e.x.hi, 6);
  EXPECT_EQ(e.y.lo, Rational(5, 3));
  EXPECT_EQ(e.y.hi, 2);
  EXPECT_EQ(e.zeta.lo, 1);
  EXPECT_EQ(e.zeta.hi, 2);
  EXPECT_THROW(tile_box(p, {2000, 0, 0}), OverflowError);
}

TEST(TileBox, GeneratedByIsometries) {
  for (const auto& params : {params_n(2), params_n(3), params_n(2, true)}) {
    for (Index i = -3; i <= 3; ++i) {
      for (Index j = -2; j <= 2; ++j) {
        for (Index k = -2; k <= 2; ++k) {
          const auto box = tile_box(params, {i, j, k});
          // image of the corners of P under rhat^i shat^j that(k)
          for (int corner = 0; corner < 8; ++corner) {
            const GroupElement c{(corner & 1) ? 1.0 : 0.0, (corner & 2) ? 1.0 : 0.0,
                                 (corner & 4) ? params.row_height() : 0.0};
            const auto image = rhat_pow(params, i, shat_pow(params, j, that(params, static_cast<double>(k), c)));
            const double ex = (corner & 1) ? box.x.hi : box.x.lo;
            const double ey = (corner & 2) ? box.y.hi : box.y.lo;
            const double ez = (corner & 4) ? box.z.hi : box.z.lo;
            EXPECT_NEAR(image.x, ex, 1e-12 * std::max(1.0, std::fabs(ex)));
            EXPECT_NEAR(image.y, ey, 1e-12 * std::max(1.0, std::fabs(ey)));
            EXPECT_NEAR(image.z, ez, 1e-12 * std::max(1.0, std::fabs(ez)));
          }
        }
      }
    }
  }
}

TEST(TileOfPoint, Examples) {
  const SolParams p(1.0, 1.0);
  EXPECT_EQ(tile_of_point(p, {0.5, 0.5, 0.1}), (TileAddress{0, 0, 0}));
  EXPECT_EQ(tile_of_point(p, {0, 0, 0}), (TileAddress{0, 0, 0}));
  EXPECT_EQ(tile_of_point(p, {-0.1, 0.2, -0.5}), (TileAddress{-1, -1, 0}));
  // cross-check against a scan of all boxes with |i|,|j|,|k| <= 2
  const GroupElement q{0.5, 0.5, 0.1};
  int hits = 0;
  for (Index i = -2; i <= 2; ++i) {
    for (Index j = -2; j <= 2; ++j) {
      for (Index k = -2; k <= 2; ++k) hits += tile_box(p, {i, j, k}).contains(q);
    }
  }
  EXPECT_EQ(hits, 1);
}

TEST(TileOfPoint, ExactCover) {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<std::int64_t> coord(-(Index{4} << 20), Index{4} << 20);
  for (const auto& params : {params_n(2), params_n(3), params_n(2, true)}) {
    for (int t = 0; t < 2000; ++t) {
      const ExactPoint q{Rational(coord(rng), Index{1} << 20), Rational(coord(rng), Index{1} << 20),
                         Rational(coord(rng), Index{1} << 20)};
      const auto tile = exact_tile_of_point(params, q);
      ASSERT_TRUE(contains(exact_tile_box(params, tile), q));
      // no other tile of rows |i| <= 6 contains it
      int hits = 0;
      for (Index i = -6; i <= 6; ++i) {
        const Rational xw = rational_pow(Rational(2), static_cast<int>(i));
        const Rational yw = delta_power(params, i);
        const Index j = floor_div(q.x / xw).convert_to<Index>();
        const Index k = floor_div(q.y / yw).convert_to<Index>();
        for (Index dj = -1; dj <= 1; ++dj) {
          for (Index dk = -1; dk <= 1; ++dk) hits += contains(exact_tile_box(params, {i, j + dj, k + dk}), q);
        }
      }
      ASSERT_EQ(hits, 1);
    }
  }
}

TEST(Neighbors, Examples) {
  const auto p = params_n(2);
  const auto list = neighbors(p, {0, 0, 0});
  ASSERT_EQ(list.size(), 8U);
  std::set<TileAddress> tiles;
  for (const auto& n : list) tiles.insert(n.tile);
  const std::set<TileAddress> expected{{0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1},
                                       {1, 0, 0},  {1, 0, 1}, {-1, 0, 0}, {-1, 1, 0}};
  EXPECT_EQ(tiles, expected);
  EXPECT_EQ(neighbors(params_n(3), {4, -7, 11}).size(), 9U);
  EXPECT_EQ(neighbors(params_n(2, true), {0, 0, 0}).size(), 9U);  // 2n + 5
  EXPECT_THROW(neighbors(SolParams(1.0, 1.5), {0, 0, 0}), NotFaceToFace);
}

TEST(Neighbors, BruteForceOracle) {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<Index> row(-8, 8);
  std::uniform_int_distribution<Index> idx(-1000, 1000);
  for (const auto& [n, heintze] : {std::pair{2, false}, {3, false}, {4, false}, {2, true}, {3, true}}) {
    const auto params = params_n(n, heintze);
    for (int t = 0; t < 300; ++t) {
      const TileAddress tile{row(rng), idx(rng), idx(rng)};
      const auto list = neighbors(params, tile);
      std::set<std::pair<TileAddress, FaceType>> listed;
      for (const auto& nb : list) listed.emplace(nb.tile, nb.face);
      ASSERT_EQ(listed.size(), list.size());
      ASSERT_EQ(listed, brute_force_neighbors(params, tile)) << to_string(tile);
      ASSERT_EQ(list.size(), static_cast<std::size_t>(heintze ? 2 * n + 5 : n + 6));
    }
  }
}

TEST(Neighbors, Symmetric) {
  for (const auto& params : {params_n(2), params_n(3), params_n(3, true)}) {
    for (Index j = -3; j <= 3; ++j) {
      for (Index k = -3; k <= 3; ++k) {
        const TileAddress t{1, j, k};
        for (const auto& nb : neighbors(params, t)) {
          bool back = false;
          for (const auto& m : neighbors(params, nb.tile)) back = back || (m.tile == t && m.face == opposite(nb.face));
          EXPECT_TRUE(back);
        }
      }
    }
  }
}

TEST(FaceToFace, Dichotomy) {
  EXPECT_TRUE(face_to_face_check(SolParams(1.0, 1.0), 6).face_to_face);
  EXPECT_TRUE(face_to_face_check(SolParams(1.0, std::log2(3.0)), 6).face_to_face);
  EXPECT_TRUE(face_to_face_check(SolParams(1.0, 2.0), 6).face_to_face);
  EXPECT_TRUE(face_to_face_check(SolParams(1.0, -1.0), 6).face_to_face);
  const auto bad = face_to_face_check(SolParams(1.0, 1.5), 6);
  EXPECT_FALSE(bad.face_to_face);
  ASSERT_TRUE(bad.witness);
  const auto& w = *bad.witness;
  EXPECT_EQ(w.upper.i, w.lower.i + 1);
  // the witness boxes overlap in y without nesting
  const bool nested = (w.upper_y.lo >= w.lower_y.lo && w.upper_y.hi <= w.lower_y.hi) ||
                      (w.lower_y.lo >= w.upper_y.lo && w.lower_y.hi <= w.upper_y.hi);
  EXPECT_FALSE(nested);
  EXPECT_LT(std::max(w.lower_y.lo, w.upper_y.lo), std::min(w.lower_y.hi, w.upper_y.hi));
  EXPECT_FALSE(face_to_face_check(SolParams(1.0, 0.5), 3).face_to_face);
}

TEST(Patch, Examples) {
  const auto p = params_n(2);
  const auto omega = BiSequence::make_morse();
  const auto single = patch(p, {3, 1, 1}, 0, omega);
  ASSERT_EQ(single.tiles.size(), 1U);
  EXPECT_EQ(single.tiles.begin()->second, morse(3));
  const auto ball = patch(p, {0, 0, 0}, 1, omega);
  EXPECT_EQ(ball.tiles.size(), 9U);
  for (const auto& [tile, label] : ball.tiles) EXPECT_EQ(label, morse(tile.i));
  // every tile within distance one of the center is adjacent to it
  int center_edges = 0;
  for (const auto& adj : ball.adjacency) {
    EXPECT_LT(adj.from, adj.to);
    center_edges += adj.from == ball.center || adj.to == ball.center;
  }
  EXPECT_EQ(center_edges, 8);
  EXPECT_EQ(patch_class_key(p, {0, 0, 0}, 1, omega), patch_class_key(p, {0, 2, 0}, 1, omega));
  EXPECT_THROW(patch(p, {0, 0, 0}, -1, omega), ParameterError);
}

TEST(PatchClassKey, Examples) {
  const auto p = params_n(2);
  const auto omega = BiSequence::make_morse();
  const auto k0 = patch_class_key(p, {5, 7, 9}, 0, omega);
  EXPECT_EQ(k0.j_residue, 0);
  EXPECT_EQ(k0.k_residue, 0);
  EXPECT_EQ(k0.label_window, (std::vector<int>{morse(5)}));
  const auto k2 = patch_class_key(p, {0, 5, 3}, 2, omega);
  EXPECT_EQ(k2.j_residue, 1);
  EXPECT_EQ(k2.k_residue, 3);
  EXPECT_EQ(k2.label_window, (std::vector<int>{1, 0, 0, 1, 1}));
}

namespace {

// Explicit isomorphism between two patches, built by walking both balls in the
// same neighbour order; nullopt when the walk is inconsistent.
std::optional<std::map<TileAddress, TileAddress>> build_isomorphism(const SolParams& params,
                                                                    const DecoratedPatch& a,
                                                                    const DecoratedPatch& b) {
  std::map<TileAddress, TileAddress> phi{{a.center, b.center}};
  std::set<TileAddress> used{b.center};
  std::deque<TileAddress> queue{a.center};
  while (!queue.empty()) {
    const auto t = queue.front();
    queue.pop_front();
    const auto na = neighbors(params, t);
    const auto nb = neighbors(params, phi.at(t));
    if (na.size() != nb.size()) return std::nullopt;
    for (std::size_t s = 0; s < na.size(); ++s) {
      if (na[s].face != nb[s].face) return std::nullopt;
      const bool in_a = a.tiles.count(na[s].tile) != 0;
      const bool in_b = b.tiles.count(nb[s].tile) != 0;
      if (in_a != in_b) return std::nullopt;
      if (!in_a) continue;
      auto it = phi.find(na[s].tile);
      if (it == phi.end()) {
        if (!used.insert(nb[s].tile).second) return std::nullopt;
        phi.emplace(na[s].tile, nb[s].tile);
        queue.push_back(na[s].tile);
      } else if (it->second != nb[s].tile) {
        return std::nullopt;
      }
    }
  }
  if (phi.size() != a.tiles.size() || a.tiles.size() != b.tiles.size()) return std::nullopt;
  return phi;
}

bool is_label_and_face_preserving(const DecoratedPatch& a, const DecoratedPatch& b,
                                  const std::map<TileAddress, TileAddress>& phi) {
  for (const auto& [tile, label] : a.tiles) {
    if (b.tiles.at(phi.at(tile)) != label) return false;
  }
  std::set<std::tuple<TileAddress, TileAddress, FaceType>> edges_b;
  for (const auto& e : b.adjacency) {
    edges_b.emplace(e.from, e.to, e.face);
    edges_b.emplace(e.to, e.from, opposite(e.face));
  }
  if (a.adjacency.size() != b.adjacency.size()) return false;
  for (const auto& e : a.adjacency) {
    if (edges_b.count({phi.at(e.from), phi.at(e.to), e.face}) == 0) return false;
  }
  return true;
}

}  // namespace

TEST(PatchClassKey, EqualKeysGiveIsomorphicPatches) {
  std::mt19937_64 rng(34);
  const auto omega = BiSequence::make_morse();
  std::uniform_int_distribution<Index> row(-20, 20);
  std::uniform_int_distribution<Index> idx(-500, 500);
  std::uniform_int_distribution<Index> mult(-3, 3);
  std::uniform_int_distribution<int> radius_dist(0, 3);
  int checked = 0;
  for (int n : {2, 3}) {
    const auto params = params_n(n);
    for (int trial = 0; trial < 500; ++trial) {
      const int r = n == 3 ? std::min(radius_dist(rng), 2) : radius_dist(rng);
      const TileAddress t1{row(rng), idx(rng), idx(rng)};
      const auto key = patch_class_key(params, t1, r, omega);
      // another row with the same label window
      Index i2 = t1.i;
      for (Index cand = t1.i + 1 + static_cast<Index>(rng() % 40);; ++cand) {
        if (omega.window(cand - r, cand + r) == key.label_window) {
          i2 = cand;
          break;
        }
      }
      const TileAddress t2{i2, t1.j + mult(rng) * checked_pow(2, r), t1.k + mult(rng) * checked_pow(n, r)};
      ASSERT_EQ(patch_class_key(params, t2, r, omega), key);
      const auto a = patch(params, t1, r, omega);
      const auto b = patch(params, t2, r, omega);
      const auto phi = build_isomorphism(params, a, b);
      ASSERT_TRUE(phi) << to_string(t1) << " vs " << to_string(t2) << " r=" << r;
      ASSERT_TRUE(is_label_and_face_preserving(a, b, *phi));
      ++checked;
    }
  }
  EXPECT_EQ(checked, 1000);
}

TEST(PatchClassKey, DifferentResidueBreaksTheWalk) {
  const auto params = params_n(2);
  const auto omega = BiSequence::make_constant(0);
  const auto a = patch(params, {0, 0, 0}, 2, omega);
  const auto b = patch(params, {0, 1, 0}, 2, omega);
  EXPECT_NE(patch_class_key(params, {0, 0, 0}, 2, omega), patch_class_key(params, {0, 1, 0}, 2, omega));
  EXPECT_FALSE(build_isomorphism(params, a, b).has_value());
}

TEST(SolSymmetry, RhatAndDecoration) {
  const auto params = params_n(2);
  EXPECT_TRUE(sol_symmetry_check(params, {1, 0, 0}, 5).preserved);
  EXPECT_TRUE(sol_symmetry_check(params, {0, 0, 0}, 3, BiSequence::make_morse()).preserved);
  const auto decorated = sol_symmetry_check(params, {1, 0, 0}, 5, BiSequence::make_morse());
  EXPECT_FALSE(decorated.preserved);
  ASSERT_TRUE(decorated.witness);
  EXPECT_NE(morse(decorated.witness->i), morse(decorated.witness->i + 1));
  EXPECT_FALSE(sol_symmetry_check(params, {0, Rational(1, 2), 0}, 3).preserved);
  EXPECT_TRUE(sol_symmetry_check(params, {0, 0, 1}, 0).preserved);
}

namespace {

// All tiles within combinatorial distance R of a center.
std::set<TileAddress> ball(const SolParams& params, const TileAddress& center, Index R) {
  std::map<TileAddress, Index> dist{{center, 0}};
  std::deque<TileAddress> queue{center};
  while (!queue.empty()) {
    const auto t = queue.front();
    queue.pop_front();
    if (dist[t] == R) continue;
    for (const auto& nb : neighbors(params, t)) {
      if (dist.emplace(nb.tile, dist[t] + 1).second) queue.push_back(nb.tile);
    }
  }
  std::set<TileAddress> out;
  for (const auto& [t, d] : dist) out.insert(t);
  return out;
}

}  // namespace

TEST(Repetitivity, Examples) {
  const auto omega = BiSequence::make_morse();
  const auto r0 = repetitivity_radius(params_n(2), 0, omega, 1 << 10);
  ASSERT_TRUE(r0.radius);
  EXPECT_LE(*r0.radius, 8);
  const auto r1 = repetitivity_radius(params_n(2), 1, omega, 1 << 10);
  ASSERT_TRUE(r1.radius);
  EXPECT_LE(*r1.radius, 64);
  const auto constant = repetitivity_radius(params_n(2), 1, BiSequence::make_constant(0), 1 << 10);
  ASSERT_TRUE(constant.radius);
  EXPECT_LE(*constant.radius, *r1.radius);
  EXPECT_THROW(repetitivity_radius(SolParams(1.0, 1.5), 1, omega, 16), NotFaceToFace);
}

TEST(Repetitivity, BoundCertifiedByBallSearch) {
  std::mt19937_64 rng(35);
  const auto omega = BiSequence::make_morse();
  for (const auto& [n, r] : {std::pair{2, 0}, {2, 1}, {3, 1}}) {
    const auto params = params_n(n);
    const Index B = 12;
    const auto report = repetitivity_radius(params, r, omega, B);
    ASSERT_TRUE(report.radius);
    const Index R = *report.radius;
    std::set<PatchClassKey> realized;
    for (Index i = -B; i <= B; ++i) {
      for (Index j = 0; j < checked_pow(2, r); ++j) {
        for (Index k = 0; k < checked_pow(n, r); ++k) realized.insert(patch_class_key(params, {i, j, k}, r, omega));
      }
    }
    for (int trial = 0; trial < 12; ++trial) {
      const TileAddress center{static_cast<Index>(rng() % (2 * B + 1)) - B, static_cast<Index>(rng() % 97) - 48,
                               static_cast<Index>(rng() % 97) - 48};
      std::set<PatchClassKey> seen;
      for (const auto& t : ball(params, center, R)) seen.insert(patch_class_key(params, t, r, omega));
      for (const auto& key : realized) {
        ASSERT_TRUE(seen.count(key) != 0) << "n=" << n << " r=" << r << " center " << to_string(center);
      }
    }
  }
}
