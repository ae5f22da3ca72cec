#include <gtest/gtest.h>

#include <random>

#include "soltile/hull.hpp"

using namespace soltile;

namespace {

SolParams params_n(int n) { return SolParams::from_subdivision(n); }

TransversalCode random_code(std::mt19937_64& rng, int n, int m) {
  std::uniform_int_distribution<Index> row(-50, 50);
  std::uniform_int_distribution<Index> idx(-100000, 100000);
  return code_of_tile(params_n(n), {row(rng), idx(rng), idx(rng)}, BiSequence::make_morse(), m);
}

}  // namespace

TEST(CodeOfTile, Examples) {
  const auto omega = BiSequence::make_morse();
  const auto c = code_of_tile(params_n(2), {0, 0, 0}, omega, 2);
  EXPECT_EQ(c.u_digits, (std::vector<int>{0, 0}));
  EXPECT_EQ(c.v_digits, (std::vector<int>{0, 0}));
  EXPECT_EQ(c.labels, (std::vector<int>{1, 0, 0, 1, 1}));
  EXPECT_EQ(c.label_offset, -2);
  const auto d = code_of_tile(params_n(2), {0, 5, 3}, omega, 3);
  EXPECT_EQ(d.u_digits, (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(d.v_digits, (std::vector<int>{1, 1, 0}));
  // negative indices reduce into range
  const auto e = code_of_tile(params_n(3), {0, -1, -1}, omega, 2);
  EXPECT_EQ(e.u_digits, (std::vector<int>{1, 1}));
  EXPECT_EQ(e.v_digits, (std::vector<int>{2, 2}));
  EXPECT_THROW(code_of_tile(SolParams::from_subdivision(2, true), {0, 0, 0}, omega, 2), ParameterError);
}

TEST(CodeOfTile, LabelWindowsShiftWithRow) {
  const auto omega = BiSequence::make_morse();
  for (Index i = -10; i <= 10; ++i) {
    const auto lower = code_of_tile(params_n(2), {i, 3, 4}, omega, 4);
    const auto upper = code_of_tile(params_n(2), {i + 1, 3, 4}, omega, 4);
    for (std::size_t t = 0; t + 1 < lower.labels.size(); ++t) EXPECT_EQ(upper.labels[t], lower.labels[t + 1]);
  }
}

TEST(ApplyMove, Examples) {
  TransversalCode c;
  c.u_digits = {0, 0};
  c.v_digits = {0, 0};
  c.labels = {0, 1, 1};
  c.label_offset = -1;
  EXPECT_EQ(apply_move(c, {MoveKind::XPlus, 0}).u_digits, (std::vector<int>{1, 0}));
  TransversalCode ones = c;
  ones.u_digits = {1, 1, 1};
  EXPECT_THROW(apply_move(ones, {MoveKind::XPlus, 0}), PrecisionExhausted);
  EXPECT_THROW(apply_move(c, {MoveKind::XMinus, 0}), PrecisionExhausted);
  EXPECT_THROW(apply_move(c, {MoveKind::Up, 2}), ParameterError);
  EXPECT_THROW(apply_move(c, {MoveKind::Down, 2}), ParameterError);
  // label precision: one row above the base row is all that is known
  EXPECT_THROW(apply_move(c, {MoveKind::Up, 0}), PrecisionExhausted);
  EXPECT_THROW(apply_move(c, {MoveKind::Down, 0}), PrecisionExhausted);
}

TEST(ApplyMove, UpThenDownRestoresCode) {
  const auto omega = BiSequence::make_morse();
  const auto c = code_of_tile(params_n(2), {0, 6, 5}, omega, 4);
  const auto up = apply_move(c, {MoveKind::Up, 1});
  EXPECT_EQ(up.u_precision(), 3);
  EXPECT_EQ(up.v_precision(), 5);
  EXPECT_EQ(up.label_right(), 3);
  const auto back = apply_move(up, {MoveKind::Down, c.u_digits.front()});
  EXPECT_EQ(back, c);
  EXPECT_EQ(inverse_move(c, {MoveKind::Up, 1}), (HolonomyMove{MoveKind::Down, c.u_digits.front()}));
}

TEST(ApplyMove, MovesMatchTileAddresses) {
  std::mt19937_64 rng(51);
  const auto omega = BiSequence::make_morse();
  std::uniform_int_distribution<Index> idx(-5000, 5000);
  for (int n : {2, 3}) {
    const auto params = params_n(n);
    for (int trial = 0; trial < 300; ++trial) {
      const TileAddress t{idx(rng) % 40, idx(rng), idx(rng)};
      const auto c = code_of_tile(params, t, omega, 5);
      for (const auto& mv : all_moves(n)) {
        TransversalCode moved;
        try {
          moved = apply_move(c, mv);
        } catch (const PrecisionExhausted&) {
          continue;
        }
        const auto direct = code_of_tile(params, move_tile(n, t, mv), omega, 6);
        EXPECT_TRUE(agree_on_common(moved, direct)) << to_string(mv);
      }
    }
  }
}

TEST(ApplyMove, InversesOnRandomCodes) {
  std::mt19937_64 rng(52);
  int applied = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 4;
    const auto c = random_code(rng, n, 4);
    for (const auto& mv : all_moves(n)) {
      TransversalCode moved;
      try {
        moved = apply_move(c, mv);
      } catch (const PrecisionExhausted&) {
        continue;
      }
      const auto back = apply_move(moved, inverse_move(c, mv));
      ASSERT_TRUE(agree_on_common(back, c)) << to_string(mv);
      ++applied;
    }
  }
  EXPECT_GT(applied, 5000);
}

TEST(ApplyMove, OdometersCommute) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = random_code(rng, 2 + trial % 3, 5);
    try {
      const auto a = apply_move(apply_move(c, {MoveKind::XPlus, 0}), {MoveKind::YPlus, 0});
      const auto b = apply_move(apply_move(c, {MoveKind::YPlus, 0}), {MoveKind::XPlus, 0});
      EXPECT_EQ(a, b);
    } catch (const PrecisionExhausted&) {
    }
  }
}

TEST(ApplyMove, UpConjugatesXToItsSquare) {
  std::mt19937_64 rng(54);
  std::uniform_int_distribution<Index> idx(-100000, 100000);
  for (int n : {2, 3, 5}) {
    for (int trial = 0; trial < 500; ++trial) {
      const TileAddress t{idx(rng) % 30, idx(rng), idx(rng)};
      for (int d = 0; d < n; ++d) {
        const HolonomyMove up{MoveKind::Up, d};
        const HolonomyMove x{MoveKind::XPlus, 0};
        const auto lhs = move_tile(n, move_tile(n, t, up), x);
        const auto rhs = move_tile(n, move_tile(n, move_tile(n, t, x), x), up);
        EXPECT_EQ(lhs, rhs);
      }
    }
  }
}

TEST(CodeFaithfulness, AgreesWithPatchClassKey) {
  std::mt19937_64 rng(55);
  const auto omega = BiSequence::make_morse();
  std::uniform_int_distribution<Index> row(-6, 6);
  std::uniform_int_distribution<Index> idx(0, 15);
  int equal = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 2 + trial % 2;
    const int m = 1 + trial % 3;
    const auto params = params_n(n);
    const TileAddress a{row(rng), idx(rng), idx(rng)};
    const TileAddress b{row(rng), idx(rng), idx(rng)};
    const bool codes_equal = code_of_tile(params, a, omega, m) == code_of_tile(params, b, omega, m);
    const bool keys_equal = patch_class_key(params, a, m, omega) == patch_class_key(params, b, m, omega);
    ASSERT_EQ(codes_equal, keys_equal);
    equal += codes_equal;
  }
  EXPECT_GT(equal, 0);
}

TEST(OrbitBall, Basics) {
  const auto omega = BiSequence::make_morse();
  const auto c = code_of_tile(params_n(2), {0, 0, 0}, omega, 4);
  const auto zero = orbit_ball(c, 0);
  ASSERT_EQ(zero.size(), 1U);
  EXPECT_EQ(*zero.begin(), c);
  // from j = k = 0 the x-1 and y-1 borrows leave the known digits
  EXPECT_EQ(orbit_ball(c, 1).size(), 1U + 6U);
  for (int n : {2, 3, 4}) {
    const auto interior = code_of_tile(params_n(n), {0, 5, 5}, omega, 4);
    EXPECT_EQ(orbit_ball(interior, 1).size(), 1U + static_cast<std::size_t>(n) + 6U) << n;
  }
  EXPECT_THROW(orbit_ball(c, -1), ParameterError);
}

TEST(OrbitBall, ReachabilityIsSymmetric) {
  const auto omega = BiSequence::make_morse();
  for (int n : {2, 3}) {
    const auto c = code_of_tile(params_n(n), {0, 21, 22}, omega, 7);
    const int steps = 2;
    for (const auto& other : orbit_ball(c, steps)) {
      bool found = false;
      for (const auto& back : orbit_ball(other, steps)) found = found || agree_on_common(back, c);
      EXPECT_TRUE(found);
    }
  }
}

TEST(OrbitGraph, NodesAndEdges) {
  const auto omega = BiSequence::make_morse();
  const auto c = code_of_tile(params_n(2), {0, 5, 5}, omega, 4);
  const auto g0 = orbit_graph(c, 0);
  EXPECT_EQ(g0.nodes.size(), 1U);
  EXPECT_TRUE(g0.edges.empty());
  const auto g1 = orbit_graph(c, 1);
  EXPECT_EQ(g1.nodes.size(), 9U);
  EXPECT_EQ(g1.edges.size(), 8U);
  for (const auto& e : g1.edges) EXPECT_EQ(apply_move(g1.nodes[e.from], e.move), g1.nodes[e.to]);
}

TEST(Moves, ParseRoundTrip) {
  for (const auto& mv : all_moves(4)) EXPECT_EQ(parse_move(to_string(mv)), mv);
  EXPECT_THROW(parse_move("up(x)"), ParameterError);
  EXPECT_THROW(parse_move("left"), ParameterError);
}

TEST(InvariantMeasure, Dichotomy) {
  const auto omega = BiSequence::make_morse();
  for (int n : {2, 3, 4, 5}) {
    for (int depth : {1, 2}) {
      const auto report = invariant_measure_feasibility(params_n(n), depth, omega);
      EXPECT_EQ(report.feasible, n == 2) << n << " " << depth;
      EXPECT_TRUE(report.verified);
      if (report.feasible) {
        EXPECT_EQ(report.u_marginal, (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
        EXPECT_EQ(report.v_marginal, (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
      } else {
        EXPECT_TRUE(verify_farkas(report.system, report.certificate));
        EXPECT_NE(report.summary.find("infeasible"), std::string::npos);
      }
    }
  }
}

TEST(InvariantMeasure, OtherSequencesAndErrors) {
  const auto oxtoby = BiSequence::make_oxtoby({2, 4, 8});
  EXPECT_TRUE(invariant_measure_feasibility(params_n(2), 1, oxtoby).feasible);
  EXPECT_FALSE(invariant_measure_feasibility(params_n(3), 1, BiSequence::make_constant(1)).feasible);
  EXPECT_THROW(invariant_measure_feasibility(params_n(2), 0, oxtoby), ParameterError);
  EXPECT_THROW(invariant_measure_feasibility(SolParams(1.0, 1.5), 1, oxtoby), NotFaceToFace);
  SolverBudget tiny;
  tiny.max_variables = 100;
  EXPECT_THROW(invariant_measure_feasibility(params_n(2), 2, oxtoby, tiny), ResourceError);
}
