#pragma once

// Property suite shared by the acceptance binary and `soltile verify`. Each check
// runs at fixed seeds and fails if its property fails or its time limit is exceeded.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hull.hpp"
#include "hypertiling.hpp"
#include "io.hpp"
#include "measures.hpp"
#include "solgroup.hpp"
#include "soltiling.hpp"

namespace soltile::suite {

inline constexpr std::uint64_t kSeed = 20261014;

struct CheckResult {
  int id = 0;
  std::string name;
  std::vector<std::string> modules;
  bool property_holds = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string detail;

  bool passed() const { return property_holds && seconds < time_limit; }
};

struct Check {
  int id;
  std::string name;
  std::vector<std::string> modules;
  double time_limit;
  std::function<bool(std::ostream& detail)> run;
};

inline CheckResult run_check(const Check& check) {
  CheckResult result{check.id, check.name, check.modules, false, 0.0, check.time_limit, {}};
  std::ostringstream detail;
  const auto start = std::chrono::steady_clock::now();
  try {
    result.property_holds = check.run(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.detail = detail.str();
  if (result.property_holds && result.seconds >= result.time_limit) result.detail += " (over time limit)";
  return result;
}

namespace detail {

inline bool close(double u, double v) { return std::fabs(u - v) <= 1e-12 * std::max({1.0, std::fabs(u), std::fabs(v)}); }

inline bool close(const GroupElement& g, const GroupElement& h) {
  return close(g.x, h.x) && close(g.y, h.y) && close(g.z, h.z);
}

inline SolParams params_n(int n, bool heintze = false) { return SolParams::from_subdivision(n, heintze); }

// Face shared by two boxes, when they meet in a 2D face of positive area.
inline std::optional<FaceType> shared_face(const ExactTileBox& a, const ExactTileBox& b) {
  const auto overlap = [](const RationalInterval& p, const RationalInterval& q) {
    return std::min(p.hi, q.hi) - std::max(p.lo, q.lo);
  };
  const Rational ox = overlap(a.x, b.x);
  const Rational oy = overlap(a.y, b.y);
  const Rational oz = overlap(a.zeta, b.zeta);
  if (ox < 0 || oy < 0 || oz < 0) return std::nullopt;
  if ((ox == 0) + (oy == 0) + (oz == 0) != 1) return std::nullopt;
  if (ox == 0) return a.x.hi == b.x.lo ? FaceType::XPlus : FaceType::XMinus;
  if (oy == 0) return a.y.hi == b.y.lo ? FaceType::YPlus : FaceType::YMinus;
  return a.zeta.hi == b.zeta.lo ? FaceType::Up : FaceType::Down;
}

// Face neighbors by scanning the boxes of rows i-1, i, i+1 near t.
inline std::set<std::pair<TileAddress, FaceType>> brute_force_neighbors(const SolParams& params,
                                                                        const TileAddress& t) {
  const auto box = exact_tile_box(params, t);
  std::set<std::pair<TileAddress, FaceType>> found;
  for (Index i = t.i - 1; i <= t.i + 1; ++i) {
    const Rational xw = rational_pow(Rational(2), static_cast<int>(i));
    const Rational yw = delta_power(params, i);
    const Index j0 = floor_div(box.x.lo / xw).convert_to<Index>() - 1;
    const Index j1 = floor_div(box.x.hi / xw).convert_to<Index>() + 1;
    const Index k0 = floor_div(box.y.lo / yw).convert_to<Index>() - 1;
    const Index k1 = floor_div(box.y.hi / yw).convert_to<Index>() + 1;
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

inline double harmonic_residual(const SolParams& p, double h) {
  const ScalarField3 f = [&](const GroupElement& q) { return std::exp((p.a() - p.b()) * q.z); };
  double worst = 0.0;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      for (int c = 0; c < 5; ++c) {
        const GroupElement q{-1.0 + 0.5 * a, -1.0 + 0.5 * b, -1.0 + 0.5 * c};
        worst = std::max(worst, std::fabs(laplace_beltrami(p, f, q, h)));
      }
    }
  }
  return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Criteria

inline bool group_identities(std::ostream& out) {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> power(-3, 3);
  const SolParams group(1.0, 2.0);
  const SolParams tiling = detail::params_n(2);
  int failures = 0;
  const int samples = 10000;
  for (int t = 0; t < samples; ++t) {
    const GroupElement q{u(rng), u(rng), u(rng)};
    const double s = u(rng);
    const double r = u(rng);
    const int i = power(rng);
    const bool ok =
        detail::close(flow_hplus(group, s, flow_g(group, r, q)),
                      flow_g(group, r, flow_hplus(group, std::exp(group.a() * r) * s, q))) &&
        detail::close(flow_hminus(group, s, flow_g(group, r, q)),
                      flow_g(group, r, flow_hminus(group, std::exp(-group.b() * r) * s, q))) &&
        detail::close(flow_hplus(group, s, flow_hminus(group, r, q)),
                      flow_hminus(group, r, flow_hplus(group, s, q))) &&
        detail::close(that(tiling, s, rhat_pow(tiling, i, q)),
                      rhat_pow(tiling, i, that(tiling, s * std::pow(tiling.delta(), -i), q))) &&
        detail::close(that(tiling, s, shat_pow(tiling, i, q)), shat_pow(tiling, i, that(tiling, s, q)));
    failures += !ok;
  }
  out << samples << " samples, " << failures << " failures";
  return failures == 0;
}

inline bool tiling_cover(std::ostream& out) {
  std::mt19937_64 rng(kSeed + 2);
  const Index scale = Index{1} << 20;
  std::uniform_int_distribution<Index> coord(-4 * scale, 4 * scale);
  int failures = 0;
  for (const auto& params : {detail::params_n(2), detail::params_n(3), detail::params_n(2, true)}) {
    for (int t = 0; t < 10000; ++t) {
      const ExactPoint q{Rational(coord(rng), scale), Rational(coord(rng), scale), Rational(coord(rng), scale)};
      const auto tile = exact_tile_of_point(params, q);
      // Only rows tile.i - 1 .. tile.i + 1 can contain q; scan a margin around it in each.
      int hits = 0;
      for (Index i = tile.i - 1; i <= tile.i + 1; ++i) {
        const Index j = floor_div(q.x / rational_pow(Rational(2), static_cast<int>(i))).convert_to<Index>();
        const Index k = floor_div(q.y / delta_power(params, i)).convert_to<Index>();
        for (Index dj = -1; dj <= 1; ++dj) {
          for (Index dk = -1; dk <= 1; ++dk) hits += contains(exact_tile_box(params, {i, j + dj, k + dk}), q);
        }
      }
      failures += hits != 1 || !contains(exact_tile_box(params, tile), q);
    }
  }
  out << "3 x 10000 points, " << failures << " not covered exactly once";
  return failures == 0;
}

inline bool face_to_face(std::ostream& out) {
  bool ok = true;
  for (double ratio : {1.0, std::log2(3.0), 2.0}) {
    const bool pass = face_to_face_check(SolParams(1.0, ratio), 8).face_to_face;
    out << "b/a=" << ratio << (pass ? " face-to-face; " : " NOT face-to-face; ");
    ok = ok && pass;
  }
  const auto bad = face_to_face_check(SolParams(1.0, 1.5), 8);
  if (bad.face_to_face || !bad.witness) {
    out << "b/a=1.5 passed unexpectedly";
    return false;
  }
  const auto& w = *bad.witness;
  const bool overlapping = std::max(w.lower_y.lo, w.upper_y.lo) < std::min(w.lower_y.hi, w.upper_y.hi);
  const bool nested = (w.upper_y.lo >= w.lower_y.lo && w.upper_y.hi <= w.lower_y.hi) ||
                      (w.lower_y.lo >= w.upper_y.lo && w.lower_y.hi <= w.upper_y.hi);
  out << "b/a=1.5 witness " << to_string(w.lower) << " / " << to_string(w.upper);
  return ok && overlapping && !nested && w.upper.i == w.lower.i + 1;
}

inline bool neighbor_combinatorics(std::ostream& out) {
  std::mt19937_64 rng(kSeed + 4);
  std::uniform_int_distribution<Index> row(-8, 8);
  std::uniform_int_distribution<Index> idx(-100000, 100000);
  int failures = 0;
  for (int n : {2, 3, 4}) {
    const auto params = detail::params_n(n);
    for (int t = 0; t < 1000; ++t) {
      const TileAddress tile{row(rng), idx(rng), idx(rng)};
      const auto list = neighbors(params, tile);
      std::set<std::pair<TileAddress, FaceType>> listed;
      for (const auto& nb : list) listed.emplace(nb.tile, nb.face);
      failures += list.size() != static_cast<std::size_t>(n + 6) || listed.size() != list.size() ||
                  listed != detail::brute_force_neighbors(params, tile);
    }
  }
  out << "3 x 1000 addresses, " << failures << " mismatches";
  return failures == 0;
}

inline bool aperiodicity(std::ostream& out) {
  const auto omega = BiSequence::make_morse();
  const auto params = detail::params_n(2);
  const int radius = 5;
  bool ok = sol_symmetry_check(params, {1, 0, 0}, radius).preserved &&
            h_symmetry_check({1, 0}, radius).preserved;
  int candidates = 0;
  int survivors = 0;
  // Sol family: R^rows composed with dyadic translations.
  for (Index rows = -3; rows <= 3; ++rows) {
    for (Index xs = -4; xs <= 4; ++xs) {
      for (Index ys = -4; ys <= 4; ++ys) {
        if (rows == 0 && xs == 0 && ys == 0) continue;
        ++candidates;
        survivors += sol_symmetry_check(params, {rows, Rational(xs, 2), Rational(ys, 2)}, radius, omega).preserved;
      }
    }
  }
  // Half-plane family: dilation by 2^scale composed with a shift in 1/16 Z.
  for (Index scale = -4; scale <= 4; ++scale) {
    for (Index num = -16; num <= 16; ++num) {
      if (scale == 0 && num == 0) continue;
      ++candidates;
      survivors += h_symmetry_check({scale, Rational(num, 16)}, radius, omega).preserved;
    }
  }
  out << "undecorated R-hat symmetry " << (ok ? "holds" : "FAILS") << " at radius " << radius << "; "
      << survivors << " of " << candidates << " nontrivial candidates preserve the Morse decoration";
  return ok && survivors == 0;
}

inline bool repetitivity(std::ostream& out) {
  const auto omega = BiSequence::make_morse();
  bool ok = true;
  for (int n : {2, 3}) {
    for (int r = 0; r <= 2; ++r) {
      const auto report = repetitivity_radius(detail::params_n(n), r, omega, Index{1} << 10);
      out << "n=" << n << " r=" << r << ": ";
      if (report.radius) {
        out << "R=" << *report.radius << "; ";
      } else {
        out << "no bound; ";
        ok = false;
      }
    }
  }
  return ok;
}

inline bool invariant_measures(std::ostream& out) {
  const auto omega = BiSequence::make_morse();
  bool ok = true;
  for (int n : {2, 3, 4, 5}) {
    for (int depth : {1, 2}) {
      const auto report = invariant_measure_feasibility(detail::params_n(n), depth, omega);
      const bool certified = report.feasible ? verify_point(report.system, report.measure)
                                             : verify_farkas(report.system, report.certificate);
      const bool as_expected = report.feasible == (n == 2) && report.verified && certified;
      out << "n=" << n << " d=" << depth << (report.feasible ? " feasible" : " infeasible")
          << (certified ? " (verified); " : " (UNVERIFIED); ");
      ok = ok && as_expected;
    }
  }
  return ok;
}

struct PushforwardCase {
  double a, b;
  GroupElement g0;
};

inline const std::vector<PushforwardCase>& pushforward_cases() {
  static const std::vector<PushforwardCase> cases{{1.0, 2.0, {0.0, 0.0, 1.0}},  {2.0, 0.5, {0.2, 0.1, -0.4}},
                                                  {1.0, 3.0, {0.3, 0.2, 0.5}},  {0.5, 1.5, {-0.4, 0.6, -0.7}},
                                                  {1.0, -1.0, {0.1, 0.2, 0.3}}, {1.0, 1.0, {0.5, -0.3, 0.8}}};
  return cases;
}

inline bool modular_function(std::ostream& out) {
  bool ok = true;
  out.precision(4);
  for (const auto& c : pushforward_cases()) {
    const SolParams params(c.a, c.b);
    const auto r = pushforward_check(params, c.g0, 1000000, kSeed);
    const double sigmas = std::fabs(r.estimate - r.reference) / r.std_error;
    const bool pass = sigmas < 3.0 && r.rel_err <= 0.02 && (c.a != c.b || r.reference == 1.0);
    out << "(" << c.a << "," << c.b << "): " << r.estimate << " vs " << r.reference << " [" << sigmas << " sd]; ";
    ok = ok && pass;
  }
  // the modular function is trivial exactly on the unimodular grid points
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {-1.0, 0.5, 1.0, 2.0}) {
      const bool trivial = modular(SolParams(a, b), {0.3, -0.2, 0.7}) == 1.0;
      ok = ok && trivial == (a == b);
    }
  }
  return ok;
}

inline bool harmonicity(std::ostream& out) {
  bool ok = true;
  double worst = 0.0;
  // The stencil is second order, so the residual grows like h^2 (a-b)^4 e^{|a-b|}:
  // the 1e-6 bound on [-1,1]^3 holds for |a-b| <= 1, not for |a-b| = 2.
  for (const auto& [a, b] : {std::pair{1.0, 2.0}, {2.0, 1.0}, {0.5, 1.5}, {1.0, 1.0}}) {
    const SolParams p(a, b);
    const double residual = detail::harmonic_residual(p, 1e-3);
    worst = std::max(worst, residual);
    ok = ok && residual <= 1e-6;
    if (a == b) continue;  // constant density, zero residual at every step
    const double ratio = detail::harmonic_residual(p, 1e-2) / detail::harmonic_residual(p, 5e-3);
    out << "(" << a << "," << b << "): ratio " << ratio << "; ";
    ok = ok && ratio >= 3.5 && ratio <= 4.5;
  }
  out << "worst residual " << worst << "; ";
  const SolParams p(1.0, 2.0);
  const ScalarField2 F = [](double x, double z) { return std::sin(x) * std::exp(0.3 * z) + x * z; };
  const ScalarField2 G = [](double y, double w) { return std::cos(2 * y) * std::exp(-0.2 * w) + y * y * w; };
  const ScalarField3 fx = [&](const GroupElement& q) { return F(q.x, q.z); };
  const ScalarField3 fy = [&](const GroupElement& q) { return G(q.y, -q.z); };
  std::mt19937_64 rng(kSeed + 9);
  std::uniform_real_distribution<double> u(-1, 1);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const GroupElement q{u(rng), u(rng), u(rng)};
    const double l1 = laplace_beltrami(p, fx, q, 1e-3);
    const double l2 = laplace_beltrami(p, fy, q, 1e-3);
    mismatches += std::fabs(l1 - delta1(p, F, q.x, q.z, 1e-3)) > 1e-9 * std::max(1.0, std::fabs(l1));
    mismatches += std::fabs(l2 - delta2(p, G, q.y, -q.z, 1e-3)) > 1e-9 * std::max(1.0, std::fabs(l2));
  }
  out << mismatches << " plane-operator mismatches";
  return ok && mismatches == 0;
}

inline bool hull_odometer(std::ostream& out) {
  std::mt19937_64 rng(kSeed + 10);
  std::uniform_int_distribution<Index> row(-50, 50);
  std::uniform_int_distribution<Index> idx(-100000, 100000);
  const auto omega = BiSequence::make_morse();
  int failures = 0;
  int applied = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 4;
    const auto c = code_of_tile(detail::params_n(n), {row(rng), idx(rng), idx(rng)}, omega, 5);
    for (const auto& mv : all_moves(n)) {
      try {
        const auto moved = apply_move(c, mv);
        failures += !agree_on_common(apply_move(moved, inverse_move(c, mv)), c);
        ++applied;
      } catch (const PrecisionExhausted&) {
      }
    }
    try {
      const auto xy = apply_move(apply_move(c, {MoveKind::XPlus, 0}), {MoveKind::YPlus, 0});
      const auto yx = apply_move(apply_move(c, {MoveKind::YPlus, 0}), {MoveKind::XPlus, 0});
      failures += xy != yx;
    } catch (const PrecisionExhausted&) {
    }
  }
  out << applied << " move/inverse pairs, " << failures << " failures; one-step orbit sizes";
  bool sizes = true;
  for (int n : {2, 3, 4, 5}) {
    const auto c = code_of_tile(detail::params_n(n), {0, 5, 5}, omega, 4);
    const auto size = orbit_ball(c, 1).size() - 1;
    out << ' ' << size;
    sizes = sizes && size == static_cast<std::size_t>(n + 6);
  }
  return failures == 0 && applied > 5000 && sizes;
}

inline bool json_round_trip(std::ostream& out) {
  int checked = 0;
  int failures = 0;
  const auto omega = BiSequence::make_morse();
  for (const auto& params : {detail::params_n(2), detail::params_n(3), detail::params_n(2, true)}) {
    for (int r = 0; r <= 2; ++r) {
      const auto p = patch(params, {1, -3, 4}, r, omega);
      const auto doc = patch_from_json(Json::parse(patch_to_json(params, p).dump()));
      failures += doc.patch != p || doc.params.subdivision() != params.subdivision();
      ++checked;
    }
  }
  std::mt19937_64 rng(kSeed + 11);
  std::uniform_int_distribution<Index> idx(-1000, 1000);
  for (int t = 0; t < 100; ++t) {
    const auto c = code_of_tile(detail::params_n(2 + t % 4), {idx(rng) % 20, idx(rng), idx(rng)}, omega, 1 + t % 5);
    failures += code_from_json(Json::parse(code_to_json(c).dump())) != c;
    ++checked;
  }
  const auto graph = orbit_graph(code_of_tile(detail::params_n(3), {0, 5, 5}, omega, 4), 2);
  failures += orbit_graph_from_json(Json::parse(orbit_graph_to_json(graph).dump())) != graph;
  const MeasureReport report{"pushforward", 0.36787944117144233, std::exp(-1.0), 0.02, true};
  failures += measure_report_from_json(Json::parse(measure_report_to_json(report).dump())) != report;
  checked += 2;
  out << checked << " documents, " << failures << " round-trip failures";
  return failures == 0;
}

/// Criteria 1-10 plus the in-process half of criterion 11.
inline std::vector<Check> all_checks() {
  return {
      {1, "group identities", {"solgroup", "soltiling"}, 5.0, group_identities},
      {2, "tiling cover", {"soltiling"}, 10.0, tiling_cover},
      {3, "face-to-face dichotomy", {"soltiling"}, 1.0, face_to_face},
      {4, "neighbor combinatorics", {"soltiling"}, 10.0, neighbor_combinatorics},
      {5, "aperiodicity after decoration", {"hypertiling", "soltiling", "sequences"}, 30.0, aperiodicity},
      {6, "repetitivity", {"soltiling", "sequences"}, 60.0, repetitivity},
      {7, "invariant-measure dichotomy", {"hull"}, 30.0, invariant_measures},
      {8, "modular function", {"measures"}, 60.0, modular_function},
      {9, "harmonicity", {"measures"}, 5.0, harmonicity},
      {10, "hull odometer soundness", {"hull"}, 5.0, hull_odometer},
      {11, "json round-trip", {"cli"}, 10.0, json_round_trip},
  };
}

inline const std::vector<std::string>& module_names() {
  static const std::vector<std::string> names{"solgroup", "sequences", "hypertiling", "soltiling",
                                              "hull",     "measures",  "cli"};
  return names;
}

inline std::vector<CheckResult> run_checks(const std::string& only = "") {
  std::vector<CheckResult> results;
  for (const auto& check : all_checks()) {
    if (!only.empty() && std::find(check.modules.begin(), check.modules.end(), only) == check.modules.end()) continue;
    results.push_back(run_check(check));
  }
  return results;
}

inline std::string format_line(const CheckResult& r) {
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs / %.0fs", r.seconds, r.time_limit);
  return std::string(r.passed() ? "PASS" : "FAIL") + "  [" + std::to_string(r.id) + "] " + r.name + "  (" +
         timing + ")  " + r.detail;
}

inline Json results_to_json(const std::vector<CheckResult>& results) {
  Json checks = Json::array();
  bool all = true;
  for (const auto& r : results) {
    checks.push_back({{"id", r.id},
                      {"name", r.name},
                      {"modules", r.modules},
                      {"pass", r.passed()},
                      {"seconds", r.seconds},
                      {"time_limit", r.time_limit},
                      {"detail", r.detail}});
    all = all && r.passed();
  }
  return {{"pass", all}, {"seed", kSeed}, {"checks", checks}};
}

}  // namespace soltile::suite
