#pragma once

// Finite-precision model of the canonical transversal of the decorated tiling space.
//
// A point of the transversal is a tiling with a base point at the lower corner of a
// tile. Its coordinates are the 2-adic digits of the x-index j, the n-adic digits of
// the y-index k and the row-label sequence seen from the base row. Codes keep only
// finitely many of each, and holonomy moves track how many survive.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "integer.hpp"
#include "lp.hpp"
#include "rational.hpp"
#include "sequences.hpp"
#include "soltiling.hpp"

namespace soltile {

struct TransversalCode {
  int n = 2;
  std::vector<int> u_digits;  // j in base 2, least significant first
  std::vector<int> v_digits;  // k in base n, least significant first
  std::vector<int> labels;    // omega at rows label_offset, label_offset + 1, ... (relative)
  Index label_offset = 0;

  int u_precision() const { return static_cast<int>(u_digits.size()); }
  int v_precision() const { return static_cast<int>(v_digits.size()); }
  /// Number of known label rows strictly below / above the base row.
  Index label_left() const { return -label_offset; }
  Index label_right() const { return label_offset + static_cast<Index>(labels.size()) - 1; }

  Index precision() const {
    return std::min({Index{u_precision()}, Index{v_precision()}, label_left(), label_right()});
  }

  friend auto operator<=>(const TransversalCode&, const TransversalCode&) = default;
};

enum class MoveKind { XPlus, XMinus, YPlus, YMinus, Up, Down };

struct HolonomyMove {
  MoveKind kind = MoveKind::XPlus;
  int digit = 0;  // d for up(d), e for down(e)

  friend bool operator==(const HolonomyMove&, const HolonomyMove&) = default;
};

inline std::string to_string(const HolonomyMove& mv) {
  switch (mv.kind) {
    case MoveKind::XPlus: return "x+1";
    case MoveKind::XMinus: return "x-1";
    case MoveKind::YPlus: return "y+1";
    case MoveKind::YMinus: return "y-1";
    case MoveKind::Up: return "up(" + std::to_string(mv.digit) + ")";
    case MoveKind::Down: return "down(" + std::to_string(mv.digit) + ")";
  }
  return "?";
}

inline HolonomyMove parse_move(const std::string& text) {
  if (text == "x+1") return {MoveKind::XPlus, 0};
  if (text == "x-1") return {MoveKind::XMinus, 0};
  if (text == "y+1") return {MoveKind::YPlus, 0};
  if (text == "y-1") return {MoveKind::YMinus, 0};
  for (const auto& [prefix, kind] : {std::pair{"up(", MoveKind::Up}, {"down(", MoveKind::Down}}) {
    const std::string p(prefix);
    if (text.rfind(p, 0) == 0 && text.size() > p.size() + 1 && text.back() == ')') {
      try {
        return {kind, std::stoi(text.substr(p.size(), text.size() - p.size() - 1))};
      } catch (const std::exception&) {
        break;
      }
    }
  }
  throw ParameterError("unknown holonomy move '" + text + "'");
}

/// All elementary moves for subdivision n.
inline std::vector<HolonomyMove> all_moves(int n) {
  std::vector<HolonomyMove> moves{{MoveKind::XPlus, 0}, {MoveKind::XMinus, 0}, {MoveKind::YPlus, 0},
                                  {MoveKind::YMinus, 0}};
  for (int d = 0; d < n; ++d) moves.push_back({MoveKind::Up, d});
  for (int e = 0; e < 2; ++e) moves.push_back({MoveKind::Down, e});
  return moves;
}

inline void validate(const TransversalCode& c) {
  if (c.n < 2) throw ParameterError("transversal code: n must be >= 2");
  for (int d : c.u_digits) {
    if (d != 0 && d != 1) throw ParameterError("transversal code: u digits must be bits");
  }
  for (int d : c.v_digits) {
    if (d < 0 || d >= c.n) throw ParameterError("transversal code: v digits must lie in [0, n)");
  }
  for (int bit : c.labels) {
    if (bit != 0 && bit != 1) throw ParameterError("transversal code: labels must be bits");
  }
  if (c.label_offset > 0 || c.label_right() < 0) {
    throw ParameterError("transversal code: label window must cover the base row");
  }
}

inline TransversalCode code_of_tile(const SolParams& params, const TileAddress& t,
                                    const BiSequence& omega, int m) {
  const int n = params.require_subdivision();
  if (params.heintze()) throw ParameterError("transversal codes are defined for b > 0");
  if (m < 0) throw ParameterError("code_of_tile: precision must be >= 0");
  TransversalCode code;
  code.n = n;
  Index j = floor_mod(t.j, checked_pow(2, m));
  Index k = floor_mod(t.k, checked_pow(n, m));
  for (int s = 0; s < m; ++s) {
    code.u_digits.push_back(static_cast<int>(j % 2));
    j /= 2;
    code.v_digits.push_back(static_cast<int>(k % n));
    k /= n;
  }
  code.labels = omega.window(t.i - m, t.i + m);
  code.label_offset = -m;
  return code;
}

namespace detail {

// +1 / -1 on a little-endian digit string in base `base`; false if the carry or
// borrow leaves the known digits.
inline bool odometer(std::vector<int>& digits, int base, int step) {
  for (int& digit : digits) {
    digit += step;
    if (digit >= 0 && digit < base) return true;
    digit = step > 0 ? 0 : base - 1;
  }
  return false;
}

}  // namespace detail

inline TransversalCode apply_move(const TransversalCode& c, const HolonomyMove& mv) {
  TransversalCode out = c;
  const auto exhausted = [&](const char* what) -> PrecisionExhausted {
    return PrecisionExhausted(to_string(mv) + ": " + what);
  };
  switch (mv.kind) {
    case MoveKind::XPlus:
    case MoveKind::XMinus:
      if (!detail::odometer(out.u_digits, 2, mv.kind == MoveKind::XPlus ? 1 : -1)) {
        throw exhausted("carry leaves the known u digits");
      }
      return out;
    case MoveKind::YPlus:
    case MoveKind::YMinus:
      if (!detail::odometer(out.v_digits, c.n, mv.kind == MoveKind::YPlus ? 1 : -1)) {
        throw exhausted("carry leaves the known v digits");
      }
      return out;
    case MoveKind::Up:
      // (i, j, k) -> (i+1, floor(j/2), n k + d)
      if (mv.digit < 0 || mv.digit >= c.n) throw ParameterError("up(d): d must lie in [0, n)");
      if (c.u_precision() <= 1) throw exhausted("no u digits left");
      if (c.label_right() <= 1) throw exhausted("no label rows left above");
      out.u_digits.erase(out.u_digits.begin());
      out.v_digits.insert(out.v_digits.begin(), mv.digit);
      out.label_offset -= 1;
      return out;
    case MoveKind::Down:
      // (i, j, k) -> (i-1, 2j + e, floor(k/n))
      if (mv.digit < 0 || mv.digit > 1) throw ParameterError("down(e): e must be 0 or 1");
      if (c.v_precision() <= 1) throw exhausted("no v digits left");
      if (c.label_left() <= 1) throw exhausted("no label rows left below");
      out.v_digits.erase(out.v_digits.begin());
      out.u_digits.insert(out.u_digits.begin(), mv.digit);
      out.label_offset += 1;
      return out;
  }
  return out;
}

/// The move undoing mv on the code c it applies to.
inline HolonomyMove inverse_move(const TransversalCode& c, const HolonomyMove& mv) {
  switch (mv.kind) {
    case MoveKind::XPlus: return {MoveKind::XMinus, 0};
    case MoveKind::XMinus: return {MoveKind::XPlus, 0};
    case MoveKind::YPlus: return {MoveKind::YMinus, 0};
    case MoveKind::YMinus: return {MoveKind::YPlus, 0};
    case MoveKind::Up: return {MoveKind::Down, c.u_digits.empty() ? 0 : c.u_digits.front()};
    case MoveKind::Down: return {MoveKind::Up, c.v_digits.empty() ? 0 : c.v_digits.front()};
  }
  return mv;
}

/// The same move on integer addresses.
inline TileAddress move_tile(int n, const TileAddress& t, const HolonomyMove& mv) {
  switch (mv.kind) {
    case MoveKind::XPlus: return {t.i, t.j + 1, t.k};
    case MoveKind::XMinus: return {t.i, t.j - 1, t.k};
    case MoveKind::YPlus: return {t.i, t.j, t.k + 1};
    case MoveKind::YMinus: return {t.i, t.j, t.k - 1};
    case MoveKind::Up: return {t.i + 1, floor_div(t.j, 2), n * t.k + mv.digit};
    case MoveKind::Down: return {t.i - 1, 2 * t.j + mv.digit, floor_div(t.k, n)};
  }
  return t;
}

/// Restriction of a code to at most the given numbers of digits and label rows.
inline TransversalCode truncate(const TransversalCode& c, Index u_len, Index v_len, Index left,
                                Index right) {
  TransversalCode out;
  out.n = c.n;
  const auto clamp = [](Index want, std::size_t have) {
    return static_cast<std::size_t>(std::clamp<Index>(want, 0, static_cast<Index>(have)));
  };
  out.u_digits.assign(c.u_digits.begin(), c.u_digits.begin() + static_cast<std::ptrdiff_t>(clamp(u_len, c.u_digits.size())));
  out.v_digits.assign(c.v_digits.begin(), c.v_digits.begin() + static_cast<std::ptrdiff_t>(clamp(v_len, c.v_digits.size())));
  const Index lo = -std::min(std::max<Index>(left, 0), c.label_left());
  const Index hi = std::min(std::max<Index>(right, 0), c.label_right());
  for (Index r = lo; r <= hi; ++r) out.labels.push_back(c.labels[static_cast<std::size_t>(r - c.label_offset)]);
  out.label_offset = lo;
  return out;
}

/// Whether two codes agree on every digit and label known to both.
inline bool agree_on_common(const TransversalCode& a, const TransversalCode& b) {
  const Index u = std::min(a.u_precision(), b.u_precision());
  const Index v = std::min(a.v_precision(), b.v_precision());
  const Index left = std::min(a.label_left(), b.label_left());
  const Index right = std::min(a.label_right(), b.label_right());
  return a.n == b.n && truncate(a, u, v, left, right) == truncate(b, u, v, left, right);
}

/// Codes reachable from c in at most `steps` moves, each truncated to the precision
/// guaranteed after `steps` moves (field precision minus steps) and deduplicated.
inline std::set<TransversalCode> orbit_ball(const TransversalCode& c, int steps) {
  validate(c);
  if (steps < 0) throw ParameterError("orbit_ball: steps must be >= 0");
  std::set<TransversalCode> seen{c};
  std::vector<TransversalCode> frontier{c};
  const auto moves = all_moves(c.n);
  for (int s = 0; s < steps; ++s) {
    std::vector<TransversalCode> next;
    for (const auto& code : frontier) {
      for (const auto& mv : moves) {
        try {
          auto moved = apply_move(code, mv);
          if (seen.insert(moved).second) next.push_back(std::move(moved));
        } catch (const PrecisionExhausted&) {
          // pruned
        }
      }
    }
    frontier = std::move(next);
  }
  std::set<TransversalCode> result;
  for (const auto& code : seen) {
    result.insert(truncate(code, c.u_precision() - steps, c.v_precision() - steps,
                           c.label_left() - steps, c.label_right() - steps));
  }
  return result;
}

struct OrbitEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  HolonomyMove move;

  friend bool operator==(const OrbitEdge&, const OrbitEdge&) = default;
};

struct OrbitGraph {
  std::vector<TransversalCode> nodes;  // untruncated codes, nodes[0] is the start
  std::vector<OrbitEdge> edges;

  friend bool operator==(const OrbitGraph&, const OrbitGraph&) = default;
};

inline OrbitGraph orbit_graph(const TransversalCode& c, int steps) {
  validate(c);
  if (steps < 0) throw ParameterError("orbit_graph: steps must be >= 0");
  OrbitGraph graph;
  std::map<TransversalCode, std::size_t> index{{c, 0}};
  graph.nodes.push_back(c);
  std::vector<std::size_t> frontier{0};
  const auto moves = all_moves(c.n);
  for (int s = 0; s < steps; ++s) {
    std::vector<std::size_t> next;
    for (std::size_t from : frontier) {
      for (const auto& mv : moves) {
        try {
          auto moved = apply_move(graph.nodes[from], mv);
          auto [it, inserted] = index.emplace(moved, graph.nodes.size());
          if (inserted) {
            graph.nodes.push_back(std::move(moved));
            next.push_back(it->second);
          }
          graph.edges.push_back({from, it->second, mv});
        } catch (const PrecisionExhausted&) {
        }
      }
    }
    frontier = std::move(next);
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Invariant transverse measures

/// Depth-d cylinder: u mod 2^d, v mod n^d and a realized label window of length 2d+1.
struct Cylinder {
  Index alpha = 0;
  Index beta = 0;
  std::vector<int> window;
};

struct InvariantMeasureReport {
  bool feasible = false;
  int n = 0;
  int depth = 0;
  std::vector<Cylinder> cylinders;
  LinearSystem system;
  std::vector<Rational> measure;      // feasible: mass of each cylinder
  std::vector<Rational> certificate;  // infeasible: one multiplier per row of system
  std::vector<Rational> u_marginal;   // mass of {u_0 = e}
  std::vector<Rational> v_marginal;   // mass of {v_0 = d}
  bool verified = false;              // checked exactly against the unreduced system
  std::string summary;
  std::size_t reduced_vars = 0;
  std::size_t reduced_rows = 0;
};

/// Window scan range used to decide which label windows are realized.
inline constexpr Index kRealizedWindowScan = 4096;

/// Exact test for a probability measure on depth-`depth` cylinders invariant under the
/// generating holonomy maps. x and y odometers permute cylinders; up(d) restricted to
/// {u_0 = e} maps onto {v_0 = d} and down(e) is its inverse.
inline InvariantMeasureReport invariant_measure_feasibility(const SolParams& params, int depth,
                                                            const BiSequence& omega,
                                                            const SolverBudget& budget = {}) {
  const int n = params.require_subdivision();
  if (params.heintze()) throw ParameterError("invariant_measure_feasibility: needs b > 0");
  if (depth < 1) throw ParameterError("invariant_measure_feasibility: depth must be >= 1");
  const Index width = 2 * depth + 1;
  if (width > 62) throw ResourceError("invariant_measure_feasibility: depth too large");
  const Index two_d = checked_pow(2, depth);
  const Index n_d = checked_pow(n, depth);
  const Index n_d1 = n_d / n;
  const Index two_d1 = two_d / 2;

  std::vector<std::uint64_t> windows;
  for (const auto& [word, starts] : factor_occurrences(omega, static_cast<int>(width),
                                                       -kRealizedWindowScan, kRealizedWindowScan)) {
    windows.push_back(word);
  }
  const auto num_w = static_cast<Index>(windows.size());
  const auto total = static_cast<std::size_t>(two_d) * static_cast<std::size_t>(n_d) *
                     static_cast<std::size_t>(num_w);
  if (total > budget.max_variables) {
    throw ResourceError("invariant_measure_feasibility: " + std::to_string(total) +
                        " cylinders exceed the solver budget");
  }
  const auto var = [&](Index alpha, Index beta, Index w) {
    return static_cast<std::size_t>((alpha * n_d + beta) * num_w + w);
  };
  const auto digits = [](Index value, Index base, int count) {
    std::string text;
    for (int s = 0; s < count; ++s) {
      text += std::to_string(value % base);
      value /= base;
    }
    return text;
  };
  const auto bits = [&](std::uint64_t word, Index len) {
    std::string text;
    for (Index t = len - 1; t >= 0; --t) text += ((word >> t) & 1U) ? '1' : '0';
    return text;
  };

  InvariantMeasureReport report;
  report.n = n;
  report.depth = depth;
  LinearSystem& sys = report.system;
  sys.num_vars = total;
  for (Index alpha = 0; alpha < two_d; ++alpha) {
    for (Index beta = 0; beta < n_d; ++beta) {
      for (Index w = 0; w < num_w; ++w) {
        Cylinder cyl{alpha, beta, {}};
        for (Index t = width - 1; t >= 0; --t) cyl.window.push_back(static_cast<int>((windows[w] >> t) & 1U));
        report.cylinders.push_back(std::move(cyl));
      }
    }
  }

  {
    SparseRow row;
    row.rhs = 1;
    row.label = "total mass";
    for (std::size_t v = 0; v < total; ++v) row.terms.emplace_back(v, Rational(1));
    sys.rows.push_back(std::move(row));
  }
  // odometers
  for (Index alpha = 0; alpha < two_d; ++alpha) {
    for (Index beta = 0; beta < n_d; ++beta) {
      for (Index w = 0; w < num_w; ++w) {
        const std::string where = " [u=" + digits(alpha, 2, depth) + " v=" + digits(beta, n, depth) +
                                  " w=" + bits(windows[w], width) + "]";
        sys.rows.push_back({{{var(alpha, beta, w), 1}, {var((alpha + 1) % two_d, beta, w), -1}}, 0,
                            "x+1" + where});
        sys.rows.push_back({{{var(alpha, beta, w), 1}, {var(alpha, (beta + 1) % n_d, w), -1}}, 0,
                            "y+1" + where});
      }
    }
  }
  // vertical moves, on depth-(d-1) image cylinders: up(dd) restricted to {u_0 = e}
  // sends the cylinder (alpha, beta', P) with beta' mod n^{d-1} and the upper 2d label
  // rows P onto (alpha >> 1 mod 2^{d-1}, n beta' + dd, lower 2d rows P).
  const Index sub_len = width - 1;
  const std::uint64_t sub_mask = (std::uint64_t{1} << sub_len) - 1;
  std::set<std::uint64_t> patterns;
  for (auto word : windows) {
    patterns.insert(word & sub_mask);  // rows i-d+1 .. i+d
    patterns.insert(word >> 1);        // rows i-d .. i+d-1
  }
  for (int e = 0; e < 2; ++e) {
    for (int dd = 0; dd < n; ++dd) {
      for (Index alpha = e; alpha < two_d; alpha += 2) {
        for (Index beta_low = 0; beta_low < n_d1; ++beta_low) {
          for (auto pattern : patterns) {
            SparseRow up_row;
            for (Index beta = beta_low; beta < n_d; beta += n_d1) {
              for (Index w = 0; w < num_w; ++w) {
                if ((windows[w] & sub_mask) == pattern) up_row.terms.emplace_back(var(alpha, beta, w), 1);
              }
            }
            const Index beta_image = n * beta_low + dd;
            for (Index alpha2 = alpha >> 1; alpha2 < two_d; alpha2 += two_d1) {
              for (Index w = 0; w < num_w; ++w) {
                if ((windows[w] >> 1) == pattern) up_row.terms.emplace_back(var(alpha2, beta_image, w), -1);
              }
            }
            if (up_row.terms.empty()) continue;
            const std::string where = " [u=" + digits(alpha, 2, depth) + " v=" +
                                      digits(beta_low, n, depth - 1) + "* w=" + bits(pattern, sub_len) + "]";
            up_row.label = "up(" + std::to_string(dd) + ") on u0=" + std::to_string(e) + where;
            SparseRow down_row = up_row;
            for (auto& term : down_row.terms) term.second = -term.second;
            down_row.label = "down(" + std::to_string(e) + ") on v0=" + std::to_string(dd) + where;
            sys.rows.push_back(std::move(up_row));
            sys.rows.push_back(std::move(down_row));
          }
        }
      }
    }
  }

  const auto result = solve_nonnegative_feasibility(sys, budget);
  report.feasible = result.feasible;
  report.reduced_vars = result.reduced_vars;
  report.reduced_rows = result.reduced_rows;
  std::ostringstream text;
  text << "n=" << n << " depth=" << depth << ": " << total << " cylinders, " << sys.rows.size()
       << " constraints (" << result.reduced_vars << " x " << result.reduced_rows << " after presolve)\n";
  if (result.feasible) {
    report.measure = result.point;
    report.verified = verify_point(sys, report.measure);
    report.u_marginal.assign(2, Rational(0));
    report.v_marginal.assign(static_cast<std::size_t>(n), Rational(0));
    for (std::size_t v = 0; v < total; ++v) {
      report.u_marginal[static_cast<std::size_t>(report.cylinders[v].alpha % 2)] += report.measure[v];
      report.v_marginal[static_cast<std::size_t>(report.cylinders[v].beta % n)] += report.measure[v];
    }
    text << "feasible: invariant probability measure found\n";
    text << "mass(u0=e):";
    for (const auto& m : report.u_marginal) text << ' ' << to_string(m);
    text << "\nmass(v0=d):";
    for (const auto& m : report.v_marginal) text << ' ' << to_string(m);
    text << '\n';
  } else {
    report.certificate = result.farkas;
    report.verified = verify_farkas(sys, report.certificate);
    text << "infeasible: multipliers y with y^T A >= 0 and y^T b < 0\n";
    text << "x-odometer invariance forces mass(u0=0) = mass(u0=1) = 1/2; y-odometer invariance "
            "forces mass(v0=d) = 1/"
         << n << ". Each up(d) maps {u0=e} onto {v0=d}, so sum_d mass(v0=d) = " << n
         << " mass(u0=e), i.e. 1 = " << n << "/2.\n";
    // vertical and total-mass rows first; odometer rows only carry the presolve merges
    std::size_t shown = 0;
    std::size_t odometer_rows = 0;
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
      if (report.certificate[r] == 0) continue;
      const auto& label = sys.rows[r].label;
      if (label.rfind("x+1", 0) == 0 || label.rfind("y+1", 0) == 0) {
        ++odometer_rows;
        continue;
      }
      if (shown++ < 12) text << "  " << to_string(report.certificate[r]) << " * " << label << '\n';
    }
    if (shown > 12) text << "  ... " << (shown - 12) << " more vertical-move multipliers\n";
    text << "  plus " << odometer_rows << " odometer-row multipliers\n";
  }
  text << "certificate check: " << (report.verified ? "ok" : "FAILED") << '\n';
  report.summary = text.str();
  return report;
}

}  // namespace soltile
