#pragma once

// Exact feasibility of { m : A m = b, m >= 0 } over the rationals.
//
// Doubleton rows c*m_a - c*m_b = 0 are presolved by merging variables; the reduced
// system goes through a dense phase-I simplex with Bland's rule. Points and Farkas
// certificates are reported for the original (unreduced) system and can be checked
// independently with verify_point / verify_farkas.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace soltile {

struct SparseRow {
  std::vector<std::pair<std::size_t, Rational>> terms;  // (variable, coefficient)
  Rational rhs = 0;
  std::string label;
};

struct LinearSystem {
  std::size_t num_vars = 0;
  std::vector<SparseRow> rows;
};

struct SolverBudget {
  std::size_t max_variables = 500000;
  std::size_t max_reduced_cells = 4000000;  // reduced rows x reduced columns
};

struct FeasibilityResult {
  bool feasible = false;
  std::vector<Rational> point;   // feasible: m >= 0 with A m = b
  std::vector<Rational> farkas;  // infeasible: y with y^T A >= 0 and y^T b < 0
  std::size_t reduced_vars = 0;
  std::size_t reduced_rows = 0;
  std::size_t pivots = 0;
};

inline bool verify_point(const LinearSystem& system, const std::vector<Rational>& point) {
  if (point.size() != system.num_vars) return false;
  for (const auto& value : point) {
    if (value < 0) return false;
  }
  for (const auto& row : system.rows) {
    Rational lhs = 0;
    for (const auto& [var, coef] : row.terms) lhs += coef * point[var];
    if (lhs != row.rhs) return false;
  }
  return true;
}

inline bool verify_farkas(const LinearSystem& system, const std::vector<Rational>& y) {
  if (y.size() != system.rows.size()) return false;
  std::vector<Rational> column(system.num_vars, Rational(0));
  Rational yb = 0;
  for (std::size_t r = 0; r < system.rows.size(); ++r) {
    if (y[r] == 0) continue;
    for (const auto& [var, coef] : system.rows[r].terms) column[var] += y[r] * coef;
    yb += y[r] * system.rows[r].rhs;
  }
  if (!(yb < 0)) return false;
  return std::all_of(column.begin(), column.end(), [](const Rational& c) { return c >= 0; });
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t size) : parent_(size) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Dense phase-I simplex for { M : A M = b, M >= 0 }. Returns the point or the dual
// ray y (y^T A >= 0, y^T b < 0).
struct DenseOutcome {
  bool feasible = false;
  std::vector<Rational> point;
  std::vector<Rational> farkas;
  std::size_t pivots = 0;
};

inline DenseOutcome dense_phase_one(const std::vector<std::vector<Rational>>& A,
                                    const std::vector<Rational>& b, std::size_t cols) {
  const std::size_t rows = A.size();
  const std::size_t width = cols + rows + 1;  // structural | artificial | rhs
  std::vector<std::vector<Rational>> T(rows, std::vector<Rational>(width, Rational(0)));
  std::vector<int> sign(rows, 1);
  for (std::size_t i = 0; i < rows; ++i) {
    sign[i] = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < cols; ++j) T[i][j] = sign[i] * A[i][j];
    T[i][cols + i] = 1;
    T[i][width - 1] = sign[i] * b[i];
  }
  // reduced costs of min sum(artificial)
  std::vector<Rational> cost(width, Rational(0));
  for (std::size_t j = 0; j < width; ++j) {
    if (j >= cols && j < cols + rows) continue;
    for (std::size_t i = 0; i < rows; ++i) cost[j] -= T[i][j];
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = cols + i;

  DenseOutcome outcome;
  for (;;) {
    std::optional<std::size_t> entering;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (cost[j] < 0) {
        entering = j;
        break;
      }
    }
    if (!entering) break;
    const std::size_t e = *entering;
    std::optional<std::size_t> leaving;
    Rational best_ratio;
    for (std::size_t i = 0; i < rows; ++i) {
      if (!(T[i][e] > 0)) continue;
      Rational ratio = T[i][width - 1] / T[i][e];
      if (!leaving || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[*leaving])) {
        leaving = i;
        best_ratio = std::move(ratio);
      }
    }
    // phase I is bounded below by 0, so an entering column always has a leaving row
    if (!leaving) throw ResourceError("dense_phase_one: unbounded phase-I direction");
    const std::size_t l = *leaving;
    const Rational pivot = T[l][e];
    for (auto& value : T[l]) value /= pivot;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == l || T[i][e] == 0) continue;
      const Rational factor = T[i][e];
      for (std::size_t j = 0; j < width; ++j) {
        if (T[l][j] != 0) T[i][j] -= factor * T[l][j];
      }
    }
    if (cost[e] != 0) {
      const Rational factor = cost[e];
      for (std::size_t j = 0; j < width; ++j) {
        if (T[l][j] != 0) cost[j] -= factor * T[l][j];
      }
    }
    basis[l] = e;
    ++outcome.pivots;
  }
  // -cost[rhs] is the phase-I optimum
  if (cost[width - 1] == 0) {
    outcome.feasible = true;
    outcome.point.assign(cols, Rational(0));
    for (std::size_t i = 0; i < rows; ++i) {
      if (basis[i] < cols) outcome.point[basis[i]] = T[i][width - 1];
    }
    return outcome;
  }
  // duals pi_i = 1 - reduced cost of artificial i; certificate y = -S pi
  outcome.farkas.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const Rational pi = Rational(1) - cost[cols + i];
    outcome.farkas[i] = -sign[i] * pi;
  }
  return outcome;
}

}  // namespace detail

inline FeasibilityResult solve_nonnegative_feasibility(const LinearSystem& system,
                                                       const SolverBudget& budget = {}) {
  if (system.num_vars > budget.max_variables) {
    throw ResourceError("exact LP: " + std::to_string(system.num_vars) +
                        " variables exceed the budget of " + std::to_string(budget.max_variables));
  }
  const std::size_t nv = system.num_vars;
  const std::size_t nr = system.rows.size();

  // 1. merge variables tied by doubleton equalities; keep the spanning-forest edges
  struct MergeEdge {
    std::size_t row;
    std::size_t a;  // coefficient +c
    std::size_t b;  // coefficient -c
    Rational c;
  };
  detail::UnionFind uf(nv);
  std::vector<MergeEdge> tree;
  std::vector<bool> is_merge_row(nr, false);
  for (std::size_t r = 0; r < nr; ++r) {
    const auto& row = system.rows[r];
    if (row.terms.size() != 2 || row.rhs != 0) continue;
    const auto& [va, ca] = row.terms[0];
    const auto& [vb, cb] = row.terms[1];
    if (va == vb || ca + cb != 0 || ca == 0) continue;
    is_merge_row[r] = true;
    if (uf.unite(va, vb)) tree.push_back({r, va, vb, ca});
  }
  std::map<std::size_t, std::size_t> class_of_root;
  std::vector<std::size_t> var_class(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto root = uf.find(v);
    auto [it, inserted] = class_of_root.emplace(root, class_of_root.size());
    var_class[v] = it->second;
  }
  const std::size_t nc = class_of_root.size();
  std::vector<std::size_t> class_size(nc, 0);
  for (std::size_t v = 0; v < nv; ++v) ++class_size[var_class[v]];

  // 2. reduce the remaining rows onto classes and drop duplicates
  std::vector<std::vector<Rational>> reduced_A;
  std::vector<Rational> reduced_b;
  std::vector<std::size_t> reduced_origin;  // original row of each reduced row
  std::map<std::pair<std::vector<std::pair<std::size_t, Rational>>, Rational>, std::size_t> seen;
  for (std::size_t r = 0; r < nr; ++r) {
    if (is_merge_row[r]) continue;
    std::map<std::size_t, Rational> sums;
    for (const auto& [var, coef] : system.rows[r].terms) sums[var_class[var]] += coef;
    std::vector<std::pair<std::size_t, Rational>> key;
    for (auto& [cls, coef] : sums) {
      if (coef != 0) key.emplace_back(cls, coef);
    }
    if (key.empty() && system.rows[r].rhs == 0) continue;
    auto [it, inserted] = seen.emplace(std::make_pair(key, system.rows[r].rhs), reduced_A.size());
    if (!inserted) continue;
    if ((reduced_A.size() + 1) * nc > budget.max_reduced_cells) {
      throw ResourceError("exact LP: reduced system exceeds the dense budget");
    }
    std::vector<Rational> dense(nc, Rational(0));
    for (const auto& [cls, coef] : key) dense[cls] = coef;
    reduced_A.push_back(std::move(dense));
    reduced_b.push_back(system.rows[r].rhs);
    reduced_origin.push_back(r);
  }

  FeasibilityResult result;
  result.reduced_vars = nc;
  result.reduced_rows = reduced_A.size();
  const auto outcome = detail::dense_phase_one(reduced_A, reduced_b, nc);
  result.pivots = outcome.pivots;

  if (outcome.feasible) {
    result.feasible = true;
    result.point.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) result.point[v] = outcome.point[var_class[v]];
    return result;
  }

  // 3. lift the certificate: multipliers on representative rows first ...
  result.farkas.assign(nr, Rational(0));
  for (std::size_t q = 0; q < reduced_origin.size(); ++q) result.farkas[reduced_origin[q]] = outcome.farkas[q];
  std::vector<Rational> residual(nv, Rational(0));
  for (std::size_t r = 0; r < nr; ++r) {
    if (result.farkas[r] == 0) continue;
    for (const auto& [var, coef] : system.rows[r].terms) residual[var] += result.farkas[r] * coef;
  }
  // ... then route each class's surplus along its spanning tree so that every
  // variable receives the (nonnegative) class average.
  std::vector<Rational> class_total(nc, Rational(0));
  for (std::size_t v = 0; v < nv; ++v) class_total[var_class[v]] += residual[v];
  std::vector<Rational> demand(nv);  // amount still to be added at v
  for (std::size_t v = 0; v < nv; ++v) {
    demand[v] = class_total[var_class[v]] / class_size[var_class[v]] - residual[v];
  }
  // adjacency of the forest
  std::vector<std::vector<std::size_t>> incident(nv);
  for (std::size_t e = 0; e < tree.size(); ++e) {
    incident[tree[e].a].push_back(e);
    incident[tree[e].b].push_back(e);
  }
  std::vector<bool> visited(nv, false);
  for (std::size_t root = 0; root < nv; ++root) {
    if (visited[root]) continue;
    // iterative DFS recording (vertex, parent edge) in preorder
    std::vector<std::pair<std::size_t, std::size_t>> order;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, tree.size()}};
    visited[root] = true;
    while (!stack.empty()) {
      const auto [v, via] = stack.back();
      stack.pop_back();
      order.emplace_back(v, via);
      for (std::size_t e : incident[v]) {
        const std::size_t w = tree[e].a == v ? tree[e].b : tree[e].a;
        if (!visited[w]) {
          visited[w] = true;
          stack.emplace_back(w, e);
        }
      }
    }
    // leaves first: the parent edge of v carries v's subtree demand
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto [v, via] = *it;
      if (via == tree.size()) continue;
      const MergeEdge& edge = tree[via];
      // multiplier z contributes +c z to a and -c z to b
      const std::size_t parent = edge.a == v ? edge.b : edge.a;
      const Rational z = (edge.a == v ? demand[v] : -demand[v]) / edge.c;
      result.farkas[edge.row] += z;
      demand[parent] += demand[v];
      demand[v] = 0;
    }
  }
  return result;
}

}  // namespace soltile
