#pragma once

// Bilateral 0/1 sequences used to decorate the rows of the tilings, plus
// finite-scale repetitivity and aperiodicity testers.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "integer.hpp"

namespace soltile {

/// One-sided Thue-Morse word t(i) = parity of the binary digit sum of i, reflected
/// to the left as omega_i = t(-1-i). The result is the bilateral fixed point 0.0 of
/// the Morse substitution.
inline int morse(Index i) {
  const auto m = static_cast<std::uint64_t>(i >= 0 ? i : -1 - i);
  return std::popcount(m) & 1;
}

/// Nested-block (Oxtoby-type) sequence over a divisibility chain of block lengths.
///
/// With l_0 = 1 < l_1 < l_2 < ... and q_k = l_k / l_{k-1}, two families of blocks are
///   X_0 = 1, Y_0 = 0,  X_k = X_{k-1} Y_{k-1}^{q_k - 1},  Y_k = Y_{k-1} X_{k-1}^{q_k - 1}.
/// The right half is the limit of X_k. The left half is the limit of L_k read from the
/// right, with L_k = Y_k for even k and X_k for odd k (each L_k is a suffix of L_{k+1}).
/// Past the last listed length the chain continues with the last ratio.
class OxtobySequence {
 public:
  explicit OxtobySequence(std::vector<Index> block_lengths) : lengths_(std::move(block_lengths)) {
    if (lengths_.empty()) throw ParameterError("oxtoby: block_lengths must not be empty");
    Index previous = 1;
    for (Index length : lengths_) {
      if (length <= previous) {
        throw ParameterError("oxtoby: block lengths must be strictly increasing and > 1");
      }
      if (length % previous != 0) {
        throw ParameterError("oxtoby: each block length must divide the next");
      }
      previous = length;
    }
  }

  const std::vector<Index>& block_lengths() const { return lengths_; }

  int operator()(Index i) const {
    if (i >= 0) return evaluate(i, 0);
    const Index depth_from_right = -1 - i;
    // smallest level K with l_K > depth_from_right; L_K is X_K (odd K) or Y_K (even K)
    std::size_t level = 0;
    Index length = 1;
    while (length <= depth_from_right) {
      length = level_length(level + 1);
      ++level;
    }
    const int base_type = (level % 2 == 1) ? 1 : 0;
    return evaluate(length - 1 - depth_from_right, base_type == 1 ? 0 : 1);
  }

 private:
  Index level_length(std::size_t level) const {
    if (level == 0) return 1;
    if (level <= lengths_.size()) return lengths_[level - 1];
    const Index ratio = lengths_.size() == 1 ? lengths_[0]
                                             : lengths_.back() / lengths_[lengths_.size() - 2];
    Index length = lengths_.back();
    for (std::size_t k = lengths_.size(); k < level; ++k) {
      if (length > (Index{1} << 61) / ratio) throw OverflowError("oxtoby: index out of range");
      length *= ratio;
    }
    return length;
  }

  // Value at position p >= 0 of the level-limit block starting with type X (flip=0)
  // or Y (flip=1): every nonzero mixed-radix digit of p toggles the block type.
  int evaluate(Index p, int flip) const {
    int type_is_y = flip;
    std::size_t level = 1;
    Index below = 1;
    while (below <= p) {
      const Index above = level_length(level);
      const Index digit = (p / below) % (above / below);
      if (digit != 0) type_is_y ^= 1;
      below = above;
      ++level;
    }
    return type_is_y ? 0 : 1;
  }

  std::vector<Index> lengths_;
};

/// Periodic extension of a finite pattern: omega_i = pattern[i mod |pattern|].
struct PeriodicSequence {
  std::vector<int> pattern;
};

/// Finite window omega_first .. omega_{first + |bits| - 1}; undefined outside.
struct ExplicitWindow {
  Index first = 0;
  std::vector<int> bits;
};

struct MorseKind {};

/// A deterministic bilateral 0/1 sequence.
class BiSequence {
 public:
  using Kind = std::variant<MorseKind, OxtobySequence, PeriodicSequence, ExplicitWindow>;

  BiSequence() : kind_(MorseKind{}) {}
  explicit BiSequence(Kind kind) : kind_(std::move(kind)) {
    if (auto* periodic = std::get_if<PeriodicSequence>(&kind_)) {
      if (periodic->pattern.empty()) throw ParameterError("periodic sequence needs a pattern");
      check_bits(periodic->pattern);
    }
    if (auto* window = std::get_if<ExplicitWindow>(&kind_)) check_bits(window->bits);
  }

  static BiSequence make_morse() { return BiSequence(MorseKind{}); }
  static BiSequence make_oxtoby(std::vector<Index> block_lengths) {
    return BiSequence(OxtobySequence(std::move(block_lengths)));
  }
  static BiSequence make_periodic(std::vector<int> pattern) {
    return BiSequence(PeriodicSequence{std::move(pattern)});
  }
  static BiSequence make_constant(int bit) { return make_periodic({bit}); }

  int at(Index i) const {
    return std::visit(
        [i](const auto& kind) -> int {
          using T = std::decay_t<decltype(kind)>;
          if constexpr (std::is_same_v<T, MorseKind>) {
            return morse(i);
          } else if constexpr (std::is_same_v<T, OxtobySequence>) {
            return kind(i);
          } else if constexpr (std::is_same_v<T, PeriodicSequence>) {
            const auto period = static_cast<Index>(kind.pattern.size());
            return kind.pattern[static_cast<std::size_t>(((i % period) + period) % period)];
          } else {
            const Index offset = i - kind.first;
            if (offset < 0 || offset >= static_cast<Index>(kind.bits.size())) {
              throw DomainError("explicit window: index " + std::to_string(i) + " not covered");
            }
            return kind.bits[static_cast<std::size_t>(offset)];
          }
        },
        kind_);
  }

  int operator()(Index i) const { return at(i); }

  std::vector<int> window(Index first, Index last) const {
    std::vector<int> bits;
    for (Index i = first; i <= last; ++i) bits.push_back(at(i));
    return bits;
  }

  const Kind& kind() const { return kind_; }

  std::string name() const {
    switch (kind_.index()) {
      case 0: return "morse";
      case 1: return "oxtoby";
      case 2: return "periodic";
      default: return "window";
    }
  }

 private:
  static void check_bits(const std::vector<int>& bits) {
    for (int bit : bits) {
      if (bit != 0 && bit != 1) throw ParameterError("sequence values must be 0 or 1");
    }
  }

  Kind kind_;
};

inline int oxtoby(Index i, const std::vector<Index>& block_lengths) {
  return OxtobySequence(block_lengths)(i);
}

namespace detail {

inline std::uint64_t encode_word(const BiSequence& seq, Index start, int length) {
  std::uint64_t code = 0;
  for (int t = 0; t < length; ++t) code = (code << 1U) | static_cast<std::uint64_t>(seq.at(start + t));
  return code;
}

}  // namespace detail

/// Occurrence start positions of every length-word_len factor lying inside [lo, hi],
/// keyed by the word read as a binary number (first letter most significant).
inline std::map<std::uint64_t, std::vector<Index>> factor_occurrences(const BiSequence& seq,
                                                                       int word_len, Index lo,
                                                                       Index hi) {
  if (word_len < 1 || word_len > 62) throw ParameterError("word length must be in [1, 62]");
  std::map<std::uint64_t, std::vector<Index>> occurrences;
  for (Index start = lo; start + word_len - 1 <= hi; ++start) {
    occurrences[detail::encode_word(seq, start, word_len)].push_back(start);
  }
  return occurrences;
}

/// Least G <= search_bound such that every window of length G inside
/// [-search_bound, search_bound] contains every factor of length word_len that occurs
/// in that range; nullopt if no such G exists.
inline std::optional<Index> is_repetitive(const BiSequence& seq, int word_len,
                                          Index search_bound) {
  if (word_len < 1) throw ParameterError("is_repetitive: word_len must be >= 1");
  const Index lo = -search_bound;
  const Index hi = search_bound;
  const auto occurrences = factor_occurrences(seq, word_len, lo, hi);
  Index gap = word_len;
  for (const auto& [word, starts] : occurrences) {
    // windows [t, t+G-1] starting before the first occurrence
    gap = std::max(gap, starts.front() - lo + word_len);
    for (std::size_t s = 1; s < starts.size(); ++s) {
      gap = std::max(gap, starts[s] - starts[s - 1] - 1 + word_len);
    }
    // no window may fit strictly after the last occurrence
    gap = std::max(gap, hi - starts.back() + 1);
  }
  if (gap > search_bound) return std::nullopt;
  return gap;
}

struct AperiodicityReport {
  bool aperiodic = true;
  /// For each shift m in [-max_shift, max_shift] \ {0}: an index i with
  /// omega_{i+m} != omega_i, or nullopt if the window shows none.
  std::map<Index, std::optional<Index>> witnesses;
  /// First shift with no witness, when not aperiodic.
  std::optional<Index> fixed_shift;
};

inline AperiodicityReport is_aperiodic(const BiSequence& seq, Index max_shift, Index window) {
  if (max_shift < 1 || window < 1) throw ParameterError("is_aperiodic: bounds must be >= 1");
  AperiodicityReport report;
  for (Index m = -max_shift; m <= max_shift; ++m) {
    if (m == 0) continue;
    std::optional<Index> witness;
    for (Index i = -window; i <= window; ++i) {
      if (seq.at(i + m) != seq.at(i)) {
        witness = i;
        break;
      }
    }
    report.witnesses[m] = witness;
    if (!witness && report.aperiodic) {
      report.aperiodic = false;
      report.fixed_shift = m;
    }
  }
  return report;
}

}  // namespace soltile
