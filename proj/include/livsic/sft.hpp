#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "livsic/hyperbolicity.hpp"
#include "livsic/rng.hpp"

namespace livsic {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using WordPtr = std::shared_ptr<const Word>;

/// An eventually periodic bi-infinite sequence: the left word repeated to
/// minus infinity, then the center word, then the right word repeated to plus
/// infinity. center[offset] sits at coordinate 0; offset may leave the center
/// range after shifting. The words are shared, so shifting is O(1).
struct SftPoint {
  WordPtr left;
  WordPtr center;
  WordPtr right;
  long offset = 0;

  Symbol at(long i) const;
  /// Coordinates outside [lo(), hi()] belong to the periodic tails.
  long lo() const { return -offset; }
  long hi() const { return -offset + static_cast<long>(center->size()) - 1; }
  std::string to_string(long radius) const;
};

SftPoint make_sft_point(Word left, Word center, Word right, long offset);
/// Periodic point ...www.www... with w[0] at coordinate 0.
SftPoint periodic_sft_point(const Word& w);

/// Shift space over a primitive 0/1 transition matrix with metric
/// d(x, y) = theta^N, N the largest n with x and y agreeing on [-n, n].
class Sft {
 public:
  Sft(int alphabet, std::vector<std::vector<int>> transition, double theta = 0.5);
  static Sft full_shift(int alphabet, double theta = 0.5);

  int alphabet() const { return alphabet_; }
  double theta() const { return theta_; }
  const std::vector<std::vector<int>>& transition() const { return transition_; }
  bool admissible(Symbol a, Symbol b) const { return transition_[a][b] != 0; }
  bool admissible(const Word& w, bool cyclic = false) const;
  bool admissible(const SftPoint& x) const;
  const HyperbolicityData& hyp() const { return hyp_; }

  SftPoint step(const SftPoint& x, long k) const;
  bool equal(const SftPoint& x, const SftPoint& y) const;
  /// Largest n with agreement on [-n, n]; -1 when x_0 differs, LONG_MAX when
  /// the points are equal.
  long agreement(const SftPoint& x, const SftPoint& y) const;
  /// Agreement on [-n, n], scanning only that window.
  bool agree_on(const SftPoint& x, const SftPoint& y, long n) const;
  double distance(const SftPoint& x, const SftPoint& y) const;

  /// Past of x (coordinates <= 0) followed by the future of y (>= 0).
  SftPoint bracket(const SftPoint& x, const SftPoint& y) const;
  /// Coordinates < j from x and >= j from y. Throws if the junction is not
  /// an admissible transition.
  SftPoint splice(const SftPoint& x, const SftPoint& y, long j) const;

  /// All admissible cyclic words of length n, in lexicographic order.
  std::vector<Word> cyclic_words(long n, std::size_t cap) const;
  /// Number of admissible cyclic words of length n (trace of T^n).
  std::uint64_t periodic_count(long n) const;

  SftPoint closing_point(const SftPoint& x, long n) const;

  /// All admissible words of length n in lexicographic order.
  std::vector<Word> words(int n) const;
  /// Shortest admissible path from a to b, endpoints excluded.
  Word connector(Symbol a, Symbol b) const;

  /// Random point whose center is an admissible word of the given length.
  SftPoint random_point(RandomStream& rng, long length) const;

  /// Base-k index of the window [lo, hi] of x.
  std::uint64_t cylinder_index(const SftPoint& x, long lo, long hi) const;

  /// Reduces tails to primitive periods and trims the center.
  SftPoint normalize(const SftPoint& x) const;

 private:
  int alphabet_;
  std::vector<std::vector<int>> transition_;
  double theta_;
  HyperbolicityData hyp_;
};

}  // namespace livsic
