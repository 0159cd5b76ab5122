#pragma once

// Free group words over X^{±1}. Text encoding: 'a'..'z' are generators,
// 'A'..'Z' their inverses; the empty string is the identity.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "whpr/errors.hpp"

namespace whpr {

inline constexpr int kMaxRank = 26;

inline void check_rank(int rank) {
  if (rank < 2 || rank > kMaxRank)
    throw std::invalid_argument("rank must lie in [2, 26], got " + std::to_string(rank));
}

/// A signed generator. Letters are ordered by generator index and then
/// sign (x < x^{-1}); the packed code 2*generator + (sign < 0) realizes
/// that order directly.
class Letter {
 public:
  constexpr Letter() = default;
  constexpr Letter(int generator, int sign)
      : code_(static_cast<std::uint8_t>(2 * generator + (sign < 0 ? 1 : 0))) {}

  static constexpr Letter from_code(int code) {
    Letter l;
    l.code_ = static_cast<std::uint8_t>(code);
    return l;
  }

  constexpr int generator() const { return code_ >> 1; }
  constexpr int sign() const { return (code_ & 1) ? -1 : 1; }
  constexpr int code() const { return code_; }
  constexpr Letter inverse() const { return from_code(code_ ^ 1); }

  char to_char() const {
    return static_cast<char>((sign() > 0 ? 'a' : 'A') + generator());
  }

  static Letter from_char(char c, int rank) {
    int gen = -1;
    int sign = 1;
    if (c >= 'a' && c <= 'z') {
      gen = c - 'a';
    } else if (c >= 'A' && c <= 'Z') {
      gen = c - 'A';
      sign = -1;
    }
    if (gen < 0 || gen >= rank)
      throw DataError(std::string("letter '") + c + "' is not valid for rank " +
                      std::to_string(rank));
    return Letter(gen, sign);
  }

  constexpr auto operator<=>(const Letter&) const = default;

 private:
  std::uint8_t code_ = 0;
};

class Word;
Word free_reduce(std::span<const Letter> raw, int rank);

/// A freely reduced word.
class Word {
 public:
  explicit Word(int rank) : rank_(rank) { check_rank(rank); }

  static Word parse(std::string_view text, int rank) {
    check_rank(rank);
    std::vector<Letter> raw;
    raw.reserve(text.size());
    for (char c : text) raw.push_back(Letter::from_char(c, rank));
    return free_reduce(raw, rank);
  }

  int rank() const { return rank_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::span<const Letter> letters() const { return letters_; }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  std::string str() const {
    std::string out;
    out.reserve(letters_.size());
    for (Letter l : letters_) out.push_back(l.to_char());
    return out;
  }

  Word inverse() const {
    std::vector<Letter> inv(letters_.rbegin(), letters_.rend());
    for (Letter& l : inv) l = l.inverse();
    return Word(std::move(inv), rank_);
  }

  friend Word operator*(const Word& lhs, const Word& rhs) {
    if (lhs.rank_ != rhs.rank_) throw std::invalid_argument("rank mismatch in word product");
    std::vector<Letter> raw(lhs.letters_);
    raw.insert(raw.end(), rhs.letters_.begin(), rhs.letters_.end());
    return free_reduce(raw, lhs.rank_);
  }

  bool operator==(const Word&) const = default;

 private:
  friend Word free_reduce(std::span<const Letter>, int);
  friend class CyclicWord;

  Word(std::vector<Letter> letters, int rank) : letters_(std::move(letters)), rank_(rank) {}

  std::vector<Letter> letters_;
  int rank_;
};

/// Cancels adjacent x x^{-1} pairs with a stack; the result is the unique
/// freely reduced representative.
inline Word free_reduce(std::span<const Letter> raw, int rank) {
  check_rank(rank);
  std::vector<Letter> out;
  out.reserve(raw.size());
  for (Letter l : raw) {
    if (l.generator() >= rank)
      throw std::invalid_argument("generator index " + std::to_string(l.generator()) +
                                  " out of range for rank " + std::to_string(rank));
    if (!out.empty() && out.back() == l.inverse())
      out.pop_back();
    else
      out.push_back(l);
  }
  return Word(std::move(out), rank);
}

namespace detail {

// Start index of the lexicographically least rotation (two-pointer scan).
inline std::size_t least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  if (n < 2) return 0;
  std::size_t i = 0, j = 1, k = 0;
  while (i < n && j < n && k < n) {
    const Letter x = s[(i + k) % n];
    const Letter y = s[(j + k) % n];
    if (x == y) {
      ++k;
      continue;
    }
    if (x > y)
      i += k + 1;
    else
      j += k + 1;
    if (i == j) ++j;
    k = 0;
  }
  return std::min(i, j);
}

// Bounds [first, last) of the cyclically reduced core of a reduced word.
inline std::pair<std::size_t, std::size_t> cyclic_core(std::span<const Letter> s) {
  std::size_t first = 0, last = s.size();
  while (last - first >= 2 && s[first] == s[last - 1].inverse()) {
    ++first;
    --last;
  }
  return {first, last};
}

}  // namespace detail

/// A conjugacy class of words, stored as the lexicographically least
/// rotation of its cyclically reduced core.
class CyclicWord {
 public:
  explicit CyclicWord(int rank) : word_(rank) {}

  /// Cyclically reduces and canonicalizes `w`.
  explicit CyclicWord(const Word& w) : word_(w.rank()) {
    auto [first, last] = detail::cyclic_core(w.letters());
    std::span<const Letter> core = w.letters().subspan(first, last - first);
    const std::size_t r = detail::least_rotation(core);
    word_.letters_.reserve(core.size());
    word_.letters_.insert(word_.letters_.end(), core.begin() + static_cast<std::ptrdiff_t>(r),
                          core.end());
    word_.letters_.insert(word_.letters_.end(), core.begin(),
                          core.begin() + static_cast<std::ptrdiff_t>(r));
  }

  static CyclicWord parse(std::string_view text, int rank) {
    return CyclicWord(Word::parse(text, rank));
  }

  int rank() const { return word_.rank(); }
  std::size_t length() const { return word_.length(); }
  bool empty() const { return word_.empty(); }
  std::span<const Letter> letters() const { return word_.letters(); }
  Letter operator[](std::size_t i) const { return word_[i]; }
  const Word& linear() const { return word_; }
  std::string str() const { return word_.str(); }

  bool operator==(const CyclicWord&) const = default;

 private:
  Word word_;
};

struct CyclicReduction {
  CyclicWord core;
  Word conjugator;  // w = conjugator * core * conjugator^{-1}
};

inline CyclicReduction cyclic_reduce(const Word& w) {
  auto [first, last] = detail::cyclic_core(w.letters());
  std::span<const Letter> core = w.letters().subspan(first, last - first);
  const std::size_t r = detail::least_rotation(core);
  // core = p q with canonical rotation q p, so core = p (q p) p^{-1}.
  std::vector<Letter> g(w.letters().begin(), w.letters().begin() + static_cast<std::ptrdiff_t>(first));
  g.insert(g.end(), core.begin(), core.begin() + static_cast<std::ptrdiff_t>(r));
  return {CyclicWord(w), free_reduce(g, w.rank())};
}

}  // namespace whpr
