#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "whpr/word.hpp"

namespace whpr {

/// Type I: a permutation of X^{±1} that commutes with inversion. Stored as
/// the image letter of every positive generator.
struct TypeI {
  std::vector<Letter> generator_images;

  bool operator==(const TypeI&) const = default;
};

/// Type II: the (A, a) move. `set` is a bitmask over letter codes.
struct TypeII {
  Letter multiplier;
  std::uint64_t set = 0;

  bool contains(Letter x) const { return (set >> x.code()) & 1u; }
  bool operator==(const TypeII&) const = default;
};

/// Image of a single letter; at most three letters long.
struct LetterImage {
  std::array<Letter, 3> letters{};
  std::uint8_t size = 0;

  std::span<const Letter> view() const { return {letters.data(), size}; }
};

class WhiteheadAutomorphism {
 public:
  static WhiteheadAutomorphism type_i(int rank, std::vector<Letter> generator_images) {
    check_rank(rank);
    if (generator_images.size() != static_cast<std::size_t>(rank))
      throw std::invalid_argument("type I automorphism needs one image per generator");
    std::uint32_t seen = 0;
    for (Letter l : generator_images) {
      if (l.generator() >= rank) throw std::invalid_argument("type I image out of range");
      seen |= 1u << l.generator();
    }
    if (seen != (rank == 32 ? ~0u : (1u << rank) - 1))
      throw std::invalid_argument("type I images must permute the generators");
    return WhiteheadAutomorphism(rank, TypeI{std::move(generator_images)});
  }

  /// Validates a ∈ A and a^{-1} ∉ A.
  static WhiteheadAutomorphism type_ii(int rank, Letter multiplier, std::uint64_t set) {
    check_rank(rank);
    if (multiplier.generator() >= rank) throw std::invalid_argument("multiplier out of range");
    const std::uint64_t all = (2 * rank == 64) ? ~0ull : (1ull << (2 * rank)) - 1;
    if (set & ~all) throw std::invalid_argument("type II set has letters outside the alphabet");
    TypeII t{multiplier, set};
    if (!t.contains(multiplier) || t.contains(multiplier.inverse()))
      throw std::invalid_argument("type II set must contain a and not a^{-1}");
    return WhiteheadAutomorphism(rank, t);
  }

  static WhiteheadAutomorphism type_ii(int rank, Letter multiplier, std::initializer_list<Letter> set) {
    std::uint64_t mask = 0;
    for (Letter l : set) mask |= 1ull << l.code();
    return type_ii(rank, multiplier, mask);
  }

  int rank() const { return rank_; }
  bool is_type_i() const { return std::holds_alternative<TypeI>(move_); }
  const std::variant<TypeI, TypeII>& variant() const { return move_; }

  LetterImage image(Letter x) const {
    LetterImage img;
    if (const auto* p = std::get_if<TypeI>(&move_)) {
      const Letter y = p->generator_images[static_cast<std::size_t>(x.generator())];
      img.letters[0] = x.sign() > 0 ? y : y.inverse();
      img.size = 1;
      return img;
    }
    const auto& t = std::get<TypeII>(move_);
    const Letter a = t.multiplier;
    if (x == a || x == a.inverse()) {
      img.letters[0] = x;
      img.size = 1;
      return img;
    }
    const bool in = t.contains(x);
    const bool inv_in = t.contains(x.inverse());
    std::uint8_t n = 0;
    if (inv_in) img.letters[n++] = a.inverse();
    img.letters[n++] = x;
    if (in) img.letters[n++] = a;
    img.size = n;
    return img;
  }

  /// Image of a reduced word, freely reduced.
  Word apply(const Word& w) const {
    check_same_rank(w.rank());
    std::vector<Letter> raw;
    raw.reserve(w.length() * 3);
    for (Letter x : w.letters()) {
      const LetterImage img = image(x);
      raw.insert(raw.end(), img.letters.begin(), img.letters.begin() + img.size);
    }
    return free_reduce(raw, rank_);
  }

  CyclicWord apply(const CyclicWord& w) const { return CyclicWord(apply(w.linear())); }

  /// Cyclic length of the image without building the canonical form.
  std::size_t image_cyclic_length(const CyclicWord& w) const {
    check_same_rank(w.rank());
    std::vector<Letter> stack;
    stack.reserve(w.length() * 3);
    for (Letter x : w.letters()) {
      const LetterImage img = image(x);
      for (Letter y : img.view()) {
        if (!stack.empty() && stack.back() == y.inverse())
          stack.pop_back();
        else
          stack.push_back(y);
      }
    }
    auto [first, last] = detail::cyclic_core(stack);
    return last - first;
  }

  std::string str() const {
    if (const auto* p = std::get_if<TypeI>(&move_)) {
      std::string s = "I(";
      for (std::size_t g = 0; g < p->generator_images.size(); ++g) {
        if (g) s += ',';
        s += Letter(static_cast<int>(g), 1).to_char();
        s += "->";
        s += p->generator_images[g].to_char();
      }
      return s + ")";
    }
    const auto& t = std::get<TypeII>(move_);
    std::string s = "II(";
    s += t.multiplier.to_char();
    s += ";{";
    for (int c = 0; c < 2 * rank_; ++c)
      if ((t.set >> c) & 1u) s += Letter::from_code(c).to_char();
    return s + "})";
  }

  bool operator==(const WhiteheadAutomorphism&) const = default;

 private:
  WhiteheadAutomorphism(int rank, std::variant<TypeI, TypeII> move) : rank_(rank), move_(std::move(move)) {}

  void check_same_rank(int rank) const {
    if (rank != rank_)
      throw std::invalid_argument("automorphism of rank " + std::to_string(rank_) +
                                  " applied to a word of rank " + std::to_string(rank));
  }

  int rank_;
  std::variant<TypeI, TypeII> move_;
};

inline CyclicWord apply_automorphism(const WhiteheadAutomorphism& t, const CyclicWord& w) {
  return t.apply(w);
}

/// Number of proper type II automorphisms: 2n (2^{2n-2} - 2).
inline std::uint64_t type2_count(int rank) {
  check_rank(rank);
  return 2ull * static_cast<std::uint64_t>(rank) * ((1ull << (2 * rank - 2)) - 2);
}

/// All proper type II automorphisms, excluding A = {a} and the inner
/// A = X^{±1} \ {a^{-1}}. Ordered by multiplier, then by the bitmask of A.
inline std::vector<WhiteheadAutomorphism> enumerate_type2(int rank) {
  check_rank(rank);
  if (rank > 12) throw std::invalid_argument("type II enumeration is limited to rank <= 12");
  std::vector<WhiteheadAutomorphism> out;
  out.reserve(type2_count(rank));
  const int letters = 2 * rank;
  const std::uint64_t all = (1ull << letters) - 1;
  for (int m = 0; m < letters; ++m) {
    const Letter a = Letter::from_code(m);
    const std::uint64_t a_bit = 1ull << a.code();
    const std::uint64_t inv_bit = 1ull << a.inverse().code();
    const std::uint64_t identity = a_bit;
    const std::uint64_t inner = all & ~inv_bit;
    for (std::uint64_t set = 0; set <= all; ++set) {
      if (!(set & a_bit) || (set & inv_bit)) continue;
      if (set == identity || set == inner) continue;
      out.push_back(WhiteheadAutomorphism::type_ii(rank, a, set));
    }
  }
  return out;
}

/// The rank-2 Nielsen moves N_2; conjugations are omitted since they act
/// trivially on cyclic words.
enum class NielsenMove : std::uint8_t {
  AtoAB,     // a -> ab
  AtoBinvA,  // a -> b^{-1}a
  BtoBA,     // b -> ba
  BtoAinvB,  // b -> a^{-1}b
};

inline constexpr std::array<NielsenMove, 4> kNielsenMoves = {
    NielsenMove::AtoAB, NielsenMove::AtoBinvA, NielsenMove::BtoBA, NielsenMove::BtoAinvB};

inline std::size_t index_of(NielsenMove m) { return static_cast<std::size_t>(m); }

inline std::string to_string(NielsenMove m) {
  switch (m) {
    case NielsenMove::AtoAB: return "a->ab";
    case NielsenMove::AtoBinvA: return "a->Ba";
    case NielsenMove::BtoBA: return "b->ba";
    case NielsenMove::BtoAinvB: return "b->Ab";
  }
  return "?";
}

inline NielsenMove parse_nielsen_move(std::string_view s) {
  for (NielsenMove m : kNielsenMoves)
    if (to_string(m) == s) return m;
  throw DataError("unknown Nielsen move '" + std::string(s) + "'");
}

namespace detail {
inline constexpr Letter kA{0, 1};
inline constexpr Letter kAinv{0, -1};
inline constexpr Letter kB{1, 1};
inline constexpr Letter kBinv{1, -1};
}  // namespace detail

inline WhiteheadAutomorphism to_automorphism(NielsenMove m) {
  using namespace detail;
  switch (m) {
    case NielsenMove::AtoAB: return WhiteheadAutomorphism::type_ii(2, kB, {kB, kA});
    case NielsenMove::AtoBinvA: return WhiteheadAutomorphism::type_ii(2, kB, {kB, kAinv});
    case NielsenMove::BtoBA: return WhiteheadAutomorphism::type_ii(2, kA, {kA, kB});
    case NielsenMove::BtoAinvB: return WhiteheadAutomorphism::type_ii(2, kA, {kA, kBinv});
  }
  throw std::logic_error("bad Nielsen move");
}

/// Exact inverse of a Nielsen move (a->ab is undone by a->ab^{-1}, etc.).
inline WhiteheadAutomorphism inverse_automorphism(NielsenMove m) {
  using namespace detail;
  switch (m) {
    case NielsenMove::AtoAB: return WhiteheadAutomorphism::type_ii(2, kBinv, {kBinv, kA});
    case NielsenMove::AtoBinvA: return WhiteheadAutomorphism::type_ii(2, kBinv, {kBinv, kAinv});
    case NielsenMove::BtoBA: return WhiteheadAutomorphism::type_ii(2, kAinv, {kAinv, kB});
    case NielsenMove::BtoAinvB: return WhiteheadAutomorphism::type_ii(2, kAinv, {kAinv, kBinv});
  }
  throw std::logic_error("bad Nielsen move");
}

/// Automorphisms applied left to right.
struct AutomorphismChain {
  std::vector<WhiteheadAutomorphism> steps;

  CyclicWord replay(const CyclicWord& w) const {
    CyclicWord cur = w;
    for (const auto& t : steps) cur = t.apply(cur);
    return cur;
  }
};

}  // namespace whpr
