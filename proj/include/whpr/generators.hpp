#pragma once

// Random words, random Whitehead automorphisms and random primitives.

#include <cmath>
#include <numeric>
#include <vector>

#include "whpr/automorphism.hpp"
#include "whpr/random.hpp"

namespace whpr {

/// Markov construction: y_1 uniform on X^{±1}, y_{i+1} uniform on
/// X^{±1} \ {y_i^{-1}}. Length 0 yields the empty word.
inline Word random_word(std::size_t length, int rank, Rng& rng) {
  check_rank(rank);
  const int letters = 2 * rank;
  std::vector<Letter> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    if (out.empty()) {
      out.push_back(Letter::from_code(static_cast<int>(rng.below(letters))));
    } else {
      const int forbidden = out.back().inverse().code();
      int c = static_cast<int>(rng.below(letters - 1));
      if (c >= forbidden) ++c;
      out.push_back(Letter::from_code(c));
    }
  }
  return free_reduce(out, rank);
}

/// Same construction, with the last letter resampled until y_l != y_1^{-1}.
inline CyclicWord random_cyclic_word(std::size_t length, int rank, Rng& rng) {
  check_rank(rank);
  if (length <= 1) return CyclicWord(random_word(length, rank, rng));
  const int letters = 2 * rank;
  std::vector<Letter> out;
  out.reserve(length);
  out.push_back(Letter::from_code(static_cast<int>(rng.below(letters))));
  for (std::size_t i = 1; i < length; ++i) {
    const int forbidden = out.back().inverse().code();
    int c;
    do {
      c = static_cast<int>(rng.below(letters - 1));
      if (c >= forbidden) ++c;
    } while (i + 1 == length && Letter::from_code(c) == out.front().inverse());
    out.push_back(Letter::from_code(c));
  }
  return CyclicWord(free_reduce(out, rank));
}

/// Uniform over signed permutations other than the identity.
inline WhiteheadAutomorphism random_type1(int rank, Rng& rng) {
  for (;;) {
    std::vector<int> perm(static_cast<std::size_t>(rank));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size() - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<Letter> images;
    bool identity = true;
    for (int g = 0; g < rank; ++g) {
      const int sign = rng.coin(0.5) ? -1 : 1;
      images.emplace_back(perm[static_cast<std::size_t>(g)], sign);
      identity = identity && perm[static_cast<std::size_t>(g)] == g && sign > 0;
    }
    if (!identity) return WhiteheadAutomorphism::type_i(rank, std::move(images));
  }
}

/// Uniform over proper type II automorphisms.
inline WhiteheadAutomorphism random_type2(int rank, Rng& rng) {
  const int letters = 2 * rank;
  const std::uint64_t all = (1ull << letters) - 1;
  for (;;) {
    const Letter a = Letter::from_code(static_cast<int>(rng.below(letters)));
    const std::uint64_t a_bit = 1ull << a.code();
    const std::uint64_t inv_bit = 1ull << a.inverse().code();
    const std::uint64_t free_bits = all & ~a_bit & ~inv_bit;
    // Random subset of the remaining 2n-2 letters.
    std::uint64_t set = a_bit;
    for (int c = 0; c < letters; ++c)
      if (((free_bits >> c) & 1u) && rng.coin(0.5)) set |= 1ull << c;
    if (set == a_bit || set == (all & ~inv_bit)) continue;
    return WhiteheadAutomorphism::type_ii(rank, a, set);
  }
}

/// Uniform over the union of non-identity type I and proper type II moves.
inline WhiteheadAutomorphism random_whitehead(int rank, Rng& rng) {
  check_rank(rank);
  const double type1 = std::tgamma(rank + 1.0) * std::ldexp(1.0, rank) - 1.0;
  const double type2 = static_cast<double>(type2_count(rank));
  return rng.uniform01() * (type1 + type2) < type1 ? random_type1(rank, rng) : random_type2(rank, rng);
}

/// Image of a random letter under `num_autos` random Whitehead moves.
inline CyclicWord random_primitive(int rank, std::size_t num_autos, Rng& rng) {
  check_rank(rank);
  const Letter x = Letter::from_code(static_cast<int>(rng.below(2 * rank)));
  CyclicWord w(free_reduce(std::span<const Letter>(&x, 1), rank));
  for (std::size_t i = 0; i < num_autos; ++i) w = random_whitehead(rank, rng).apply(w);
  return w;
}

}  // namespace whpr
