#pragma once

// Deterministic Whitehead descent on cyclic words.

#include <optional>
#include <vector>

#include "whpr/automorphism.hpp"

namespace whpr {

/// Nielsen moves that strictly shorten the rank-2 cyclic word `w`.
inline std::vector<NielsenMove> reducing_moves(const CyclicWord& w) {
  if (w.rank() != 2) throw std::invalid_argument("reducing_moves: Nielsen moves need rank 2");
  std::vector<NielsenMove> out;
  if (w.length() <= 1) return out;
  for (NielsenMove m : kNielsenMoves)
    if (to_automorphism(m).image_cyclic_length(w) < w.length()) out.push_back(m);
  return out;
}

/// Proper type II automorphisms that strictly shorten `w`, in enumeration order.
inline std::vector<WhiteheadAutomorphism> reducing_automorphisms(const CyclicWord& w) {
  std::vector<WhiteheadAutomorphism> out;
  if (w.length() <= 1) return out;
  for (auto& t : enumerate_type2(w.rank()))
    if (t.image_cyclic_length(w) < w.length()) out.push_back(std::move(t));
  return out;
}

/// Rank 2 scans N_2, higher ranks scan every proper type II move.
inline bool is_minimal(const CyclicWord& w) {
  if (w.length() <= 1) return true;
  if (w.rank() == 2) return reducing_moves(w).empty();
  return reducing_automorphisms(w).empty();
}

struct Minimization {
  CyclicWord minimal;
  AutomorphismChain chain;
};

/// Steepest descent: each step applies the candidate with the shortest
/// image, first in enumeration order on ties.
inline Minimization minimize(const CyclicWord& w) {
  std::vector<WhiteheadAutomorphism> candidates;
  if (w.rank() == 2) {
    for (NielsenMove m : kNielsenMoves) candidates.push_back(to_automorphism(m));
  } else {
    candidates = enumerate_type2(w.rank());
  }
  Minimization result{w, {}};
  CyclicWord& cur = result.minimal;
  while (cur.length() > 1) {
    std::optional<std::size_t> best;
    std::size_t best_len = cur.length();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const std::size_t len = candidates[i].image_cyclic_length(cur);
      if (len < best_len) {
        best_len = len;
        best = i;
      }
    }
    if (!best) break;
    cur = candidates[*best].apply(cur);
    result.chain.steps.push_back(candidates[*best]);
  }
  return result;
}

}  // namespace whpr
