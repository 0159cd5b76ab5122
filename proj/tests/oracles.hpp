#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance suite.

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "whpr/automorphism.hpp"

namespace oracle {

using namespace whpr;

/// Every cyclic word of length exactly `len`, canonical and deduplicated.
inline std::vector<CyclicWord> all_cyclic_words(int rank, std::size_t len) {
  std::map<std::string, CyclicWord> seen;
  std::vector<Letter> cur;
  const int letters = 2 * rank;
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == len) {
      if (len >= 2 && cur.front() == cur.back().inverse()) return;
      CyclicWord w(free_reduce(cur, rank));
      seen.emplace(w.str(), w);
      return;
    }
    for (int c = 0; c < letters; ++c) {
      const Letter l = Letter::from_code(c);
      if (!cur.empty() && l == cur.back().inverse()) continue;
      cur.push_back(l);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  std::vector<CyclicWord> out;
  for (auto& [k, w] : seen) out.push_back(w);
  return out;
}

/// Minimum cyclic length in each word's orbit, found by breadth-first
/// search over all proper type II images, never leaving words of length
/// <= max_len + slack. Keyed by canonical string, for every word up to
/// max_len.
inline std::map<std::string, std::size_t> orbit_minima(int rank, std::size_t max_len, std::size_t slack) {
  const std::size_t bound = max_len + slack;
  std::vector<CyclicWord> words;
  for (std::size_t l = 1; l <= bound; ++l) {
    auto ws = all_cyclic_words(rank, l);
    words.insert(words.end(), ws.begin(), ws.end());
  }
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < words.size(); ++i) id.emplace(words[i].str(), i);

  std::vector<std::size_t> comp(words.size(), words.size());
  std::vector<std::size_t> comp_min;
  const auto moves = enumerate_type2(rank);
  for (std::size_t s = 0; s < words.size(); ++s) {
    if (comp[s] != words.size()) continue;
    const std::size_t c = comp_min.size();
    comp_min.push_back(words[s].length());
    std::vector<std::size_t> queue{s};
    comp[s] = c;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const CyclicWord& w = words[queue[q]];
      comp_min[c] = std::min(comp_min[c], w.length());
      for (const auto& t : moves) {
        const CyclicWord img = t.apply(w);
        if (img.length() > bound) continue;
        const std::size_t j = id.at(img.str());
        if (comp[j] == words.size()) {
          comp[j] = c;
          queue.push_back(j);
        }
      }
    }
  }
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i].length() <= max_len) out.emplace(words[i].str(), comp_min[comp[i]]);
  return out;
}

}  // namespace oracle
