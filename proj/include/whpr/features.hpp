#pragma once

// Subword counting functions C(w, U_1 v_1 ... v_K U_{K+1}) and the feature
// maps built from them.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "whpr/word.hpp"

namespace whpr {

/// A set of wildcard words: U_n (exactly n letters), W_n (at most n,
/// including the empty word) or only the empty word.
struct Wildcard {
  enum class Kind : std::uint8_t { EmptyOnly, ExactLen, AtMostLen };
  Kind kind = Kind::EmptyOnly;
  int n = 0;

  static Wildcard empty() { return {}; }
  static Wildcard exact(int n) { return {Kind::ExactLen, n}; }
  static Wildcard at_most(int n) { return {Kind::AtMostLen, n}; }

  int min_len() const { return kind == Kind::ExactLen ? n : 0; }
  int max_len() const { return kind == Kind::EmptyOnly ? 0 : n; }
  bool is_empty_only() const { return max_len() == 0; }

  bool operator==(const Wildcard&) const = default;
};

/// Alternating pattern U_1 v_1 U_2 ... v_K U_{K+1}; the v_i are nonempty.
class Pattern {
 public:
  Pattern(std::vector<Wildcard> gaps, std::vector<Word> fixed) : gaps_(std::move(gaps)), fixed_(std::move(fixed)) {
    if (fixed_.empty()) throw std::invalid_argument("pattern needs at least one fixed word");
    if (gaps_.size() != fixed_.size() + 1)
      throw std::invalid_argument("pattern needs K+1 wildcard sets around K fixed words");
    for (const Word& v : fixed_) {
      if (v.empty()) throw std::invalid_argument("pattern fixed words must be nonempty");
      if (v.rank() != fixed_.front().rank()) throw std::invalid_argument("pattern rank mismatch");
    }
    for (const Wildcard& g : gaps_)
      if (g.n < 0) throw std::invalid_argument("wildcard length must be nonnegative");
  }

  static Pattern word(const Word& v) { return Pattern({Wildcard::empty(), Wildcard::empty()}, {v}); }

  /// x1 U_gap x2; a zero gap gives the fixed two-letter word.
  static Pattern gapped(Letter x1, int gap, Letter x2, int rank) {
    const Word w1 = free_reduce(std::span<const Letter>(&x1, 1), rank);
    const Word w2 = free_reduce(std::span<const Letter>(&x2, 1), rank);
    if (gap == 0) return word(w1 * w2);
    return Pattern({Wildcard::empty(), Wildcard::exact(gap), Wildcard::empty()}, {w1, w2});
  }

  int rank() const { return fixed_.front().rank(); }
  const std::vector<Wildcard>& gaps() const { return gaps_; }
  const std::vector<Word>& fixed() const { return fixed_; }

  std::size_t min_span() const {
    std::size_t s = 0;
    for (const auto& g : gaps_) s += static_cast<std::size_t>(g.min_len());
    for (const auto& v : fixed_) s += v.length();
    return s;
  }
  std::size_t max_span() const {
    std::size_t s = 0;
    for (const auto& g : gaps_) s += static_cast<std::size_t>(g.max_len());
    for (const auto& v : fixed_) s += v.length();
    return s;
  }

  /// Canonical text: segments joined by '.', e.g. "a.U1.b", "W2.ab".
  std::string str() const {
    std::string out;
    auto emit = [&out](const std::string& seg) {
      if (!out.empty()) out += '.';
      out += seg;
    };
    for (std::size_t i = 0; i < gaps_.size(); ++i) {
      const Wildcard& g = gaps_[i];
      if (g.kind == Wildcard::Kind::ExactLen) emit("U" + std::to_string(g.n));
      if (g.kind == Wildcard::Kind::AtMostLen) emit("W" + std::to_string(g.n));
      if (i < fixed_.size()) emit(fixed_[i].str());
    }
    return out;
  }

  static Pattern parse(std::string_view text, int rank) {
    std::vector<Wildcard> gaps;
    std::vector<Word> fixed;
    std::optional<Wildcard> pending;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t dot = std::min(text.find('.', pos), text.size());
      const std::string_view seg = text.substr(pos, dot - pos);
      pos = dot + 1;
      if (seg.empty()) throw DataError("empty segment in pattern '" + std::string(text) + "'");
      if ((seg[0] == 'U' || seg[0] == 'W') && seg.size() > 1 && std::isdigit(static_cast<unsigned char>(seg[1]))) {
        int n = 0;
        auto [p, ec] = std::from_chars(seg.data() + 1, seg.data() + seg.size(), n);
        if (ec != std::errc{} || p != seg.data() + seg.size())
          throw DataError("bad wildcard '" + std::string(seg) + "'");
        if (pending) throw DataError("adjacent wildcards in pattern '" + std::string(text) + "'");
        pending = seg[0] == 'U' ? Wildcard::exact(n) : Wildcard::at_most(n);
      } else {
        Word v = Word::parse(seg, rank);
        if (v.length() != seg.size()) throw DataError("pattern word '" + std::string(seg) + "' is not reduced");
        if (!pending && !fixed.empty()) {
          fixed.back() = fixed.back() * v;  // adjacent words concatenate
        } else {
          gaps.push_back(pending.value_or(Wildcard::empty()));
          fixed.push_back(std::move(v));
        }
        pending.reset();
      }
    }
    gaps.push_back(pending.value_or(Wildcard::empty()));
    if (fixed.empty()) throw DataError("pattern '" + std::string(text) + "' has no fixed word");
    return Pattern(std::move(gaps), std::move(fixed));
  }

  bool operator==(const Pattern&) const = default;

 private:
  std::vector<Wildcard> gaps_;
  std::vector<Word> fixed_;
};

enum class CountMode { Cyclic, Linear };

namespace detail {

// Collects every span (end offset) reachable when matching `p` from `start`.
inline void match_spans(std::span<const Letter> s, bool cyclic, std::size_t start, const Pattern& p,
                        std::size_t segment, std::size_t offset, std::size_t limit,
                        std::vector<bool>& reached) {
  const Wildcard& g = p.gaps()[segment];
  for (int len = g.min_len(); len <= g.max_len(); ++len) {
    std::size_t off = offset + static_cast<std::size_t>(len);
    if (off > limit) break;
    if (segment == p.fixed().size()) {
      if (off > 0) reached[off] = true;
      continue;
    }
    const Word& v = p.fixed()[segment];
    if (off + v.length() > limit) break;
    bool ok = true;
    for (std::size_t k = 0; k < v.length() && ok; ++k) {
      std::size_t idx = start + off + k;
      if (cyclic) idx %= s.size();
      ok = s[idx] == v[k];
    }
    if (ok) match_spans(s, cyclic, start, p, segment + 1, off + v.length(), limit, reached);
  }
}

}  // namespace detail

/// Number of distinct (start, span) subword occurrences matching `p`.
/// Cyclic mode scans every start of the cyclic word with span <= |w|.
inline std::size_t count_pattern(std::span<const Letter> s, const Pattern& p, CountMode mode) {
  const std::size_t n = s.size();
  if (n == 0 || p.min_span() > n) return 0;
  const bool cyclic = mode == CountMode::Cyclic;
  std::size_t total = 0;
  std::vector<bool> reached;
  for (std::size_t start = 0; start < n; ++start) {
    const std::size_t limit = std::min(p.max_span(), cyclic ? n : n - start);
    reached.assign(limit + 1, false);
    detail::match_spans(s, cyclic, start, p, 0, 0, limit, reached);
    total += static_cast<std::size_t>(std::count(reached.begin(), reached.end(), true));
  }
  return total;
}

inline std::size_t count_pattern(const CyclicWord& w, const Pattern& p) {
  return count_pattern(w.letters(), p, CountMode::Cyclic);
}

inline std::size_t count_pattern(const Word& w, const Pattern& p) {
  return count_pattern(w.letters(), p, CountMode::Linear);
}

/// An ordered list of counting functions. Patterns of the forms "fixed word"
/// and "x1 U_k x2" are counted in one pass over the word; anything else goes
/// through the generic matcher.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::string name, int rank, std::vector<Pattern> patterns)
      : name_(std::move(name)), rank_(rank), patterns_(std::move(patterns)) {
    check_rank(rank_);
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      const Pattern& p = patterns_[i];
      if (p.rank() != rank_) throw std::invalid_argument("feature map pattern rank mismatch");
      const auto& g = p.gaps();
      const auto& f = p.fixed();
      const bool outer_empty = g.front().is_empty_only() && g.back().is_empty_only();
      if (outer_empty && f.size() == 1 && f[0].length() <= kMaxKeyLetters) {
        fixed_plan_[f[0].length()][key(f[0].letters())].push_back(i);
      } else if (outer_empty && f.size() == 2 && f[0].length() == 1 && f[1].length() == 1 &&
                 g[1].kind == Wildcard::Kind::ExactLen) {
        gap_plan_.push_back({i, f[0][0].code(), f[1][0].code(), static_cast<std::size_t>(g[1].n)});
      } else {
        generic_.push_back(i);
      }
    }
  }

  const std::string& name() const { return name_; }
  int rank() const { return rank_; }
  std::size_t dimension() const { return patterns_.size(); }
  const std::vector<Pattern>& patterns() const { return patterns_; }

  /// Raw counts, one per pattern.
  std::vector<std::size_t> counts(std::span<const Letter> s, CountMode mode) const {
    const std::size_t n = s.size();
    std::vector<std::size_t> out(patterns_.size(), 0);
    if (n == 0) return out;
    const bool cyclic = mode == CountMode::Cyclic;
    auto at = [&](std::size_t idx) { return s[cyclic ? idx % n : idx]; };
    for (const auto& [len, table] : fixed_plan_) {
      if (len > n) continue;
      const std::size_t starts = cyclic ? n : n - len + 1;
      for (std::size_t i = 0; i < starts; ++i) {
        std::uint64_t k = 0;
        for (std::size_t j = 0; j < len; ++j) k = k * kKeyBase + static_cast<std::uint64_t>(at(i + j).code());
        auto it = table.find(k);
        if (it != table.end())
          for (std::size_t idx : it->second) ++out[idx];
      }
    }
    if (!gap_plan_.empty()) {
      const std::size_t letters = 2 * static_cast<std::size_t>(rank_);
      std::map<std::size_t, std::vector<std::size_t>> pair_tables;
      for (const auto& e : gap_plan_) pair_tables.try_emplace(e.gap);
      for (auto& [gap, table] : pair_tables) {
        table.assign(letters * letters, 0);
        const std::size_t span = gap + 2;
        if (span > n) continue;
        const std::size_t starts = cyclic ? n : n - span + 1;
        for (std::size_t i = 0; i < starts; ++i)
          ++table[static_cast<std::size_t>(at(i).code()) * letters + static_cast<std::size_t>(at(i + span - 1).code())];
      }
      for (const auto& e : gap_plan_)
        out[e.index] = pair_tables[e.gap][static_cast<std::size_t>(e.first) * letters + static_cast<std::size_t>(e.last)];
    }
    for (std::size_t idx : generic_) out[idx] = count_pattern(s, patterns_[idx], mode);
    return out;
  }

  /// f(w) = (1/|w|) <C_1(w), ..., C_N(w)> over the cyclic word.
  std::vector<double> operator()(const CyclicWord& w) const {
    if (w.rank() != rank_) throw std::invalid_argument("feature map rank mismatch");
    if (w.empty()) throw DataError("feature vector of the empty word is undefined");
    const auto c = counts(w.letters(), CountMode::Cyclic);
    std::vector<double> out(c.size());
    const double len = static_cast<double>(w.length());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = static_cast<double>(c[i]) / len;
    return out;
  }

  /// Header names, one per component.
  std::vector<std::string> column_names() const {
    std::vector<std::string> out;
    for (const auto& p : patterns_) out.push_back(p.str());
    return out;
  }

 private:
  static constexpr std::size_t kMaxKeyLetters = 10;
  static constexpr std::uint64_t kKeyBase = 64;

  static std::uint64_t key(std::span<const Letter> v) {
    std::uint64_t k = 0;
    for (Letter l : v) k = k * kKeyBase + static_cast<std::uint64_t>(l.code());
    return k;
  }

  struct GapEntry {
    std::size_t index;
    int first;
    int last;
    std::size_t gap;
  };

  std::string name_;
  int rank_ = 2;
  std::vector<Pattern> patterns_;
  std::map<std::size_t, std::unordered_map<std::uint64_t, std::vector<std::size_t>>> fixed_plan_;
  std::vector<GapEntry> gap_plan_;
  std::vector<std::size_t> generic_;
};

inline std::vector<double> feature_vector(const CyclicWord& w, const FeatureMap& map) { return map(w); }

namespace detail {

inline std::vector<Letter> alphabet(int rank) {
  std::vector<Letter> out;
  for (int c = 0; c < 2 * rank; ++c) out.push_back(Letter::from_code(c));
  return out;
}

// x1 U_gap x2 over all ordered pairs; zero gaps skip x2 = x1^{-1}.
inline void append_pair_block(std::vector<Pattern>& out, int rank, int gap) {
  for (Letter x1 : alphabet(rank))
    for (Letter x2 : alphabet(rank)) {
      if (gap == 0 && x2 == x1.inverse()) continue;
      out.push_back(Pattern::gapped(x1, gap, x2, rank));
    }
}

// Every reduced word of the given length, lexicographic.
inline void reduced_words(int rank, std::size_t length, std::vector<Letter>& prefix, std::vector<Word>& out) {
  if (prefix.size() == length) {
    out.push_back(free_reduce(prefix, rank));
    return;
  }
  for (Letter x : alphabet(rank)) {
    if (!prefix.empty() && prefix.back() == x.inverse()) continue;
    prefix.push_back(x);
    reduced_words(rank, length, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace detail

/// All reduced words x1 v x2 with min_mid <= |v| <= max_mid, ordered by
/// length and then lexicographically.
inline std::vector<Pattern> pattern_pool(int rank, int min_mid, int max_mid) {
  check_rank(rank);
  if (min_mid < 1 || max_mid < min_mid) throw std::invalid_argument("pattern pool needs 1 <= min <= max");
  std::vector<Pattern> out;
  for (int mid = min_mid; mid <= max_mid; ++mid) {
    std::vector<Word> words;
    std::vector<Letter> prefix;
    detail::reduced_words(rank, static_cast<std::size_t>(mid + 2), prefix, words);
    for (const Word& v : words) out.push_back(Pattern::word(v));
  }
  return out;
}

/// f0..f6 and fstar. f5 and f6 concatenate the per-middle-length blocks
/// (middle lengths 0..1 and 0..3).
inline FeatureMap builtin_map(std::string_view name, int rank) {
  check_rank(rank);
  std::vector<Pattern> ps;
  if (name == "f0") {
    for (Letter x : detail::alphabet(rank)) ps.push_back(Pattern::word(free_reduce(std::span<const Letter>(&x, 1), rank)));
  } else if (name == "f1") {
    detail::append_pair_block(ps, rank, 0);
  } else if (name == "f2" || name == "f3" || name == "f4") {
    detail::append_pair_block(ps, rank, name[1] - '1');
  } else if (name == "f5" || name == "f6") {
    const int top = name == "f5" ? 1 : 3;
    for (int gap = 0; gap <= top; ++gap) detail::append_pair_block(ps, rank, gap);
  } else if (name == "fstar") {
    if (rank != 2) throw std::invalid_argument("fstar is defined for rank 2 only");
    ps.push_back(Pattern::word(Word::parse("Ab", 2)));
    ps.push_back(Pattern::word(Word::parse("Ba", 2)));
  } else {
    throw std::invalid_argument("unknown feature map '" + std::string(name) + "'");
  }
  return FeatureMap(std::string(name), rank, std::move(ps));
}

/// Accepts built-in names, "pool:<min>-<max>" and "patterns:p1,p2,...".
inline FeatureMap parse_feature_map(std::string_view spec, int rank) {
  if (spec.starts_with("pool:")) {
    const std::string_view range = spec.substr(5);
    const std::size_t dash = range.find('-');
    int lo = 0, hi = 0;
    if (dash == std::string_view::npos ||
        std::from_chars(range.data(), range.data() + dash, lo).ec != std::errc{} ||
        std::from_chars(range.data() + dash + 1, range.data() + range.size(), hi).ec != std::errc{})
      throw std::invalid_argument("bad pool spec '" + std::string(spec) + "'");
    return FeatureMap(std::string(spec), rank, pattern_pool(rank, lo, hi));
  }
  if (spec.starts_with("patterns:")) {
    std::vector<Pattern> ps;
    std::string_view rest = spec.substr(9);
    while (!rest.empty()) {
      const std::size_t comma = std::min(rest.find(','), rest.size());
      ps.push_back(Pattern::parse(rest.substr(0, comma), rank));
      rest = comma < rest.size() ? rest.substr(comma + 1) : std::string_view{};
    }
    if (ps.empty()) throw std::invalid_argument("empty pattern list");
    return FeatureMap(std::string(spec), rank, std::move(ps));
  }
  return builtin_map(spec, rank);
}

/// Edge x -> y labelled v with weight C(w, x v y).
struct GraphEdge {
  Letter from;
  Word label;
  Letter to;
  std::size_t weight;
};

struct WhiteheadGraph {
  int rank;
  std::vector<GraphEdge> edges;  // sorted by (label length, from, label, to)

  std::size_t vertex_count() const { return 2 * static_cast<std::size_t>(rank); }
};

inline WhiteheadGraph whitehead_graph(const CyclicWord& w, std::size_t max_label_len) {
  const std::size_t n = w.length();
  if (n < 2) throw std::invalid_argument("whitehead_graph needs |w| >= 2");
  std::map<std::tuple<std::size_t, int, std::string, int>, std::size_t> weights;
  const auto s = w.letters();
  for (std::size_t len = 0; len <= max_label_len && len + 2 <= n; ++len) {
    for (std::size_t i = 0; i < n; ++i) {
      std::string label;
      for (std::size_t k = 1; k <= len; ++k) label.push_back(s[(i + k) % n].to_char());
      ++weights[{len, s[i].code(), label, s[(i + len + 1) % n].code()}];
    }
  }
  WhiteheadGraph g{w.rank(), {}};
  for (const auto& [k, weight] : weights)
    g.edges.push_back({Letter::from_code(std::get<1>(k)), Word::parse(std::get<2>(k), w.rank()),
                       Letter::from_code(std::get<3>(k)), weight});
  return g;
}

}  // namespace whpr
