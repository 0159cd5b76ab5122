#pragma once

// Labelled word datasets: generation (D, Se, SR, SP, S10) and the TSV file
// format.

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "whpr/generators.hpp"
#include "whpr/harness/parallel.hpp"
#include "whpr/whitehead.hpp"

namespace whpr {

/// Class 1 is minimal, class 2 non-minimal.
enum class WordLabel { Minimal = 1, NonMinimal = 2 };

inline int class_of(WordLabel l) { return static_cast<int>(l); }
inline std::string to_string(WordLabel l) { return l == WordLabel::Minimal ? "min" : "nonmin"; }

struct WordRecord {
  CyclicWord word;
  WordLabel label;
  std::optional<std::vector<NielsenMove>> reducers;  // rank-2 ground truth, filled on demand
};

struct LabeledWordSet {
  int rank = 2;
  std::vector<WordRecord> records;

  std::size_t size() const { return records.size(); }

  std::size_t count(WordLabel l) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [l](const WordRecord& r) { return r.label == l; }));
  }

  /// Index of the first record whose label disagrees with is_minimal.
  std::optional<std::size_t> first_unsound(std::size_t threads = 1) const {
    std::vector<char> bad(records.size(), 0);
    parallel_for(records.size(), threads, [&](std::size_t i) {
      bad[i] = is_minimal(records[i].word) != (records[i].label == WordLabel::Minimal);
    });
    for (std::size_t i = 0; i < bad.size(); ++i)
      if (bad[i]) return i;
    return std::nullopt;
  }

  /// Fills `reducers` for every record (rank 2 only).
  void annotate_reducers(std::size_t threads = 1) {
    parallel_for(records.size(), threads, [&](std::size_t i) {
      if (!records[i].reducers) records[i].reducers = reducing_moves(records[i].word);
    });
  }
};

enum class DatasetKind { D, Se, SR, SP, S10 };

inline std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::D: return "D";
    case DatasetKind::Se: return "Se";
    case DatasetKind::SR: return "SR";
    case DatasetKind::SP: return "SP";
    case DatasetKind::S10: return "S10";
  }
  return "?";
}

inline DatasetKind parse_dataset_kind(std::string_view s) {
  for (DatasetKind k : {DatasetKind::D, DatasetKind::Se, DatasetKind::SR, DatasetKind::SP, DatasetKind::S10})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown dataset kind '" + std::string(s) + "'");
}

struct DatasetSpec {
  DatasetKind kind = DatasetKind::D;
  int rank = 2;
  std::size_t max_length = 1000;  // L
  std::size_t per_length = 10;    // D, Se, S10
  std::size_t size = 5000;        // SR, SP
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct GenerationLog {
  std::size_t skipped_substitutions = 0;  // no length-increasing move found in 100 draws
};

namespace detail {

inline constexpr std::size_t kSubstitutionDraws = 100;

// Draws proper type II moves until one lengthens `w`; nullopt after the cap.
inline std::optional<CyclicWord> lengthen(const CyclicWord& w, Rng& rng) {
  for (std::size_t draw = 0; draw < kSubstitutionDraws; ++draw) {
    const WhiteheadAutomorphism t = random_type2(w.rank(), rng);
    CyclicWord img = t.apply(w);
    if (img.length() > w.length()) return img;
  }
  return std::nullopt;
}

inline std::uint64_t kind_salt(DatasetKind k) { return Rng::mix(0x5eed0000ull + static_cast<std::uint64_t>(k)); }

}  // namespace detail

/// Deterministic in (spec, seed); every record's generator is seeded from
/// (seed, kind, record index), so the thread count does not matter.
inline LabeledWordSet generate_dataset(const DatasetSpec& spec, GenerationLog* log = nullptr) {
  check_rank(spec.rank);
  if (spec.max_length < 1) throw std::invalid_argument("dataset max length must be >= 1");
  const bool by_length = spec.kind == DatasetKind::D || spec.kind == DatasetKind::Se || spec.kind == DatasetKind::S10;
  const std::size_t n = by_length ? spec.max_length * spec.per_length : spec.size;
  const std::uint64_t master = spec.seed ^ detail::kind_salt(spec.kind);

  LabeledWordSet set;
  set.rank = spec.rank;
  std::vector<std::optional<WordRecord>> slots(n);
  std::vector<char> skipped(n, 0);

  parallel_for(n, spec.threads, [&](std::size_t r) {
    Rng rng = Rng::stream(master, r);
    if (by_length) {
      const std::size_t length = r / spec.per_length + 1;
      const CyclicWord m = minimize(random_cyclic_word(length, spec.rank, rng)).minimal;
      WordRecord rec{m, WordLabel::Minimal, std::nullopt};
      if (rng.coin(0.5)) {
        const std::size_t steps = spec.kind == DatasetKind::S10 ? rng.between(1, 10) : 1;
        CyclicWord cur = m;
        for (std::size_t s = 0; s < steps; ++s) {
          auto next = detail::lengthen(cur, rng);
          if (!next) break;
          cur = std::move(*next);
        }
        if (cur.length() > m.length())
          rec = {cur, WordLabel::NonMinimal, std::nullopt};
        else
          skipped[r] = 1;
      }
      slots[r] = std::move(rec);
    } else if (spec.kind == DatasetKind::SR) {
      const std::size_t length = rng.between(1, spec.max_length);
      CyclicWord w(random_word(length, spec.rank, rng));
      const WordLabel label = is_minimal(w) ? WordLabel::Minimal : WordLabel::NonMinimal;
      slots[r] = WordRecord{std::move(w), label, std::nullopt};
    } else {
      // SP: grow a primitive by length-increasing random Whitehead moves
      // until it reaches a target length drawn uniformly from [1, L].
      const std::size_t target = rng.between(1, spec.max_length);
      CyclicWord w = random_primitive(spec.rank, 0, rng);
      for (std::size_t draw = 0; w.length() < target && draw < 64 * target; ++draw) {
        CyclicWord img = random_whitehead(spec.rank, rng).apply(w);
        if (img.length() > w.length()) w = std::move(img);
      }
      const WordLabel label = is_minimal(w) ? WordLabel::Minimal : WordLabel::NonMinimal;
      slots[r] = WordRecord{std::move(w), label, std::nullopt};
    }
  });

  set.records.reserve(n);
  for (auto& s : slots) set.records.push_back(std::move(*s));
  if (log) log->skipped_substitutions = static_cast<std::size_t>(std::count(skipped.begin(), skipped.end(), 1));
  if (auto bad = set.first_unsound(spec.threads))
    throw std::logic_error("generated record " + std::to_string(*bad) + " has an unsound label");
  return set;
}

// ---- TSV ------------------------------------------------------------------

inline void write_dataset(std::ostream& out, const LabeledWordSet& set) {
  out << "# word\tlabel\tlength\n";
  for (const auto& r : set.records) out << r.word.str() << '\t' << to_string(r.label) << '\t' << r.word.length() << '\n';
}

inline std::string dataset_to_string(const LabeledWordSet& set) {
  std::ostringstream os;
  write_dataset(os, set);
  return os.str();
}

/// Parses the TSV form; lines starting with '#' are skipped.
inline LabeledWordSet read_dataset(std::istream& in, int rank) {
  check_rank(rank);
  LabeledWordSet set;
  set.rank = rank;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string word, label, length;
    if (!std::getline(fields, word, '\t') || !std::getline(fields, label, '\t') || !std::getline(fields, length, '\t'))
      throw DataError("dataset line " + std::to_string(line_no) + ": expected word<TAB>label<TAB>length");
    WordLabel l;
    if (label == "min")
      l = WordLabel::Minimal;
    else if (label == "nonmin")
      l = WordLabel::NonMinimal;
    else
      throw DataError("dataset line " + std::to_string(line_no) + ": bad label '" + label + "'");
    CyclicWord w = CyclicWord::parse(word, rank);
    if (w.str() != word)
      throw DataError("dataset line " + std::to_string(line_no) + ": word is not a canonical cyclic word");
    if (std::to_string(w.length()) != length)
      throw DataError("dataset line " + std::to_string(line_no) + ": length column disagrees with the word");
    set.records.push_back({std::move(w), l, std::nullopt});
  }
  return set;
}

}  // namespace whpr
