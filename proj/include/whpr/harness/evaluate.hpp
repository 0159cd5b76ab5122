#pragma once

// Stratified accuracy, confusion counts and class-conditional score
// histograms.

#include <functional>
#include <iomanip>
#include <ostream>

#include "whpr/harness/pipeline.hpp"

namespace whpr {

using Predictor = std::function<Prediction(const CyclicWord&)>;

inline Predictor predictor_of(const Pipeline& p) {
  return [&p](const CyclicWord& w) { return p.predict(w); };
}

/// Always right: labels by is_minimal, score 0 for minimal and 1 otherwise.
inline Predictor oracle_predictor() {
  return [](const CyclicWord& w) {
    const bool m = is_minimal(w);
    return Prediction{m ? 1 : 2, m ? 0.0 : 1.0};
  };
}

struct StratumAccuracy {
  std::size_t min_length_exclusive = 0;  // records with |w| > this
  std::size_t n = 0;
  std::size_t correct = 0;
  std::optional<double> accuracy;  // absent for an empty stratum
};

struct Confusion {
  // [truth - 1][predicted - 1]
  std::array<std::array<std::size_t, 2>, 2> counts{};

  std::size_t total() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
};

struct ScoreHistogram {
  double lo = 0.0, hi = 0.0;
  std::vector<double> centers;
  std::vector<std::size_t> class1, class2;

  std::size_t total() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < centers.size(); ++i) t += class1[i] + class2[i];
    return t;
  }

  /// sum over bins of min(class1, class2), as a fraction of all samples.
  double overlap_mass() const {
    const std::size_t t = total();
    if (t == 0) return 0.0;
    std::size_t o = 0;
    for (std::size_t i = 0; i < centers.size(); ++i) o += std::min(class1[i], class2[i]);
    return static_cast<double>(o) / static_cast<double>(t);
  }

  /// Fraction of one class's samples in bins whose center is <= theta.
  double mass_below(int cls, double theta) const {
    const auto& c = cls == 1 ? class1 : class2;
    std::size_t below = 0, all = 0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      all += c[i];
      if (centers[i] <= theta) below += c[i];
    }
    return all == 0 ? 0.0 : static_cast<double>(below) / static_cast<double>(all);
  }
};

struct EvaluationReport {
  std::vector<StratumAccuracy> strata;
  Confusion confusion;
  ScoreHistogram histogram;
};

inline const std::vector<std::size_t> kDefaultStrata = {0, 4, 100};

/// Equal-width bins over [lo, hi] (the score range when not given); scores
/// outside the range fall into the edge bins.
inline ScoreHistogram bin_scores(std::span<const double> scores, std::span<const int> labels, std::size_t bins,
                                 std::optional<std::pair<double, double>> range = std::nullopt) {
  if (bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  if (scores.size() != labels.size()) throw std::invalid_argument("histogram: score/label size mismatch");
  ScoreHistogram h;
  if (range) {
    std::tie(h.lo, h.hi) = *range;
    if (!(h.hi > h.lo)) throw std::invalid_argument("histogram range must have hi > lo");
  } else if (!scores.empty()) {
    const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
    h.lo = *mn;
    h.hi = *mx;
  }
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  h.centers.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) h.centers[b] = h.lo + (static_cast<double>(b) + 0.5) * width;
  h.class1.assign(bins, 0);
  h.class2.assign(bins, 0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::size_t b = 0;
    if (width > 0.0) {
      const double pos = std::floor((scores[i] - h.lo) / width);
      b = pos <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
    }
    (labels[i] == 1 ? h.class1 : h.class2)[b]++;
  }
  return h;
}

inline EvaluationReport evaluate(const Predictor& predictor, const LabeledWordSet& test,
                                 const std::vector<std::size_t>& strata = kDefaultStrata, std::size_t bins = 50,
                                 std::size_t threads = 1,
                                 std::optional<std::pair<double, double>> range = std::nullopt) {
  std::vector<Prediction> preds(test.size());
  parallel_for(test.size(), threads, [&](std::size_t i) { preds[i] = predictor(test.records[i].word); });

  EvaluationReport rep;
  for (std::size_t t : strata) {
    StratumAccuracy s{t, 0, 0, std::nullopt};
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (test.records[i].word.length() <= t) continue;
      ++s.n;
      if (preds[i].label == class_of(test.records[i].label)) ++s.correct;
    }
    if (s.n > 0) s.accuracy = static_cast<double>(s.correct) / static_cast<double>(s.n);
    rep.strata.push_back(s);
  }
  std::vector<double> scores(test.size());
  const std::vector<int> labels = class_labels(test);
  for (std::size_t i = 0; i < test.size(); ++i) {
    scores[i] = preds[i].score;
    rep.confusion.counts[static_cast<std::size_t>(labels[i] - 1)][preds[i].label == 1 ? 0 : 1]++;
  }
  rep.histogram = bin_scores(scores, labels, bins, range);
  return rep;
}

inline EvaluationReport evaluate(const Pipeline& p, const LabeledWordSet& test,
                                 const std::vector<std::size_t>& strata = kDefaultStrata, std::size_t bins = 50,
                                 std::size_t threads = 1,
                                 std::optional<std::pair<double, double>> range = std::nullopt) {
  return evaluate(predictor_of(p), test, strata, bins, threads, range);
}

inline ScoreHistogram score_histogram(const Pipeline& p, const LabeledWordSet& set, std::size_t bins,
                                      std::optional<std::pair<double, double>> range = std::nullopt,
                                      std::size_t threads = 1) {
  std::vector<double> scores(set.size());
  parallel_for(set.size(), threads, [&](std::size_t i) { scores[i] = p.predict(set.records[i].word).score; });
  return bin_scores(scores, class_labels(set), bins, range);
}

// ---- CSV ------------------------------------------------------------------

inline void write_accuracy_csv(std::ostream& out, const EvaluationReport& rep) {
  out << "stratum,n,accuracy\n";
  const auto old = out.precision(17);
  for (const auto& s : rep.strata) {
    out << "|w|>" << s.min_length_exclusive << ',' << s.n << ',';
    if (s.accuracy) out << *s.accuracy;
    out << '\n';
  }
  out.precision(old);
}

inline void write_histogram_csv(std::ostream& out, const ScoreHistogram& h) {
  out << "bin_center,count_class1,count_class2\n";
  const auto old = out.precision(17);
  for (std::size_t b = 0; b < h.centers.size(); ++b) out << h.centers[b] << ',' << h.class1[b] << ',' << h.class2[b] << '\n';
  out.precision(old);
}

}  // namespace whpr
