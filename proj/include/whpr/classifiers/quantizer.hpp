#pragma once

// Partitions of a discriminant's range into labelled intervals.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "whpr/errors.hpp"

namespace whpr {

enum class QuantizerKind { EqualInterval, EqualProbability, MinError };

inline std::string to_string(QuantizerKind k) {
  switch (k) {
    case QuantizerKind::EqualInterval: return "equal";
    case QuantizerKind::EqualProbability: return "prob";
    case QuantizerKind::MinError: return "minerr";
  }
  return "?";
}

inline QuantizerKind parse_quantizer_kind(std::string_view s) {
  if (s == "equal" || s == "equal_interval") return QuantizerKind::EqualInterval;
  if (s == "prob" || s == "equal_probability") return QuantizerKind::EqualProbability;
  if (s == "minerr" || s == "min_error") return QuantizerKind::MinError;
  throw std::invalid_argument("unknown quantizer kind '" + std::string(s) + "'");
}

/// Interval i covers [boundaries[i-1], boundaries[i]); the first and last
/// intervals extend to -inf and +inf.
struct Quantizer {
  QuantizerKind kind = QuantizerKind::EqualInterval;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> boundaries;  // strictly increasing, size = intervals - 1
  std::vector<int> labels;         // one per interval
  bool degenerate = false;         // all training scores were equal

  std::size_t intervals() const { return labels.size(); }

  std::size_t interval_of(double score) const {
    return static_cast<std::size_t>(std::upper_bound(boundaries.begin(), boundaries.end(), score) - boundaries.begin());
  }

  int classify(double score) const { return labels[interval_of(score)]; }

  /// Training error of this quantizer on (scores, labels).
  double error(std::span<const double> scores, std::span<const int> truth) const {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) wrong += classify(scores[i]) != truth[i];
    return scores.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(scores.size());
  }
};

namespace detail {

inline int max_label(std::span<const int> labels) {
  int m = 0;
  for (int l : labels) {
    if (l < 1) throw DataError("quantizer labels must be >= 1");
    m = std::max(m, l);
  }
  return m;
}

// Majority label per interval (ties to the smaller label); empty intervals
// take the label of the nearest nonempty interval, the left one on ties.
inline void label_by_majority(Quantizer& q, std::span<const double> scores, std::span<const int> labels, int classes) {
  const std::size_t m = q.boundaries.size() + 1;
  std::vector<std::vector<std::size_t>> counts(m, std::vector<std::size_t>(static_cast<std::size_t>(classes) + 1, 0));
  for (std::size_t i = 0; i < scores.size(); ++i) ++counts[q.interval_of(scores[i])][static_cast<std::size_t>(labels[i])];
  q.labels.assign(m, 0);
  std::vector<bool> filled(m, false);
  for (std::size_t b = 0; b < m; ++b) {
    std::size_t best = 0;
    for (int c = 1; c <= classes; ++c) {
      if (counts[b][static_cast<std::size_t>(c)] > best) {
        best = counts[b][static_cast<std::size_t>(c)];
        q.labels[b] = c;
      }
    }
    filled[b] = best > 0;
  }
  for (std::size_t b = 0; b < m; ++b) {
    if (filled[b]) continue;
    for (std::size_t d = 1; d < m; ++d) {
      if (d <= b && filled[b - d]) {
        q.labels[b] = q.labels[b - d];
        break;
      }
      if (b + d < m && filled[b + d]) {
        q.labels[b] = q.labels[b + d];
        break;
      }
    }
  }
}

}  // namespace detail

/// M equal-width intervals over [min, max] of the training scores.
inline Quantizer equal_interval_quantizer(std::span<const double> scores, std::size_t intervals) {
  Quantizer q;
  q.kind = QuantizerKind::EqualInterval;
  q.lo = *std::min_element(scores.begin(), scores.end());
  q.hi = *std::max_element(scores.begin(), scores.end());
  if (q.hi > q.lo) {
    const double width = (q.hi - q.lo) / static_cast<double>(intervals);
    for (std::size_t i = 1; i < intervals; ++i) {
      const double b = q.lo + width * static_cast<double>(i);
      if (q.boundaries.empty() || b > q.boundaries.back()) q.boundaries.push_back(b);
    }
  }
  return q;
}

/// Intervals holding equal numbers of training scores (within one).
inline Quantizer equal_probability_quantizer(std::span<const double> scores, std::size_t intervals) {
  Quantizer q;
  q.kind = QuantizerKind::EqualProbability;
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  q.lo = sorted.front();
  q.hi = sorted.back();
  const std::size_t n = sorted.size();
  for (std::size_t i = 1; i < intervals; ++i) {
    const std::size_t cut = i * n / intervals;
    if (cut == 0 || cut >= n) continue;
    const double b = 0.5 * (sorted[cut - 1] + sorted[cut]);
    if (sorted[cut - 1] == sorted[cut]) continue;
    if (q.boundaries.empty() || b > q.boundaries.back()) q.boundaries.push_back(b);
  }
  return q;
}

/// Piecewise-constant labelling with at most M pieces that minimizes the
/// training error, by dynamic programming over runs of equal scores.
inline Quantizer min_error_quantizer(std::span<const double> scores, std::span<const int> labels, std::size_t intervals,
                                     int classes) {
  Quantizer q;
  q.kind = QuantizerKind::MinError;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  q.lo = scores[order.front()];
  q.hi = scores[order.back()];

  // Groups of identical scores with per-class counts.
  std::vector<double> value;
  std::vector<std::vector<std::size_t>> counts;
  const std::size_t C = static_cast<std::size_t>(classes);
  for (std::size_t idx : order) {
    if (value.empty() || scores[idx] != value.back()) {
      value.push_back(scores[idx]);
      counts.emplace_back(C, 0);
    }
    ++counts.back()[static_cast<std::size_t>(labels[idx] - 1)];
  }
  const std::size_t G = value.size();
  const std::size_t M = std::max<std::size_t>(1, intervals);
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;

  // cost(g, p, c): min errors over groups 0..g using p+1 pieces, the last
  // one labelled c. Stored flat.
  auto at = [&](std::size_t g, std::size_t p, std::size_t c) { return (g * M + p) * C + c; };
  std::vector<std::size_t> cost(G * M * C, kInf);
  std::vector<std::uint32_t> from(G * M * C, 0);  // packed (p, c) of the predecessor
  auto miss = [&](std::size_t g, std::size_t c) {
    std::size_t tot = 0;
    for (std::size_t k = 0; k < C; ++k) tot += counts[g][k];
    return tot - counts[g][c];
  };
  for (std::size_t c = 0; c < C; ++c) cost[at(0, 0, c)] = miss(0, c);
  for (std::size_t g = 1; g < G; ++g) {
    for (std::size_t p = 0; p < M; ++p) {
      for (std::size_t c = 0; c < C; ++c) {
        std::size_t best = cost[at(g - 1, p, c)];
        std::size_t arg = p * C + c;
        if (p > 0) {
          for (std::size_t c2 = 0; c2 < C; ++c2) {
            if (c2 == c) continue;
            if (cost[at(g - 1, p - 1, c2)] < best) {
              best = cost[at(g - 1, p - 1, c2)];
              arg = (p - 1) * C + c2;
            }
          }
        }
        if (best >= kInf) continue;
        cost[at(g, p, c)] = best + miss(g, c);
        from[at(g, p, c)] = static_cast<std::uint32_t>(arg);
      }
    }
  }
  std::size_t bp = 0, bc = 0, best = kInf;
  for (std::size_t p = 0; p < M; ++p)
    for (std::size_t c = 0; c < C; ++c)
      if (cost[at(G - 1, p, c)] < best) {
        best = cost[at(G - 1, p, c)];
        bp = p;
        bc = c;
      }
  std::vector<std::size_t> group_label(G);
  for (std::size_t g = G; g-- > 0;) {
    group_label[g] = bc;
    if (g > 0) {
      const std::size_t prev = from[at(g, bp, bc)];
      bp = prev / C;
      bc = prev % C;
    }
  }
  q.labels.push_back(static_cast<int>(group_label[0]) + 1);
  for (std::size_t g = 1; g < G; ++g) {
    if (group_label[g] != group_label[g - 1]) {
      q.boundaries.push_back(0.5 * (value[g - 1] + value[g]));
      q.labels.push_back(static_cast<int>(group_label[g]) + 1);
    }
  }
  return q;
}

/// Builds a quantizer with M intervals, each labelled by majority vote.
/// All-equal scores give a single interval flagged as degenerate.
inline Quantizer build_quantizer(std::span<const double> scores, std::span<const int> labels, std::size_t intervals,
                                 QuantizerKind kind) {
  if (scores.empty() || scores.size() != labels.size()) throw DataError("build_quantizer: bad score/label sizes");
  if (intervals < 2) throw std::invalid_argument("build_quantizer needs at least 2 intervals");
  const int classes = detail::max_label(labels);
  const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
  if (!(*mx > *mn)) {
    Quantizer q;
    q.kind = kind;
    q.lo = q.hi = *mn;
    q.degenerate = true;
    detail::label_by_majority(q, scores, labels, classes);
    return q;
  }
  Quantizer q;
  switch (kind) {
    case QuantizerKind::EqualInterval: q = equal_interval_quantizer(scores, intervals); break;
    case QuantizerKind::EqualProbability: q = equal_probability_quantizer(scores, intervals); break;
    case QuantizerKind::MinError: return min_error_quantizer(scores, labels, intervals, classes);
  }
  detail::label_by_majority(q, scores, labels, classes);
  return q;
}

}  // namespace whpr
