#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "whpr/numerics.hpp"

namespace whpr {

/// Training vectors (rows of `features`) with class labels in 1..classes.
struct LabeledSet {
  Matrix features;
  std::vector<int> labels;
  int classes = 2;

  LabeledSet() = default;
  LabeledSet(Matrix x, std::vector<int> y, int m) : features(std::move(x)), labels(std::move(y)), classes(m) { validate(); }

  std::size_t size() const { return labels.size(); }
  std::size_t dimension() const { return features.cols(); }

  void validate() const {
    if (labels.empty()) throw DataError("labeled set is empty");
    if (features.rows() != labels.size()) throw DataError("labeled set: feature rows != label count");
    for (int l : labels)
      if (l < 1 || l > classes) throw DataError("label " + std::to_string(l) + " outside 1.." + std::to_string(classes));
  }

  /// Rows of one class.
  Matrix class_rows(int label) const {
    std::size_t n = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
    Matrix out(n, dimension());
    std::size_t r = 0;
    for (std::size_t i = 0; i < size(); ++i)
      if (labels[i] == label) {
        std::copy(features.row(i).begin(), features.row(i).end(), out.row(r).begin());
        ++r;
      }
    return out;
  }
};

/// Which class takes scores <= theta.
enum class Orientation { LowIsClass1, LowIsClass2 };

inline std::string to_string(Orientation o) { return o == Orientation::LowIsClass1 ? "low_is_class1" : "low_is_class2"; }

inline Orientation parse_orientation(std::string_view s) {
  if (s == "low_is_class1") return Orientation::LowIsClass1;
  if (s == "low_is_class2") return Orientation::LowIsClass2;
  throw ModelError("unknown orientation '" + std::string(s) + "'");
}

struct ThresholdRule {
  double theta = 0.0;
  Orientation orientation = Orientation::LowIsClass1;
  double training_error = 0.0;

  int classify(double score) const {
    const bool low = score <= theta;
    return (low == (orientation == Orientation::LowIsClass1)) ? 1 : 2;
  }
};

/// Scans the midpoints between adjacent distinct sorted scores, under both
/// orientations. Lowest error wins; ties go to
/// the smaller theta, then to LowIsClass1. If every score is equal, theta
/// is that score.
inline ThresholdRule choose_threshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("choose_threshold: size mismatch");
  const std::size_t n = scores.size();
  std::size_t total1 = 0, total2 = 0;
  for (int l : labels) {
    if (l == 1) ++total1;
    else if (l == 2) ++total2;
    else throw std::invalid_argument("choose_threshold expects labels 1 and 2");
  }
  if (total1 == 0 || total2 == 0) throw DataError("choose_threshold needs at least one score per class");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Groups of equal scores with per-label counts.
  struct Group {
    double value;
    std::size_t n1 = 0, n2 = 0;
  };
  std::vector<Group> groups;
  for (std::size_t idx : order) {
    if (groups.empty() || scores[idx] != groups.back().value) groups.push_back({scores[idx]});
    (labels[idx] == 1 ? groups.back().n1 : groups.back().n2)++;
  }

  ThresholdRule best;
  bool have = false;
  std::size_t best_errors = n + 1;
  auto consider = [&](double t, std::size_t low1, std::size_t low2) {
    const std::size_t err_low1 = low2 + (total1 - low1);
    const std::size_t err_low2 = low1 + (total2 - low2);
    if (err_low1 < best_errors) {
      best_errors = err_low1;
      best = {t, Orientation::LowIsClass1, 0.0};
      have = true;
    }
    if (err_low2 < best_errors) {
      best_errors = err_low2;
      best = {t, Orientation::LowIsClass2, 0.0};
      have = true;
    }
  };
  if (groups.size() == 1) consider(groups[0].value, total1, total2);
  std::size_t low1 = 0, low2 = 0;
  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    low1 += groups[g].n1;
    low2 += groups[g].n2;
    consider(0.5 * (groups[g].value + groups[g + 1].value), low1, low2);
  }
  if (!have) throw DataError("choose_threshold found no candidate threshold");
  best.training_error = static_cast<double>(best_errors) / static_cast<double>(n);
  return best;
}

}  // namespace whpr
