#pragma once

// Greedy forward selection of counting functions for the regression
// pipeline.

#include "whpr/harness/pipeline.hpp"

namespace whpr {

struct SelectionConfig {
  std::optional<QuantizerKind> quantizer = QuantizerKind::EqualInterval;
  std::size_t bins = 100;
  double min_improvement = 0.001;
  std::optional<std::size_t> max_features;
  std::size_t threads = 1;
};

struct SelectionResult {
  std::vector<Pattern> selected;
  std::vector<std::size_t> pool_indices;
  double baseline_accuracy = 0.0;       // training-majority class on validation
  std::vector<double> accuracy_trace;   // validation accuracy after each accepted pattern
};

namespace detail {

inline double validation_accuracy(const Matrix& xtr, const std::vector<int>& ytr, const Matrix& xval,
                                  const std::vector<int>& yval, std::span<const std::size_t> cols,
                                  const Matrix& gram, std::span<const double> rhs, const SelectionConfig& cfg) {
  const Vector v = solve_spd_with_ridge(gram, rhs).solution;
  auto score = [&](const Matrix& x, std::size_t i) {
    double s = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) s += v[k] * x(i, cols[k]);
    return s;
  };
  Vector tr(xtr.rows());
  for (std::size_t i = 0; i < tr.size(); ++i) tr[i] = score(xtr, i);
  std::optional<Quantizer> q;
  ThresholdRule rule;
  if (cfg.quantizer)
    q = build_quantizer(tr, ytr, cfg.bins, *cfg.quantizer);
  else
    rule = choose_threshold(tr, ytr);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < xval.rows(); ++i) {
    const double s = score(xval, i);
    if ((q ? q->classify(s) : rule.classify(s)) == yval[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(xval.rows());
}

}  // namespace detail

/// Starts empty and repeatedly adds the pool pattern that maximizes
/// validation accuracy of the retrained regression model; stops when the
/// best gain is below `min_improvement`. Ties go to the earlier pattern.
inline SelectionResult greedy_feature_selection(const std::vector<Pattern>& pool, const LabeledWordSet& train,
                                                const LabeledWordSet& validation, const SelectionConfig& cfg = {}) {
  if (pool.empty()) throw DataError("feature pool is empty");
  if (train.size() == 0 || validation.size() == 0) throw DataError("selection needs nonempty train and validation sets");
  const FeatureMap map("pool", train.rank, pool);
  const Matrix xtr = feature_matrix(train, map, cfg.threads);
  const Matrix xval = feature_matrix(validation, map, cfg.threads);
  const std::vector<int> ytr = class_labels(train);
  const std::vector<int> yval = class_labels(validation);
  const std::size_t n = xtr.rows(), p = pool.size();

  Vector atb(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (ytr[i] == 2)
      for (std::size_t j = 0; j < p; ++j) atb[j] += xtr(i, j);
  auto cross_column = [&](std::size_t s) {
    Vector c(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double xs = xtr(i, s);
      if (xs == 0.0) continue;
      for (std::size_t j = 0; j < p; ++j) c[j] += xs * xtr(i, j);
    }
    return c;
  };

  SelectionResult res;
  const std::size_t n2 = static_cast<std::size_t>(std::count(ytr.begin(), ytr.end(), 2));
  const int majority = n2 > n - n2 ? 2 : 1;
  res.baseline_accuracy =
      static_cast<double>(std::count(yval.begin(), yval.end(), majority)) / static_cast<double>(yval.size());

  std::vector<Vector> cross;  // cross[k][j] = <x_{sel k}, x_j>
  std::vector<char> used(p, 0);
  double current = res.baseline_accuracy;
  const std::size_t limit = cfg.max_features.value_or(p);
  while (res.pool_indices.size() < limit) {
    const std::size_t d = res.pool_indices.size() + 1;
    std::vector<double> acc(p, -1.0);
    parallel_for(p, cfg.threads, [&](std::size_t j) {
      if (used[j]) return;
      std::vector<std::size_t> cols(res.pool_indices);
      cols.push_back(j);
      Matrix g(d, d);
      Vector rhs(d);
      for (std::size_t a = 0; a + 1 < d; ++a) {
        for (std::size_t b = 0; b + 1 < d; ++b) g(a, b) = cross[a][cols[b]];
        g(a, d - 1) = g(d - 1, a) = cross[a][j];
      }
      double diag = 0.0;
      for (std::size_t i = 0; i < n; ++i) diag += xtr(i, j) * xtr(i, j);
      g(d - 1, d - 1) = diag;
      for (std::size_t a = 0; a < d; ++a) rhs[a] = atb[cols[a]];
      acc[j] = detail::validation_accuracy(xtr, ytr, xval, yval, cols, g, rhs, cfg);
    });
    std::size_t best = p;
    for (std::size_t j = 0; j < p; ++j)
      if (!used[j] && (best == p || acc[j] > acc[best])) best = j;
    if (best == p || acc[best] - current < cfg.min_improvement) break;
    used[best] = 1;
    res.pool_indices.push_back(best);
    res.selected.push_back(pool[best]);
    res.accuracy_trace.push_back(acc[best]);
    cross.push_back(cross_column(best));
    current = acc[best];
  }
  return res;
}

}  // namespace whpr
