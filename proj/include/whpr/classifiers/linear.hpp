#pragma once

// Linear discriminants f(x) = v'x: regression, Fisher and hard-margin
// support vector.

#include <optional>

#include "whpr/classifiers/quantizer.hpp"
#include "whpr/classifiers/threshold.hpp"
#include "whpr/numerics.hpp"

namespace whpr {

enum class LinearMethod { Regression, Fisher, Svm };

inline std::string to_string(LinearMethod m) {
  switch (m) {
    case LinearMethod::Regression: return "regression";
    case LinearMethod::Fisher: return "fisher";
    case LinearMethod::Svm: return "svm";
  }
  return "?";
}

struct LinearModel {
  LinearMethod method = LinearMethod::Regression;
  Vector weights;
  ThresholdRule rule;
  std::optional<Quantizer> quantizer;

  double score(std::span<const double> x) const { return dot(weights, x); }
};

struct FisherScatter {
  Vector mean1, mean2, mean;
  double prior1 = 0.0, prior2 = 0.0;
  Matrix within;   // S_w = P1 C1 + P2 C2
  Matrix between;  // S_b = P1 P2 (mu1 - mu2)(mu1 - mu2)'
  Matrix mixture;  // S = (1/N) sum (x - mu)(x - mu)'
};

/// Scatter matrices with priors P_i = N_i / N.
inline FisherScatter fisher_scatter(const LabeledSet& set) {
  const Matrix x1 = set.class_rows(1);
  const Matrix x2 = set.class_rows(2);
  if (x1.rows() == 0 || x2.rows() == 0) throw DataError("Fisher discriminant needs samples of both classes");
  const auto [mu1, c1] = mean_and_covariance(x1);
  const auto [mu2, c2] = mean_and_covariance(x2);
  const double n = static_cast<double>(set.size());
  FisherScatter s;
  s.mean1 = mu1;
  s.mean2 = mu2;
  s.prior1 = static_cast<double>(x1.rows()) / n;
  s.prior2 = static_cast<double>(x2.rows()) / n;
  s.mean.resize(mu1.size());
  for (std::size_t i = 0; i < mu1.size(); ++i) s.mean[i] = s.prior1 * mu1[i] + s.prior2 * mu2[i];
  s.within = s.prior1 * c1 + s.prior2 * c2;
  const Vector diff = subtract(mu1, mu2);
  s.between = (s.prior1 * s.prior2) * outer(diff, diff);
  s.mixture = Matrix(mu1.size(), mu1.size());
  for (std::size_t r = 0; r < set.size(); ++r) {
    const Vector d = subtract(set.features.row(r), s.mean);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j) s.mixture(i, j) += d[i] * d[j];
  }
  s.mixture = (1.0 / n) * s.mixture;
  return s;
}

/// Fits v by the chosen method, then (theta, orientation) minimizing the
/// training error. Regression targets are 0 for class 1 and 1 for class 2;
/// the support vector rows are y_k z_k' with y = +1 for class 1.
inline LinearModel fit_linear(const LabeledSet& set, LinearMethod method) {
  set.validate();
  if (set.classes != 2) throw ModelError("linear classifiers need exactly two classes");
  LinearModel model;
  model.method = method;
  switch (method) {
    case LinearMethod::Regression: {
      Vector b(set.size());
      for (std::size_t i = 0; i < set.size(); ++i) b[i] = set.labels[i] == 1 ? 0.0 : 1.0;
      model.weights = least_squares(set.features, b);
      break;
    }
    case LinearMethod::Fisher: {
      const FisherScatter s = fisher_scatter(set);
      model.weights = solve_spd_with_ridge(s.within, subtract(s.mean1, s.mean2)).solution;
      break;
    }
    case LinearMethod::Svm: {
      Matrix a = set.features;
      for (std::size_t i = 0; i < set.size(); ++i)
        if (set.labels[i] == 2)
          for (double& x : a.row(i)) x = -x;
      model.weights = qp_hard_margin(a);
      break;
    }
  }
  if (std::all_of(model.weights.begin(), model.weights.end(), [](double w) { return w == 0.0; }))
    throw ModelError(to_string(method) + " produced a zero weight vector");
  Vector scores(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) scores[i] = model.score(set.features.row(i));
  model.rule = choose_threshold(scores, set.labels);
  return model;
}

}  // namespace whpr
