#pragma once

// Principal-component flats and the two distance discriminants.

#include <optional>
#include <variant>

#include "whpr/classifiers/quantizer.hpp"
#include "whpr/classifiers/threshold.hpp"
#include "whpr/numerics.hpp"

namespace whpr {

/// The affine flat through `mean` orthogonal to the columns of `normals`
/// (eigenvectors whose eigenvalues vanish).
struct FlatModel {
  Vector mean;
  Matrix normals;  // d x (d - K), orthonormal columns
  double tol = 1e-9;

  /// ||T'(x - mu)||
  double distance(std::span<const double> x) const {
    const Vector diff = subtract(x, mean);
    double s = 0.0;
    for (std::size_t k = 0; k < normals.cols(); ++k) {
      double p = 0.0;
      for (std::size_t i = 0; i < diff.size(); ++i) p += normals(i, k) * diff[i];
      s += p * p;
    }
    return std::sqrt(s);
  }
};

/// Eigendirections with lambda < tol * lambda_max span the normal space;
/// a zero covariance makes every direction normal.
inline FlatModel fit_flat(const Matrix& samples, double tol = 1e-9) {
  if (samples.rows() < 2) throw DataError("fit_flat needs at least two samples");
  const auto [mu, cov] = mean_and_covariance(samples);
  const EigenResult eig = sym_eigen(cov);
  const double lmax = eig.values.front();
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < eig.values.size(); ++k)
    if (lmax <= 0.0 || eig.values[k] < tol * lmax) keep.push_back(k);
  FlatModel f{mu, Matrix(cov.rows(), keep.size()), tol};
  for (std::size_t j = 0; j < keep.size(); ++j)
    for (std::size_t i = 0; i < cov.rows(); ++i) f.normals(i, j) = eig.vectors(i, keep[j]);
  return f;
}

enum class FlatVerdict { Class1, Class2, Both, Neither };

/// Distances below `zero_tol` count as zero.
inline FlatVerdict classify_by_flats(std::span<const double> x, const FlatModel& f1, const FlatModel& f2,
                                     double zero_tol = 1e-9) {
  if (x.size() != f1.mean.size() || x.size() != f2.mean.size())
    throw std::invalid_argument("classify_by_flats: dimension mismatch");
  const bool in1 = f1.distance(x) < zero_tol;
  const bool in2 = f2.distance(x) < zero_tol;
  if (in1 && in2) return FlatVerdict::Both;
  if (in1) return FlatVerdict::Class1;
  if (in2) return FlatVerdict::Class2;
  return FlatVerdict::Neither;
}

struct FlatDiscriminant {
  FlatModel class1;
  FlatModel class2;
};

struct MahalanobisDiscriminant {
  Vector mean1;
  Matrix inverse1;
  Vector mean2;
  Matrix inverse2;
};

enum class DistanceVariant { Flat, Mahalanobis };

struct DistanceModel {
  std::variant<FlatDiscriminant, MahalanobisDiscriminant> discriminant;
  ThresholdRule rule;
  std::optional<Quantizer> quantizer;
  bool ridge_repaired = false;

  double score(std::span<const double> x) const {
    if (const auto* f = std::get_if<FlatDiscriminant>(&discriminant))
      return f->class1.distance(x) - f->class2.distance(x);
    const auto& m = std::get<MahalanobisDiscriminant>(discriminant);
    return quadratic_form(m.inverse1, subtract(x, m.mean1)) - quadratic_form(m.inverse2, subtract(x, m.mean2));
  }
};

/// Fits the discriminant, then the threshold minimizing training error.
inline DistanceModel fit_distance(const LabeledSet& set, DistanceVariant variant, double flat_tol = 1e-9) {
  set.validate();
  if (set.classes != 2) throw ModelError("distance classifier needs exactly two classes");
  const Matrix x1 = set.class_rows(1);
  const Matrix x2 = set.class_rows(2);
  if (x1.rows() == 0 || x2.rows() == 0) throw DataError("distance classifier needs samples of both classes");
  DistanceModel model;
  if (variant == DistanceVariant::Flat) {
    model.discriminant = FlatDiscriminant{fit_flat(x1, flat_tol), fit_flat(x2, flat_tol)};
  } else {
    const auto [mu1, c1] = mean_and_covariance(x1);
    const auto [mu2, c2] = mean_and_covariance(x2);
    const RepairedInverse i1 = spd_inverse(c1);
    const RepairedInverse i2 = spd_inverse(c2);
    model.ridge_repaired = i1.ridge > 0.0 || i2.ridge > 0.0;
    model.discriminant = MahalanobisDiscriminant{mu1, i1.inverse, mu2, i2.inverse};
  }
  Vector scores(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) scores[i] = model.score(set.features.row(i));
  model.rule = choose_threshold(scores, set.labels);
  return model;
}

}  // namespace whpr
