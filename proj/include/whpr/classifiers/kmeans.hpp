#pragma once

#include <limits>
#include <numeric>
#include <optional>

#include "whpr/numerics.hpp"
#include "whpr/random.hpp"

namespace whpr {

struct KMeansModel {
  Matrix centers;                        // K x d
  std::vector<std::size_t> assignment;   // cluster of every point
  std::size_t iterations = 0;
  double objective = 0.0;                // sum of squared distances
  double objective_unsquared = 0.0;      // sum of plain distances (J)
  std::vector<double> objective_history; // squared objective after each update

  /// Nearest center, lower index on ties.
  std::size_t nearest(std::span<const double> x) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centers.rows(); ++k) {
      double d = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double t = x[j] - centers(k, j);
        d += t * t;
      }
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  }
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    d += t * t;
  }
  return d;
}

}  // namespace detail

/// Lloyd iterations from `init` (K x d) or, when absent, from K distinct
/// points drawn with `rng`. Stops when assignments stop changing or after
/// `max_iter` assignment steps. Empty clusters are moved onto the point
/// farthest from its own center.
inline KMeansModel kmeans(const Matrix& points, std::size_t k, const std::optional<Matrix>& init, std::size_t max_iter,
                          Rng* rng = nullptr) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  if (k == 0) throw std::invalid_argument("kmeans needs K >= 1");
  if (k > n) throw DataError("kmeans: K = " + std::to_string(k) + " exceeds the number of points");
  KMeansModel m;
  if (init) {
    if (init->rows() != k || init->cols() != d) throw std::invalid_argument("kmeans: initial centers have wrong shape");
    m.centers = *init;
  } else {
    if (!rng) throw std::invalid_argument("kmeans: random initialization needs an Rng");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng->below(n - i)]);
    m.centers = Matrix(k, d);
    for (std::size_t i = 0; i < k; ++i)
      std::copy(points.row(idx[i]).begin(), points.row(idx[i]).end(), m.centers.row(i).begin());
  }

  m.assignment.assign(n, k);  // k = unassigned
  for (std::size_t it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = m.nearest(points.row(i));
      changed = changed || c != m.assignment[i];
      m.assignment[i] = c;
    }
    m.iterations = it + 1;
    if (!changed) break;

    Matrix sums(k, d);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[m.assignment[i]];
      for (std::size_t j = 0; j < d; ++j) sums(m.assignment[i], j) += points(i, j);
    }
    for (std::size_t c = 0; c < k; ++c)
      if (sizes[c] > 0)
        for (std::size_t j = 0; j < d; ++j) m.centers(c, j) = sums(c, j) / static_cast<double>(sizes[c]);

    double obj = 0.0;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = detail::squared_distance(points.row(i), m.centers.row(m.assignment[i]));
      obj += dist[i];
    }
    m.objective_history.push_back(obj);

    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i)
        if (!taken[i] && (far == n || dist[i] > dist[far])) far = i;
      taken[far] = true;
      std::copy(points.row(far).begin(), points.row(far).end(), m.centers.row(c).begin());
    }
  }

  m.objective = 0.0;
  m.objective_unsquared = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sq = detail::squared_distance(points.row(i), m.centers.row(m.assignment[i]));
    m.objective += sq;
    m.objective_unsquared += std::sqrt(sq);
  }
  return m;
}

}  // namespace whpr
