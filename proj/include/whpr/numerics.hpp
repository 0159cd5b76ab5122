#pragma once

// Small dense linear algebra for the classifiers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "whpr/errors.hpp"

namespace whpr {

using Vector = std::vector<double>;

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw std::invalid_argument("ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  Vector column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// max row sum of absolute values
  double norm_inf() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (double x : row(i)) s += std::abs(x);
      best = std::max(best, s);
    }
    return best;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols_ != x.size()) throw std::invalid_argument("matrix-vector dimension mismatch");
    Vector y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      const auto r = a.row(i);
      y[i] = std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
    }
    return y;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend Matrix operator*(double s, Matrix a) {
    for (double& x : a.data_) x *= s;
    return a;
  }

  bool operator==(const Matrix&) const = default;

 private:
  void check_same(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw std::invalid_argument("matrix dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("subtract: dimension mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

/// x' M x
inline double quadratic_form(const Matrix& m, std::span<const double> x) {
  const Vector mx = m * x;
  return dot(x, mx);
}

/// (x)(y)'
inline Matrix outer(std::span<const double> x, std::span<const double> y) {
  Matrix m(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) m(i, j) = x[i] * y[j];
  return m;
}

struct MeanCovariance {
  Vector mean;
  Matrix covariance;
};

/// Sample mean and 1/N covariance of the rows of `samples`.
inline MeanCovariance mean_and_covariance(const Matrix& samples) {
  const std::size_t n = samples.rows();
  const std::size_t d = samples.cols();
  if (n == 0) throw DataError("mean_and_covariance: empty sample list");
  Vector mu(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mu[j] += samples(i, j);
  for (double& m : mu) m /= static_cast<double>(n);
  Matrix c(d, d);
  Vector diff(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) diff[j] = samples(i, j) - mu[j];
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = j; k < d; ++k) c(j, k) += diff[j] * diff[k];
  }
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j; k < d; ++k) {
      c(j, k) /= static_cast<double>(n);
      c(k, j) = c(j, k);
    }
  return {std::move(mu), std::move(c)};
}

struct EigenResult {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values[i]
};

/// Cyclic Jacobi rotations until the largest off-diagonal entry drops below
/// 1e-12 ||C||_inf.
inline EigenResult sym_eigen(const Matrix& c) {
  const std::size_t n = c.rows();
  if (c.cols() != n) throw std::invalid_argument("sym_eigen: matrix is not square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(c(i, j) - c(j, i)) > 1e-10)
        throw std::invalid_argument("sym_eigen: matrix is not symmetric");

  Matrix a = c;
  Matrix v = Matrix::identity(n);
  const double scale = c.norm_inf();
  const double tol = 1e-12 * scale;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= tol) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = cs * akp - sn * akq;
          a(k, q) = sn * akp + cs * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = cs * apk - sn * aqk;
          a(q, k) = sn * apk + cs * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = cs * vkp - sn * vkq;
          v(k, q) = sn * vkp + cs * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  EigenResult r{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    r.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) r.vectors(i, k) = v(i, order[k]);
  }
  return r;
}

struct SpectralSolve {
  Vector solution;
  double ridge = 0.0;  // zero unless the system was singular
};

namespace detail {

struct RidgedSpectrum {
  EigenResult eig;
  double ridge = 0.0;
};

// A ridge of 1e-8 trace(M)/dim is added when lambda_min < 1e-12 lambda_max.
inline RidgedSpectrum ridged_spectrum(const Matrix& m) {
  const std::size_t d = m.rows();
  RidgedSpectrum out{sym_eigen(m), 0.0};
  const double lmax = out.eig.values.front();
  const double lmin = out.eig.values.back();
  if (!(lmin >= 1e-12 * lmax) || lmax <= 0.0) {
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += m(i, i);
    out.ridge = 1e-8 * trace / static_cast<double>(d);
    if (!(out.ridge > 0.0)) out.ridge = 1e-12;
  }
  return out;
}

}  // namespace detail

/// Solves (M + ridge I) x = rhs for symmetric PSD M; ridge is zero unless M
/// is numerically singular.
inline SpectralSolve solve_spd_with_ridge(const Matrix& m, std::span<const double> rhs) {
  const std::size_t d = m.rows();
  if (rhs.size() != d) throw std::invalid_argument("solve: dimension mismatch");
  const auto [eig, ridge] = detail::ridged_spectrum(m);
  Vector x(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double proj = 0.0;
    for (std::size_t i = 0; i < d; ++i) proj += eig.vectors(i, k) * rhs[i];
    const double coef = proj / (std::max(eig.values[k], 0.0) + ridge);
    for (std::size_t i = 0; i < d; ++i) x[i] += coef * eig.vectors(i, k);
  }
  return {std::move(x), ridge};
}

struct RepairedInverse {
  Matrix inverse;
  double ridge = 0.0;
};

/// Inverse of a symmetric PSD matrix, ridge-repaired when singular.
inline RepairedInverse spd_inverse(const Matrix& m) {
  const std::size_t d = m.rows();
  const auto [eig, ridge] = detail::ridged_spectrum(m);
  RepairedInverse out{Matrix(d, d), ridge};
  for (std::size_t k = 0; k < d; ++k) {
    const double inv = 1.0 / (std::max(eig.values[k], 0.0) + ridge);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out.inverse(i, j) += inv * eig.vectors(i, k) * eig.vectors(j, k);
  }
  return out;
}

/// Normal equation v = (A'A)^{-1} A'b with the ridge fallback.
inline SpectralSolve least_squares_solve(const Matrix& a, std::span<const double> b) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("least_squares: zero-dimension input");
  if (a.rows() != b.size()) throw std::invalid_argument("least_squares: rows(A) != len(b)");
  const std::size_t d = a.cols();
  Matrix ata(d, d);
  Vector atb(d, 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      atb[i] += row[i] * b[r];
      for (std::size_t j = i; j < d; ++j) ata(i, j) += row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) ata(i, j) = ata(j, i);
  return solve_spd_with_ridge(ata, atb);
}

inline Vector least_squares(const Matrix& a, std::span<const double> b) { return least_squares_solve(a, b).solution; }

struct QpOptions {
  std::size_t max_sweeps = 200000;
  double tolerance = 1e-10;
};

/// Hard-margin program: minimize w'w subject to A w >= 1. Coordinate ascent
/// on the nonnegative dual (Hildreth), w = A' alpha.
inline Vector qp_hard_margin(const Matrix& a, QpOptions opt = {}) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  if (n == 0 || d == 0) throw std::invalid_argument("qp_hard_margin: empty constraint matrix");
  Vector sq(n);
  for (std::size_t k = 0; k < n; ++k) {
    sq[k] = dot(a.row(k), a.row(k));
    if (sq[k] == 0.0) throw NonSeparable("constraint row " + std::to_string(k) + " is zero");
  }
  Vector alpha(n, 0.0);
  Vector w(d, 0.0);
  for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto row = a.row(k);
      const double margin = dot(row, w);
      const double next = std::max(0.0, alpha[k] + (1.0 - margin) / sq[k]);
      const double delta = next - alpha[k];
      if (delta == 0.0) continue;
      alpha[k] = next;
      for (std::size_t j = 0; j < d; ++j) w[j] += delta * row[j];
    }
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) min_margin = std::min(min_margin, dot(a.row(k), w));
    const double ww = dot(w, w);
    const double sum_alpha = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    if (sum_alpha > 1e15) break;
    const double gap = std::abs(ww - sum_alpha);
    if (min_margin >= 1.0 - opt.tolerance && gap <= opt.tolerance * std::max(1.0, ww)) {
      if (min_margin < 1.0)
        for (double& x : w) x /= min_margin;
      return w;
    }
  }
  throw NonSeparable("hard-margin program did not reach a feasible optimum");
}

}  // namespace whpr
