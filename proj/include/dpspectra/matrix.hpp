#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dpspectra/linalg.hpp"

namespace dpspectra {

/// Dense real symmetric n x n matrix, row-major. Symmetry is exact: it is
/// enforced bitwise at construction and every mutation writes both triangles.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(int n) : n_(n), a_(check_dim(n), 0.0) {}

  /// Builds from a full row-major buffer; rejects non-finite entries and any
  /// pair with a[i][j] != a[j][i] (exact comparison).
  static SymmetricMatrix from_rows(int n, const std::vector<double>& rows) {
    if (n < 1) throw std::invalid_argument("SymmetricMatrix: n must be >= 1");
    if (rows.size() != static_cast<std::size_t>(n) * n)
      throw std::invalid_argument("SymmetricMatrix: buffer size does not match n*n");
    SymmetricMatrix A(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = rows[static_cast<std::size_t>(i) * n + j];
        if (!std::isfinite(v)) throw std::invalid_argument("SymmetricMatrix: non-finite entry");
        if (rows[static_cast<std::size_t>(j) * n + i] != v)
          throw std::invalid_argument("SymmetricMatrix: input is not exactly symmetric");
      }
    }
    A.a_ = rows;
    return A;
  }

  static SymmetricMatrix diagonal(const Vec& d) {
    SymmetricMatrix A(static_cast<int>(d.size()));
    for (int i = 0; i < A.n_; ++i) A.set(i, i, d[static_cast<std::size_t>(i)]);
    return A;
  }

  static SymmetricMatrix identity(int n) {
    SymmetricMatrix A(n);
    for (int i = 0; i < n; ++i) A.set(i, i, 1.0);
    return A;
  }

  int size() const { return n_; }

  double operator()(int i, int j) const { return a_[idx(i, j)]; }

  /// Writes both (i,j) and (j,i).
  void set(int i, int j, double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("SymmetricMatrix: non-finite entry");
    a_[idx(i, j)] = v;
    a_[idx(j, i)] = v;
  }

  const std::vector<double>& data() const { return a_; }

  Vec matvec(const Vec& x) const {
    if (x.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      const double* row = &a_[static_cast<std::size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s;
    }
    return y;
  }

  /// Sum of absolute values of all entries.
  double entry_l1_norm() const {
    double s = 0.0;
    for (double v : a_) s += std::abs(v);
    return s;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  /// A - t*x*x^T, kept exactly symmetric (each off-diagonal product computed once).
  SymmetricMatrix subtract_rank1(double t, const Vec& x) const {
    if (x.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("subtract_rank1: dimension mismatch");
    SymmetricMatrix B(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) {
        const double v = (*this)(i, j) - t * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        B.set(i, j, v);
      }
    }
    return B;
  }

  SymmetricMatrix add(const SymmetricMatrix& other) const {
    if (other.n_ != n_) throw std::invalid_argument("add: dimension mismatch");
    SymmetricMatrix B(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) B.a_[k] = a_[k] + other.a_[k];
    return B;
  }

  SymmetricMatrix subtract(const SymmetricMatrix& other) const {
    if (other.n_ != n_) throw std::invalid_argument("subtract: dimension mismatch");
    SymmetricMatrix B(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) B.a_[k] = a_[k] - other.a_[k];
    return B;
  }

 private:
  static std::size_t check_dim(int n) {
    if (n < 1) throw std::invalid_argument("SymmetricMatrix: n must be >= 1");
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  std::size_t idx(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
      throw std::out_of_range("SymmetricMatrix: index out of range");
    return static_cast<std::size_t>(i) * n_ + j;
  }

  int n_;
  std::vector<double> a_;
};

/// Dense real m x n matrix, row-major.
class RectMatrix {
 public:
  RectMatrix(int m, int n) : m_(m), n_(n), a_(check_dims(m, n), 0.0) {}

  static RectMatrix from_rows(int m, int n, const std::vector<double>& rows) {
    RectMatrix A(m, n);
    if (rows.size() != A.a_.size())
      throw std::invalid_argument("RectMatrix: buffer size does not match m*n");
    for (double v : rows) {
      if (!std::isfinite(v)) throw std::invalid_argument("RectMatrix: non-finite entry");
    }
    A.a_ = rows;
    return A;
  }

  int rows() const { return m_; }
  int cols() const { return n_; }

  double operator()(int i, int j) const { return a_[idx(i, j)]; }
  void set(int i, int j, double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("RectMatrix: non-finite entry");
    a_[idx(i, j)] = v;
  }

  Vec matvec(const Vec& x) const {
    if (x.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      const double* row = &a_[static_cast<std::size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s;
    }
    return y;
  }

  bool exactly_symmetric() const {
    if (m_ != n_) return false;
    for (int i = 0; i < m_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  SymmetricMatrix to_symmetric() const {
    if (!exactly_symmetric()) throw std::invalid_argument("to_symmetric: matrix is not symmetric");
    return SymmetricMatrix::from_rows(n_, a_);
  }

 private:
  static std::size_t check_dims(int m, int n) {
    if (m < 1 || n < 1) throw std::invalid_argument("RectMatrix: dimensions must be >= 1");
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
  }
  std::size_t idx(int i, int j) const {
    if (i < 0 || i >= m_ || j < 0 || j >= n_)
      throw std::out_of_range("RectMatrix: index out of range");
    return static_cast<std::size_t>(i) * n_ + j;
  }

  int m_;
  int n_;
  std::vector<double> a_;
};

/// Symmetric dilation B = [[0, A], [A^T, 0]] of an m x n matrix. B inherits
/// the nonzero singular values of A, each with multiplicity two, and its
/// eigenvalues come in +/- pairs.
inline SymmetricMatrix dilate(const RectMatrix& A) {
  const int m = A.rows();
  const int n = A.cols();
  SymmetricMatrix B(m + n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) B.set(i, m + j, A(i, j));
  return B;
}

/// Coordinate-list sparse form; only for ingestion and matvec. Converted to
/// dense before any factorization.
struct CooMatrix {
  int m = 0;
  int n = 0;
  std::vector<std::tuple<int, int, double>> entries;

  Vec matvec(const Vec& x) const {
    if (x.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(static_cast<std::size_t>(m), 0.0);
    for (const auto& [i, j, v] : entries) y[static_cast<std::size_t>(i)] += v * x[static_cast<std::size_t>(j)];
    return y;
  }

  RectMatrix to_dense() const {
    RectMatrix A(m, n);
    for (const auto& [i, j, v] : entries) A.set(i, j, v);
    return A;
  }
};

}  // namespace dpspectra
