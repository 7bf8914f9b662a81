#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dpspectra {

using Vec = std::vector<double>;

inline double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double norm_inf(const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline Vec scaled(const Vec& x, double a) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i];
  return y;
}

inline void add_in_place(Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("add: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
}

inline Vec subtracted(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("sub: dimension mismatch");
  Vec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
  return z;
}

/// In-place scale to unit Euclidean norm; returns the pre-normalization norm.
inline double normalize(Vec& x) {
  const double n = norm2(x);
  if (n > 0.0) {
    for (double& v : x) v /= n;
  }
  return n;
}

inline Vec basis_vector(int n, int i) {
  Vec e(static_cast<std::size_t>(n), 0.0);
  e[static_cast<std::size_t>(i)] = 1.0;
  return e;
}

}  // namespace dpspectra
