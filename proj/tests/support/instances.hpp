#pragma once

// Synthetic instance generators shared by the unit and acceptance suites.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpspectra/linalg.hpp"
#include "dpspectra/matrix.hpp"
#include "dpspectra/rng.hpp"

namespace testsupport {

using dpspectra::RngStream;
using dpspectra::SymmetricMatrix;
using dpspectra::Vec;

/// Random orthonormal basis via modified Gram-Schmidt on a Gaussian matrix.
inline std::vector<Vec> random_orthonormal(int n, RngStream& rng) {
  std::vector<Vec> q;
  q.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Vec v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.next_gaussian();
    for (const Vec& prev : q) {
      const double c = dpspectra::dot(prev, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * prev[i];
    }
    const double nv = dpspectra::normalize(v);
    if (nv < 1e-8) throw std::runtime_error("random_orthonormal: degenerate draw");
    q.push_back(std::move(v));
  }
  return q;
}

/// A = sum_k lambda_k q_k q_k^T, assembled exactly symmetric.
inline SymmetricMatrix from_spectrum(const std::vector<Vec>& q, const Vec& lambda) {
  const int n = static_cast<int>(q[0].size());
  SymmetricMatrix A(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < lambda.size(); ++k) s += lambda[k] * q[k][static_cast<std::size_t>(i)] * q[k][static_cast<std::size_t>(j)];
      A.set(i, j, s);
    }
  }
  return A;
}

/// Random-rotation instance with a prescribed positive spectrum.
inline SymmetricMatrix rotated_spectrum(const Vec& lambda, RngStream& rng,
                                        std::vector<Vec>* basis_out = nullptr) {
  const int n = static_cast<int>(lambda.size());
  auto q = random_orthonormal(n, rng);
  SymmetricMatrix A = from_spectrum(q, lambda);
  if (basis_out) *basis_out = std::move(q);
  return A;
}

/// Gapped test spectrum: sigma1, then ratio*sigma1, then linear decay to
/// ratio*sigma1/2 over the remaining directions.
inline Vec gapped_spectrum(int n, double sigma1, double ratio) {
  Vec lam(static_cast<std::size_t>(n));
  lam[0] = sigma1;
  for (int j = 1; j < n; ++j) {
    const double f = n > 2 ? static_cast<double>(j - 1) / (n - 2) : 0.0;
    lam[static_cast<std::size_t>(j)] = ratio * sigma1 * (1.0 - 0.5 * f);
  }
  return lam;
}

/// mu of an explicitly constructed eigenbasis (ground truth without the oracle).
inline double mu_of_basis(const std::vector<Vec>& q) {
  double best = 0.0;
  const double n = static_cast<double>(q[0].size());
  for (const Vec& u : q) {
    const double m = dpspectra::norm_inf(u);
    best = std::max(best, n * m * m);
  }
  return best;
}

/// 4x4 symmetric matrix whose eigenvectors are the normalized Hadamard
/// columns (all entries +/- 1/2), eigenvalues as given.
inline SymmetricMatrix hadamard4_instance(const Vec& lambda) {
  const int h[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
  std::vector<Vec> q;
  for (int k = 0; k < 4; ++k) {
    Vec v(4);
    for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = 0.5 * h[i][k];
    q.push_back(std::move(v));
  }
  return from_spectrum(q, lambda);
}

}  // namespace testsupport
