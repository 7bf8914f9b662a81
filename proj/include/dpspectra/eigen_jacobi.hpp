#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dpspectra/errors.hpp"
#include "dpspectra/linalg.hpp"
#include "dpspectra/matrix.hpp"

namespace dpspectra {

/// Ordered singular triples (sigma_i, u_i, v_i) of a matrix, sigma
/// nonincreasing. For a symmetric input v_i = sign(lambda_i) * u_i and the
/// signed eigenvalues are kept alongside. For a rectangular input (obtained
/// through the dilation path) only the triples of nonzero singular values are
/// available.
struct SpectralFactorization {
  std::vector<double> sigma;        // nonincreasing, >= 0
  std::vector<Vec> left;            // u_i, orthonormal
  std::vector<Vec> right;           // v_i, orthonormal
  std::vector<double> eigenvalues;  // signed; empty for rectangular inputs
  std::string provenance;           // identifier of the factorization run

  /// Number of singular values above rel_tol * sigma_1.
  int rank(double rel_tol = 1e-12) const {
    if (sigma.empty() || sigma[0] == 0.0) return 0;
    const double cut = rel_tol * sigma[0];
    int r = 0;
    for (double s : sigma)
      if (s > cut) ++r;
    return r;
  }
};

namespace detail {

constexpr int kJacobiSweepCap = 100;
constexpr double kJacobiRelTol = 1e-12;  // off-diagonal Frobenius mass vs ||A||_F

inline double offdiag_frobenius(const std::vector<double>& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = a[static_cast<std::size_t>(i) * n + j];
      s += 2.0 * v * v;
    }
  return std::sqrt(s);
}

}  // namespace detail

/// Exact symmetric eigendecomposition by cyclic Jacobi rotations. Desk-scale
/// oracle: n <= 4096, single-threaded, deterministic (identical inputs give
/// bitwise-identical outputs). Converges the off-diagonal Frobenius mass below
/// 1e-12 * ||A||_F or throws NumericError after 100 sweeps.
///
/// Output ordering: nonincreasing |lambda|, ties broken by the original index
/// of the converged diagonal entry. sigma_i = |lambda_i|, u_i is the
/// eigenvector, v_i = sign(lambda_i) * u_i, so A = sum_i sigma_i u_i v_i^T.
inline SpectralFactorization exact_factorization(const SymmetricMatrix& A) {
  const int n = A.size();
  if (n > 4096) throw std::invalid_argument("exact_factorization: n exceeds the 4096 oracle limit");

  std::vector<double> a = A.data();
  std::vector<double> vmat(static_cast<std::size_t>(n) * n, 0.0);  // column k = k-th eigenvector
  for (int i = 0; i < n; ++i) vmat[static_cast<std::size_t>(i) * n + i] = 1.0;

  const double fro = A.frobenius_norm();
  const double tol = detail::kJacobiRelTol * fro;
  // Rotations below this threshold cannot keep the off-diagonal mass above tol.
  const double skip = tol / (2.0 * n);

  auto at = [&a, n](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

  int sweeps = 0;
  double off = detail::offdiag_frobenius(a, n);
  while (off > tol) {
    if (sweeps >= detail::kJacobiSweepCap) {
      throw NumericError("jacobi oracle did not converge after " +
                         std::to_string(detail::kJacobiSweepCap) +
                         " sweeps; off-diagonal residual " + std::to_string(off) +
                         " vs tolerance " + std::to_string(tol));
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= skip) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = at(p, k) = c * akp - s * akq;
          at(k, q) = at(q, k) = s * akp + c * akq;
        }
        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = at(q, p) = 0.0;

        for (int k = 0; k < n; ++k) {
          const double vkp = vmat[static_cast<std::size_t>(k) * n + p];
          const double vkq = vmat[static_cast<std::size_t>(k) * n + q];
          vmat[static_cast<std::size_t>(k) * n + p] = c * vkp - s * vkq;
          vmat[static_cast<std::size_t>(k) * n + q] = s * vkp + c * vkq;
        }
      }
    }
    ++sweeps;
    off = detail::offdiag_frobenius(a, n);
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(at(i, i)) > std::abs(at(j, j));
  });

  SpectralFactorization F;
  F.sigma.reserve(static_cast<std::size_t>(n));
  F.eigenvalues.reserve(static_cast<std::size_t>(n));
  F.left.reserve(static_cast<std::size_t>(n));
  F.right.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    const int k = order[static_cast<std::size_t>(r)];
    const double lambda = at(k, k);
    Vec u(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = vmat[static_cast<std::size_t>(i) * n + k];
    F.eigenvalues.push_back(lambda);
    F.sigma.push_back(std::abs(lambda));
    F.right.push_back(lambda < 0.0 ? scaled(u, -1.0) : u);
    F.left.push_back(std::move(u));
  }
  F.provenance = "jacobi-cyclic-v1/n=" + std::to_string(n) + "/sweeps=" + std::to_string(sweeps);
  return F;
}

/// sigma_1(A), computed through the oracle.
inline double spectral_norm(const SymmetricMatrix& A) {
  return exact_factorization(A).sigma[0];
}

/// Singular triples of a rectangular matrix through its symmetric dilation:
/// the positive-eigenvalue eigenvectors w = (u, v)/sqrt(2) of the dilation
/// give the triples of A. Only nonzero singular values carry vectors; sigma
/// is padded with zeros up to min(m, n).
inline SpectralFactorization rect_factorization(const RectMatrix& A) {
  const int m = A.rows();
  const int n = A.cols();
  const SpectralFactorization FB = exact_factorization(dilate(A));
  const double top = FB.sigma.empty() ? 0.0 : FB.sigma[0];
  const double cut = 1e-10 * top;

  SpectralFactorization F;
  F.provenance = FB.provenance + "/dilated";
  const double sqrt2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < FB.sigma.size(); ++i) {
    if (FB.eigenvalues[i] <= cut || FB.eigenvalues[i] <= 0.0) continue;
    const Vec& w = FB.left[i];
    Vec u(static_cast<std::size_t>(m));
    Vec v(static_cast<std::size_t>(n));
    for (int r = 0; r < m; ++r) u[static_cast<std::size_t>(r)] = sqrt2 * w[static_cast<std::size_t>(r)];
    for (int c = 0; c < n; ++c) v[static_cast<std::size_t>(c)] = sqrt2 * w[static_cast<std::size_t>(m + c)];
    F.sigma.push_back(FB.eigenvalues[i]);
    F.left.push_back(std::move(u));
    F.right.push_back(std::move(v));
  }
  while (F.sigma.size() < static_cast<std::size_t>(std::min(m, n))) F.sigma.push_back(0.0);
  return F;
}

}  // namespace dpspectra
