#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpspectra/eigen_jacobi.hpp"
#include "dpspectra/linalg.hpp"

namespace dpspectra {

namespace detail {

// Columns whose singular value exceeds rel 1e-12 of sigma_1; arbitrary
// null-space completions would otherwise dominate the coherence.
inline std::vector<std::size_t> retained_columns(const SpectralFactorization& F,
                                                 bool include_null_columns) {
  std::vector<std::size_t> idx;
  const double top = F.sigma.empty() ? 0.0 : F.sigma[0];
  const double cut = 1e-12 * top;
  for (std::size_t i = 0; i < F.left.size(); ++i) {
    if (include_null_columns || F.sigma[i] > cut) idx.push_back(i);
  }
  return idx;
}

}  // namespace detail

/// mu(A) = max{ m * ||U||_inf^2, n * ||V||_inf^2 } over the singular vector
/// matrices of the given factorization. Columns belonging to zero singular
/// values are excluded by default (flag to include them); the value is tied to
/// the particular factorization since the SVD is not unique.
inline double mu(const SpectralFactorization& F, int m, int n,
                 bool include_null_columns = false) {
  const auto idx = detail::retained_columns(F, include_null_columns);
  if (idx.empty()) return 1.0;  // zero matrix: flat convention
  double best = 0.0;
  for (std::size_t i : idx) {
    const double ui = norm_inf(F.left[i]);
    const double vi = norm_inf(F.right[i]);
    best = std::max(best, static_cast<double>(m) * ui * ui);
    best = std::max(best, static_cast<double>(n) * vi * vi);
  }
  return best;
}

/// mu_0(U) = (n/r) * max_j ||row j of U||^2 for a column-orthonormal n x r
/// block. Orthonormality is validated to 1e-8.
inline double mu0(const std::vector<Vec>& U) {
  const std::size_t r = U.size();
  if (r == 0) throw std::invalid_argument("mu0: empty column block");
  const std::size_t n = U[0].size();
  for (std::size_t i = 0; i < r; ++i) {
    if (U[i].size() != n) throw std::invalid_argument("mu0: ragged column block");
    if (std::abs(norm2(U[i]) - 1.0) > 1e-8)
      throw std::invalid_argument("mu0: columns are not unit vectors");
    for (std::size_t j = i + 1; j < r; ++j) {
      if (std::abs(dot(U[i], U[j])) > 1e-8)
        throw std::invalid_argument("mu0: columns are not orthogonal");
    }
  }
  double best = 0.0;
  for (std::size_t row = 0; row < n; ++row) {
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i) s += U[i][row] * U[i][row];
    best = std::max(best, s);
  }
  return (static_cast<double>(n) / static_cast<double>(r)) * best;
}

/// mu_0 of the rank-r left singular block of a factorization.
inline double mu0(const SpectralFactorization& F) {
  const auto idx = detail::retained_columns(F, false);
  std::vector<Vec> U;
  U.reserve(idx.size());
  for (std::size_t i : idx) U.push_back(F.left[i]);
  if (U.empty()) return 1.0;
  return mu0(U);
}

/// Top-k coherence mu_k(M) = max_{i<=k} max{ m||u_i||_inf^2, n||v_i||_inf^2 }.
inline double mu_k(const SpectralFactorization& F, int k, int m, int n) {
  if (k < 1 || static_cast<std::size_t>(k) > F.left.size())
    throw std::invalid_argument("mu_k: k out of range");
  double best = 0.0;
  for (int i = 0; i < k; ++i) {
    const double ui = norm_inf(F.left[static_cast<std::size_t>(i)]);
    const double vi = norm_inf(F.right[static_cast<std::size_t>(i)]);
    best = std::max(best, static_cast<double>(m) * ui * ui);
    best = std::max(best, static_cast<double>(n) * vi * vi);
  }
  return best;
}

/// The three coherence measures of one factorization, tagged with its
/// provenance id.
struct CoherenceReport {
  double mu = 1.0;
  double mu0 = 1.0;
  std::map<int, double> mu_k;  // per requested k
  std::string svd_provenance;
};

inline CoherenceReport coherence_report(const SpectralFactorization& F, int m, int n,
                                        const std::vector<int>& ks,
                                        bool include_null_columns = false) {
  CoherenceReport rep;
  rep.mu = mu(F, m, n, include_null_columns);
  rep.mu0 = mu0(F);
  for (int k : ks) rep.mu_k[k] = mu_k(F, k, m, n);
  rep.svd_provenance = F.provenance;
  return rep;
}

}  // namespace dpspectra
