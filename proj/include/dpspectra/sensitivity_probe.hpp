#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dpspectra/coherence.hpp"
#include "dpspectra/eigen_jacobi.hpp"
#include "dpspectra/errors.hpp"
#include "dpspectra/linalg.hpp"
#include "dpspectra/matrix.hpp"
#include "dpspectra/privacy.hpp"
#include "dpspectra/rng.hpp"

namespace dpspectra {

namespace detail {

// Dense general n x n helpers for the matrix-power probe. M + e_s e_t^T is
// not symmetric, so everything here is unstructured.
struct Dense {
  int n = 0;
  std::vector<double> a;

  static Dense from_symmetric(const SymmetricMatrix& M) {
    return {M.size(), M.data()};
  }
  static Dense identity(int n) {
    Dense I{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (int i = 0; i < n; ++i) I.a[static_cast<std::size_t>(i) * n + i] = 1.0;
    return I;
  }
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

inline Dense multiply(const Dense& A, const Dense& B) {
  const int n = A.n;
  Dense C{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double aik = A.at(i, k);
      if (aik == 0.0) continue;
      const double* brow = &B.a[static_cast<std::size_t>(k) * n];
      double* crow = &C.a[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return C;
}

inline Dense power(const Dense& M, int q) {
  Dense result = Dense::identity(M.n);
  Dense base = M;
  int e = q;
  while (e > 0) {
    if (e & 1) result = multiply(result, base);
    e >>= 1;
    if (e > 0) base = multiply(base, base);
  }
  return result;
}

inline Vec apply(const Dense& M, const Vec& x) {
  Vec y(static_cast<std::size_t>(M.n), 0.0);
  for (int i = 0; i < M.n; ++i) {
    double s = 0.0;
    const double* row = &M.a[static_cast<std::size_t>(i) * M.n];
    for (int j = 0; j < M.n; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

inline double frobenius(const Dense& M) {
  double s = 0.0;
  for (double v : M.a) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

struct ProbeEstimate {
  double mean = 0.0;        // Monte-Carlo estimate of E || ((M+E)^q - M^q) g ||
  double std_error = 0.0;
  int trials = 0;
};

/// Forms D = (M + e_s e_t^T)^q - M^q exactly (repeated squaring on dense
/// matrices, q capped at 64) and averages ||D g|| over i.i.d. g ~ N(0,1)^n.
/// Deterministic given the seed: sample i draws from stream i, reduction order
/// is fixed.
inline ProbeEstimate power_gap_estimate(const SymmetricMatrix& M, int s, int t, int q, int trials,
                                        std::uint64_t seed) {
  const int n = M.size();
  if (q < 1 || q > 64) throw std::invalid_argument("power_gap_estimate: q must lie in [1, 64]");
  if (trials < 1) throw std::invalid_argument("power_gap_estimate: trials must be >= 1");
  if (s < 0 || s >= n || t < 0 || t >= n)
    throw std::invalid_argument("power_gap_estimate: entry indices out of range");

  // sigma_1^q overflow guard via the Frobenius upper bound on sigma_1.
  const double sigma_upper = M.frobenius_norm() + 1.0;
  if (static_cast<double>(q) * std::log(std::max(sigma_upper, 2.0)) > std::log(1e300))
    throw NumericError("power_gap_estimate: sigma_1^q overflows double range; use a smaller q");

  detail::Dense base = detail::Dense::from_symmetric(M);
  detail::Dense perturbed = base;
  perturbed.at(s, t) += 1.0;
  detail::Dense Pq = detail::power(perturbed, q);
  detail::Dense Mq = detail::power(base, q);
  detail::Dense D{n, std::vector<double>(Pq.a.size())};
  for (std::size_t i = 0; i < Pq.a.size(); ++i) D.a[i] = Pq.a[i] - Mq.a[i];

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const Vec g = sample_gaussian_vector(1.0, n, rng);
    const double norm = norm2(detail::apply(D, g));
    sum += norm;
    sum_sq += norm * norm;
  }
  ProbeEstimate est;
  est.trials = trials;
  est.mean = sum / trials;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1)) : 0.0;
  est.std_error = std::sqrt(var / trials);
  return est;
}

struct PowerBound {
  double bound = 0.0;     // 9 min{1, sqrt(k mu_k / n)} q sigma_1^{q-1}
  double sigma1 = 0.0;
  double mu_k_value = 0.0;
  bool sigma1_large_enough = false;   // sigma_1 >= 4q
  bool tail_small_enough = false;     // sigma_{k+1} <= sigma_1 / 2
  bool q_large_enough = false;        // q >= ln n + 1
  bool preconditions_met = false;
};

/// Evaluates the perturbation-theorem bound with oracle sigma_1 and mu_k. The
/// value is returned regardless of the preconditions; the flags report them.
inline PowerBound mu_k_power_bound(const SymmetricMatrix& M, int k, int q) {
  const int n = M.size();
  if (q < 1) throw std::invalid_argument("mu_k_power_bound: q must be >= 1");
  const SpectralFactorization F = exact_factorization(M);
  PowerBound b;
  b.sigma1 = F.sigma[0];
  b.mu_k_value = mu_k(F, k, n, n);
  const double sigma_tail = k < n ? F.sigma[static_cast<std::size_t>(k)] : 0.0;
  b.sigma1_large_enough = b.sigma1 >= 4.0 * q;
  b.tail_small_enough = sigma_tail <= b.sigma1 / 2.0;
  b.q_large_enough = q >= std::log(static_cast<double>(n)) + 1.0;
  b.preconditions_met = b.sigma1_large_enough && b.tail_small_enough && b.q_large_enough;
  const double shrink = std::min(1.0, std::sqrt(static_cast<double>(k) * b.mu_k_value / n));
  b.bound = 9.0 * shrink * q * std::pow(b.sigma1, q - 1);
  return b;
}

}  // namespace dpspectra
