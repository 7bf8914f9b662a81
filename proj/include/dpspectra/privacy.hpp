#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpspectra/matrix.hpp"
#include "dpspectra/rng.hpp"

namespace dpspectra {

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("PrivacyBudget: epsilon must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("PrivacyBudget: delta must lie in (0,1)");
  }
};

struct LedgerEntry {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  double sensitivity = 0.0;
  double scale = 0.0;  // noise std (Gaussian) or Laplace scale actually used
};

/// Append-only audit of every mechanism invocation in a run.
class NoiseLedger {
 public:
  void record(LedgerEntry e) { entries_.push_back(std::move(e)); }
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  /// Basic composition over heterogeneous entries: componentwise sums.
  PrivacyBudget total_basic() const {
    PrivacyBudget t;
    for (const auto& e : entries_) {
      t.epsilon += e.epsilon;
      t.delta += e.delta;
    }
    return t;
  }

  /// Deterministic merge: other's entries appended in order.
  void merge(const NoiseLedger& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  }

 private:
  std::vector<LedgerEntry> entries_;
};

/// Gaussian-mechanism noise level sigma = 4 c eps^-1 sqrt(ln(2/delta)) for
/// l2-sensitivity c. Natural log. The formula is evaluated for any delta in
/// (0,1); the mechanism's privacy statement itself assumes delta < 1/2, and
/// every caller inside the library stays well below that.
inline double gaussian_sigma(double c, double epsilon, double delta) {
  if (!(c > 0.0)) throw std::invalid_argument("gaussian_sigma: sensitivity must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("gaussian_sigma: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("gaussian_sigma: delta must lie in (0, 1)");
  return 4.0 * c / epsilon * std::sqrt(std::log(2.0 / delta));
}

/// d i.i.d. draws from N(0, sigma^2). sigma = 0 is the zero-noise limit and
/// draws nothing from the stream.
inline Vec sample_gaussian_vector(double sigma, int d, RngStream& rng) {
  if (sigma < 0.0) throw std::invalid_argument("sample_gaussian_vector: sigma must be >= 0");
  if (d < 1) throw std::invalid_argument("sample_gaussian_vector: d must be >= 1");
  Vec g(static_cast<std::size_t>(d), 0.0);
  if (sigma == 0.0) return g;
  for (double& v : g) v = sigma * rng.next_gaussian();
  return g;
}

inline double sample_laplace(double scale, RngStream& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("sample_laplace: scale must be > 0");
  return rng.next_laplace(scale);
}

/// k-fold basic composition: (k*eps, k*delta).
inline PrivacyBudget compose_basic(int k, double epsilon, double delta) {
  if (k < 1) throw std::invalid_argument("compose_basic: k must be >= 1");
  return {k * epsilon, k * delta};
}

/// k-fold advanced composition:
/// (sqrt(2k ln(1/delta')) * eps + 2k eps^2, k*delta + delta').
inline PrivacyBudget compose_advanced(int k, double epsilon, double delta, double delta_prime) {
  if (k < 1) throw std::invalid_argument("compose_advanced: k must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("compose_advanced: epsilon must lie in (0,1)");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("compose_advanced: delta must lie in [0,1)");
  if (!(delta_prime > 0.0)) throw std::invalid_argument("compose_advanced: delta' must be > 0");
  const double eps_total =
      std::sqrt(2.0 * k * std::log(1.0 / delta_prime)) * epsilon + 2.0 * k * epsilon * epsilon;
  return {eps_total, k * delta + delta_prime};
}

/// Private upper bound on sigma_1(A) through the 1-sensitive entrywise l1
/// norm: ||A||_1 + Lap(1/eps) + (10/eps) ln n. The explicit upward bias makes
/// the result an upper bound on ||A||_1 (hence on sigma_1) except with
/// probability n^-10.
inline double private_sigma1_upper(const SymmetricMatrix& A, double epsilon, RngStream& rng,
                                   NoiseLedger* ledger = nullptr, bool zero_noise = false) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("private_sigma1_upper: epsilon must be > 0");
  const double l1 = A.entry_l1_norm();
  const double noise = zero_noise ? 0.0 : sample_laplace(1.0 / epsilon, rng);
  const double bias = 10.0 / epsilon * std::log(static_cast<double>(A.size()));
  if (ledger) {
    ledger->record({"laplace-l1-bound", zero_noise ? 0.0 : epsilon, 0.0, 1.0,
                    zero_noise ? 0.0 : 1.0 / epsilon});
  }
  return l1 + noise + bias;
}

}  // namespace dpspectra
