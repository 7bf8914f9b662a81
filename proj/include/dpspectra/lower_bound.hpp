#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpspectra/coherence.hpp"
#include "dpspectra/eigen_jacobi.hpp"
#include "dpspectra/linalg.hpp"
#include "dpspectra/matrix.hpp"
#include "dpspectra/power_iteration.hpp"
#include "dpspectra/rng.hpp"

namespace dpspectra {

/// Bit-valued database D in {0,1}^n with exactly n/2 ones.
struct Database {
  int n = 0;
  std::vector<int> bits;

  int ones() const { return std::accumulate(bits.begin(), bits.end(), 0); }
};

/// Uniform draw over the n-choose-n/2 supports (Fisher-Yates on the index set
/// with unbiased index draws).
inline Database gen_database(int n, RngStream& rng) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("gen_database: n must be even and >= 2");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  Database D;
  D.n = n;
  D.bits.assign(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < n / 2; ++k) D.bits[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = 1;
  return D;
}

/// The coherence-C lower-bound matrix of a database: the first s = n/C rows
/// are copies of D, the rest are zero. By construction sigma_1 = n/sqrt(2C)
/// and mu = C.
struct LowerBoundInstance {
  RectMatrix M;
  double C = 0.0;
  int s = 0;      // block height n/C
  Database D;
  double sigma1 = 0.0;  // n / sqrt(2C)
  Vec d_bar;            // D normalized to a unit vector
};

inline LowerBoundInstance gen_instance(int n, double C, const Database& D,
                                       bool oracle_check = true) {
  if (D.n != n) throw std::invalid_argument("gen_instance: database dimension mismatch");
  if (n % 2 != 0) throw std::invalid_argument("gen_instance: n must be even");
  if (!(C >= 2.0 && C <= n)) throw std::invalid_argument("gen_instance: C must lie in [2, n]");
  const double s_real = static_cast<double>(n) / C;
  const int s = static_cast<int>(std::llround(s_real));
  if (s < 1 || std::abs(s_real - s) > 1e-9)
    throw std::invalid_argument("gen_instance: n/C must be a positive integer");

  LowerBoundInstance inst{RectMatrix(n, n), C, s, D, 0.0, {}};
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < n; ++j)
      inst.M.set(i, j, static_cast<double>(D.bits[static_cast<std::size_t>(j)]));
  inst.sigma1 = n / std::sqrt(2.0 * C);
  inst.d_bar.assign(static_cast<std::size_t>(n), 0.0);
  const double scale = std::sqrt(2.0 / n);
  for (int j = 0; j < n; ++j)
    inst.d_bar[static_cast<std::size_t>(j)] = scale * D.bits[static_cast<std::size_t>(j)];

  if (oracle_check) {
    const SpectralFactorization F = rect_factorization(inst.M);
    const double sig = F.sigma.empty() ? 0.0 : F.sigma[0];
    if (std::abs(sig - inst.sigma1) > 1e-8 * inst.sigma1)
      throw NumericError("gen_instance: oracle sigma_1 deviates from n/sqrt(2C)");
    const double mu_val = mu(F, n, n);
    if (std::abs(mu_val - C) > 1e-8 * C)
      throw NumericError("gen_instance: oracle mu deviates from C");
  }
  return inst;
}

/// ||M_D v||_2 for a unit vector v, cross-checked against the factored form
/// sigma_1 * |<D_bar, v>| to 1e-10 relative.
inline double quality(const LowerBoundInstance& inst, const Vec& v) {
  if (std::abs(norm2(v) - 1.0) > 1e-9)
    throw std::invalid_argument("quality: v must be a unit vector");
  const double q = norm2(inst.M.matvec(v));
  const double factored = inst.sigma1 * std::abs(dot(inst.d_bar, v));
  if (std::abs(q - factored) > 1e-10 * std::max(1.0, inst.sigma1))
    throw NumericError("quality: factorization identity violated");
  return q;
}

/// The reconstruction rounding rule: D*_i = 1 exactly when sqrt(n/2) v_i >= 1/2.
inline std::vector<int> reconstruct(const Vec& v) {
  const double scale = std::sqrt(static_cast<double>(v.size()) / 2.0);
  std::vector<int> out(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (scale * v[i] >= 0.5) out[i] = 1;
  return out;
}

inline int hamming_distance(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
  return d;
}

struct AttackTrial {
  bool ppi_failed = false;
  bool degenerate = false;       // extracted half had negligible norm
  double quality = 0.0;          // ||M v||
  double correlation = 0.0;      // <D_bar, v> for the reconstruction-side sign
  int hamming = 0;               // best over both signs of v
  bool above_999 = false;        // quality >= (999/1000) sigma_1
  bool correlation_consistent = true;  // above_999 implies |<D_bar,v>| >= 999/1000
};

struct AttackReport {
  int n = 0;
  double C = 0.0;
  double sigma1 = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  int trials = 0;
  std::vector<AttackTrial> per_trial;
  double median_quality = 0.0;   // over non-failed trials
  double median_hamming = 0.0;
  int failed_trials = 0;
};

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

/// Empirical illustration of the accuracy/reconstruction tension: per trial,
/// draws D, builds M_D, runs PPI on the symmetric dilation at the halved
/// budget (eps/2, delta/2), extracts the right-singular half, reconstructs
/// with the rounding rule (both signs; the attacker keeps the better one), and
/// reports achieved ||Mv|| against sigma_1 alongside the Hamming recovery.
/// This is a demonstration, not a privacy-violation assertion.
inline AttackReport attack_demo(int n, double C, double epsilon, double delta, int trials,
                                std::uint64_t seed, bool zero_noise = false) {
  if (trials < 1) throw std::invalid_argument("attack_demo: trials must be >= 1");
  AttackReport rep;
  rep.n = n;
  rep.C = C;
  rep.epsilon = epsilon;
  rep.delta = delta;
  rep.trials = trials;
  rep.sigma1 = n / std::sqrt(2.0 * C);

  std::vector<double> qualities;
  std::vector<double> hammings;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng(seed, static_cast<std::uint64_t>(trial));
    const Database D = gen_database(n, rng);
    const LowerBoundInstance inst = gen_instance(n, C, D, /*oracle_check=*/trial == 0);
    const SymmetricMatrix B = dilate(inst.M);

    PpiConfig cfg;
    cfg.T = choose_T(inst.sigma1);
    cfg.epsilon = epsilon / 2.0;
    cfg.delta = delta / 2.0;
    cfg.C = std::max(1.0, 16.0 * C * std::log(static_cast<double>(2 * n)));
    cfg.zero_noise = zero_noise;

    AttackTrial t;
    PowerResult run = ppi(B, cfg, rng);
    if (!run.output.has_value()) {
      t.ppi_failed = true;
      ++rep.failed_trials;
      rep.per_trial.push_back(t);
      continue;
    }
    Vec half(run.output->begin() + n, run.output->end());
    const double hn = norm2(half);
    if (hn < 1e-9) {
      t.degenerate = true;
      t.hamming = n / 2;
      rep.per_trial.push_back(t);
      hammings.push_back(t.hamming);
      qualities.push_back(0.0);
      continue;
    }
    for (double& v : half) v /= hn;

    t.quality = quality(inst, half);
    const std::vector<int> rec_pos = reconstruct(half);
    const std::vector<int> rec_neg = reconstruct(scaled(half, -1.0));
    const int h_pos = hamming_distance(rec_pos, D.bits);
    const int h_neg = hamming_distance(rec_neg, D.bits);
    t.hamming = std::min(h_pos, h_neg);
    t.correlation = dot(inst.d_bar, h_pos <= h_neg ? half : scaled(half, -1.0));
    t.above_999 = t.quality >= (999.0 / 1000.0) * inst.sigma1;
    if (t.above_999) {
      t.correlation_consistent = std::abs(dot(inst.d_bar, half)) >= 999.0 / 1000.0 - 1e-12;
    }
    rep.per_trial.push_back(t);
    qualities.push_back(t.quality);
    hammings.push_back(static_cast<double>(t.hamming));
  }
  rep.median_quality = detail::median_of(qualities);
  rep.median_hamming = detail::median_of(hammings);
  return rep;
}

}  // namespace dpspectra
