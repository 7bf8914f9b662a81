#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "dpspectra/coherence.hpp"
#include "dpspectra/eigen_jacobi.hpp"
#include "dpspectra/linalg.hpp"
#include "dpspectra/matrix.hpp"
#include "dpspectra/power_iteration.hpp"
#include "dpspectra/privacy.hpp"

namespace dpspectra {

/// Per-stage budget of the rank-k loop: eps' = eps / sqrt(4 k ln(1/delta)).
inline double rank_k_epsilon_prime(double epsilon, int k, double delta) {
  if (k < 1) throw std::invalid_argument("rank_k_epsilon_prime: k must be >= 1");
  return epsilon / std::sqrt(4.0 * k * std::log(1.0 / delta));
}

inline double rank_k_delta_prime(double delta, int k) {
  if (k < 1) throw std::invalid_argument("rank_k_delta_prime: k must be >= 1");
  return delta / k;
}

struct RankKResult {
  std::vector<Vec> vectors;         // v_1 .. v_k, unit
  std::vector<double> sigma_hat;    // noisy values
  SymmetricMatrix approximation;    // B_k = sum sigma_hat_i v_i v_i^T
  SymmetricMatrix residual;         // A_k = A - B_k
  std::vector<IterationTrace> traces;

  RankKResult(int n) : approximation(n), residual(n) {}
};

struct RankKFail {
  int stage = 0;  // 1-based index of the PPI call that failed
  std::vector<IterationTrace> traces;
};

/// Rank-k approximation by repeated PPI and deflation:
///   v_i = PPI(A_{i-1}, T, eps', delta', C)
///   sigma_hat_i = ||A_{i-1} v_i|| + Lap(1/eps')
///   A_i = A_{i-1} - sigma_hat_i v_i v_i^T,  B_i = B_{i-1} + sigma_hat_i v_i v_i^T
/// Returns both the rank-k matrix B_k and the residual A_k. k = 0 gives the
/// empty result (B_0 = 0). Stage i draws from streams (2i, 2i+1) of `seed`.
inline std::variant<RankKResult, RankKFail> rank_k_approx(const SymmetricMatrix& A, int k, int T,
                                                          const PrivacyBudget& budget, double C,
                                                          std::uint64_t seed,
                                                          NoiseLedger* ledger = nullptr,
                                                          bool zero_noise = false) {
  const int n = A.size();
  if (k < 0 || k > n) throw std::invalid_argument("rank_k_approx: k must lie in [0, n]");
  budget.validate();

  RankKResult result(n);
  result.residual = A;
  if (k == 0) return result;

  const double eps_prime = rank_k_epsilon_prime(budget.epsilon, k, budget.delta);
  const double delta_prime = rank_k_delta_prime(budget.delta, k);

  for (int i = 1; i <= k; ++i) {
    PpiConfig cfg;
    cfg.T = T;
    cfg.epsilon = eps_prime;
    cfg.delta = delta_prime;
    cfg.C = C;
    cfg.zero_noise = zero_noise;
    RngStream run_rng(seed, static_cast<std::uint64_t>(2 * (i - 1)));
    PowerResult run = ppi(result.residual, cfg, run_rng, ledger);
    result.traces.push_back(run.trace);
    if (!run.output.has_value()) {
      return RankKFail{i, std::move(result.traces)};
    }
    const Vec v = *run.output;
    RngStream lap_rng(seed, static_cast<std::uint64_t>(2 * (i - 1) + 1));
    const double noise = zero_noise ? 0.0 : sample_laplace(1.0 / eps_prime, lap_rng);
    const double sigma_hat = norm2(result.residual.matvec(v)) + noise;
    if (ledger) {
      ledger->record({"laplace-sigma-hat", zero_noise ? 0.0 : eps_prime, 0.0, 1.0,
                      zero_noise ? 0.0 : 1.0 / eps_prime});
    }
    result.vectors.push_back(v);
    result.sigma_hat.push_back(sigma_hat);
    result.residual = result.residual.subtract_rank1(sigma_hat, v);
    result.approximation = result.approximation.subtract_rank1(-sigma_hat, v);
  }
  return result;
}

/// Signed eigenvalues in nonincreasing order (the interlacing statements are
/// about the signed spectrum, not the singular values).
inline std::vector<double> eigenvalues_descending(const SymmetricMatrix& A) {
  SpectralFactorization F = exact_factorization(A);
  std::vector<double> lam = F.eigenvalues;
  std::sort(lam.begin(), lam.end(), std::greater<double>());
  return lam;
}

struct InterlacingCheck {
  bool pass = false;
  double worst_margin = 0.0;           // most negative slack over all indices
  std::vector<double> before;          // eigenvalues of A
  std::vector<double> after;           // eigenvalues of A - t x x^T
};

/// Verifies the deflation sandwich lambda_k <= lambda'_{k-1} <=
/// min(lambda_{k-1}, lambda_k + alpha*lambda_1) for all k >= 2, for
/// A' = A - t x x^T. Preconditions (||Ax|| >= (1 - alpha/C0) lambda_1 and
/// t within (1 +/- alpha/C0) ||Ax||) are validated and violations reported as
/// errors, not as sandwich failures. C0 is the check's constant (default 10).
inline InterlacingCheck deflation_interlacing_check(const SymmetricMatrix& A, const Vec& x,
                                                    double t, double alpha, double C0 = 10.0) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("deflation_interlacing_check: alpha must lie in (0,1)");
  if (std::abs(norm2(x) - 1.0) > 1e-9)
    throw std::invalid_argument("deflation_interlacing_check: x must be a unit vector");

  InterlacingCheck chk;
  chk.before = eigenvalues_descending(A);
  const double lam1 = chk.before[0];
  if (!(lam1 > 0.0))
    throw std::invalid_argument("deflation_interlacing_check: lambda_1 <= 0, preconditions unverifiable");

  const double ax = norm2(A.matvec(x));
  if (!(ax >= (1.0 - alpha / C0) * lam1))
    throw std::invalid_argument("deflation_interlacing_check: ||Ax|| below (1 - alpha/C0) lambda_1");
  if (!(t >= (1.0 - alpha / C0) * ax && t <= (1.0 + alpha / C0) * ax))
    throw std::invalid_argument("deflation_interlacing_check: t outside (1 +/- alpha/C0) ||Ax||");

  chk.after = eigenvalues_descending(A.subtract_rank1(t, x));
  const int n = A.size();
  const double slack = 1e-9 * std::max(1.0, std::abs(lam1));
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= n; ++k) {
    const double lk = chk.before[static_cast<std::size_t>(k - 1)];
    const double lkm1 = chk.before[static_cast<std::size_t>(k - 2)];
    const double lpk = chk.after[static_cast<std::size_t>(k - 2)];  // lambda'_{k-1}
    const double upper = std::min(lkm1, lk + alpha * lam1);
    worst = std::min(worst, lpk - lk);
    worst = std::min(worst, upper - lpk);
  }
  chk.worst_margin = worst;
  chk.pass = worst >= -slack;
  return chk;
}

struct CoherenceGrowth {
  std::vector<double> observed;  // mu(A'_i) for i = 0..k
  std::vector<double> bound;     // 2 r mu(A) + 32 i ln n
};

/// Observed coherence of each deflation residual against the bound
/// 2 r mu(A) + 32 i ln n (constant 32 is a test constant standing in for the
/// O(i log n) term). The residual sequence is replayed from the history.
inline CoherenceGrowth coherence_growth_check(const SymmetricMatrix& A, const RankKResult& history) {
  CoherenceGrowth g;
  const int n = A.size();
  SpectralFactorization F0 = exact_factorization(A);
  const int r = F0.rank(1e-9);
  const double mu_a = mu(F0, n, n);
  SymmetricMatrix Ai = A;
  for (std::size_t i = 0; i <= history.vectors.size(); ++i) {
    if (i > 0) {
      Ai = Ai.subtract_rank1(history.sigma_hat[i - 1], history.vectors[i - 1]);
    }
    const double observed = (i == 0) ? mu_a : mu(exact_factorization(Ai), n, n);
    g.observed.push_back(observed);
    g.bound.push_back(2.0 * r * mu_a + 32.0 * static_cast<double>(i) * std::log(static_cast<double>(n)));
  }
  return g;
}

/// (||Ax||, x^T A x) for a unit vector x. Always |x^T A x| <= ||Ax||; the
/// partial converse x^T A x >= (1-5a) lambda_1 needs ||Ax|| >= (1-a) lambda_1,
/// a <= 1/4, and no large-magnitude negative eigenvalues (test harness
/// responsibility).
inline std::pair<double, double> rayleigh_lower(const SymmetricMatrix& A, const Vec& x) {
  if (std::abs(norm2(x) - 1.0) > 1e-9)
    throw std::invalid_argument("rayleigh_lower: x must be a unit vector");
  const Vec ax = A.matvec(x);
  return {norm2(ax), dot(x, ax)};
}

}  // namespace dpspectra
