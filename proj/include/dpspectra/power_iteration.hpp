#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpspectra/eigen_jacobi.hpp"
#include "dpspectra/errors.hpp"
#include "dpspectra/linalg.hpp"
#include "dpspectra/matrix.hpp"
#include "dpspectra/privacy.hpp"
#include "dpspectra/rng.hpp"

namespace dpspectra {

/// Produces the perturbation g_t for round t (1-based); dim is the vector
/// length. Implementations: zero_noise, gaussian_noise, adversarial_script.
using PerturbationSource = std::function<Vec(int round, int dim, RngStream& rng)>;

inline PerturbationSource zero_noise() {
  return [](int, int dim, RngStream&) { return Vec(static_cast<std::size_t>(dim), 0.0); };
}

inline PerturbationSource gaussian_noise(double sigma_per_coord) {
  return [sigma_per_coord](int, int dim, RngStream& rng) {
    return sample_gaussian_vector(sigma_per_coord, dim, rng);
  };
}

/// Fixed list of perturbations, g_t = script[t-1]; rounds past the end of the
/// script get zero vectors.
inline PerturbationSource adversarial_script(std::vector<Vec> script) {
  return [script = std::move(script)](int round, int dim, RngStream&) {
    const std::size_t i = static_cast<std::size_t>(round - 1);
    if (i < script.size()) return script[i];
    return Vec(static_cast<std::size_t>(dim), 0.0);
  };
}

enum class RunStatus { Converged, RanFullT, Fail };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::RanFullT: return "ran_full_t";
    case RunStatus::Fail: return "fail";
  }
  return "unknown";
}

struct RoundRecord {
  double gate_inf_sq = 0.0;   // ||x_{t-1}||_inf^2 seen by the gate
  bool gate_passed = true;
  double x_prime_norm = 0.0;  // ||x'_t||
  Vec x;                      // x_t after normalization; empty if the round aborted
};

/// Audit trail of one iteration run. Every recorded normalized iterate has
/// unit norm within 1e-12.
struct IterationTrace {
  Vec x0;
  std::vector<RoundRecord> rounds;
  RunStatus status = RunStatus::RanFullT;
  int terminal_round = 0;  // round of Converged/Fail; T when the loop ran out
};

struct PowerResult {
  std::optional<Vec> output;  // empty only on Fail
  IterationTrace trace;
};

/// Power iteration with a pluggable perturbation source. Each round computes
/// x'_t = A x_{t-1} + g_t; if ||x'_t|| >= (1-beta) * sigma_threshold the run
/// stops and returns x_{t-1}, otherwise the iterate is normalized and the loop
/// continues. sigma_threshold is an explicit parameter (the natural choice is
/// sigma_1 or an estimate of it); pass +infinity to disable early termination.
inline PowerResult robust_power_iteration(const SymmetricMatrix& A, int T, double beta,
                                          double sigma_threshold, const PerturbationSource& src,
                                          const Vec& x0, RngStream& rng) {
  const int n = A.size();
  if (T < 1) throw std::invalid_argument("robust_power_iteration: T must be >= 1");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("robust_power_iteration: beta must lie in (0,1)");
  if (!(sigma_threshold > 0.0))
    throw std::invalid_argument("robust_power_iteration: sigma_threshold must be > 0");
  if (x0.size() != static_cast<std::size_t>(n) || std::abs(norm2(x0) - 1.0) > 1e-9)
    throw std::invalid_argument("robust_power_iteration: x0 must be a unit vector of length n");

  PowerResult res;
  res.trace.x0 = x0;
  Vec x = x0;
  for (int t = 1; t <= T; ++t) {
    Vec g = src(t, n, rng);
    Vec xp = A.matvec(x);
    add_in_place(xp, g);
    const double npr = norm2(xp);

    RoundRecord rec;
    const double xinf = norm_inf(x);
    rec.gate_inf_sq = xinf * xinf;
    rec.x_prime_norm = npr;

    if (npr >= (1.0 - beta) * sigma_threshold) {
      res.trace.rounds.push_back(std::move(rec));
      res.trace.status = RunStatus::Converged;
      res.trace.terminal_round = t;
      res.output = x;
      return res;
    }
    if (npr < 1e-300) throw NumericError("robust_power_iteration: degenerate iterate at round " + std::to_string(t));
    for (double& v : xp) v /= npr;
    x = xp;
    rec.x = x;
    res.trace.rounds.push_back(std::move(rec));
  }
  res.trace.status = RunStatus::RanFullT;
  res.trace.terminal_round = T;
  res.output = std::move(x);
  return res;
}

/// Parameters of one PPI run. beta and gamma are carried for reporting only;
/// PPI itself has no early termination.
struct PpiConfig {
  int T = 1;
  double epsilon = 1.0;
  double delta = 0.1;
  double C = 1.0;  // coherence upper bound driving the gate and the noise
  double beta = 0.0;
  double gamma = 0.0;
  bool zero_noise = false;  // unsafe test mode: forces sigma to 0

  void validate() const {
    if (T < 1) throw std::invalid_argument("PpiConfig: T must be >= 1");
    if (!(C >= 1.0)) throw std::invalid_argument("PpiConfig: C must be >= 1");
    PrivacyBudget{epsilon, delta}.validate();
  }
};

/// Per-run noise level sigma = 2 eps^-1 sqrt(4 T ln(1/delta)).
inline double ppi_noise_sigma(double epsilon, double delta, int T) {
  return 2.0 / epsilon * std::sqrt(4.0 * T * std::log(1.0 / delta));
}

/// Private power iteration. x_0 ~ N(0, 1/n)^n is used as drawn (not
/// normalized); each round first checks the coherence gate
/// ||x_{t-1}||_inf^2 > C/n (failing the run if it fires), then adds
/// g_t ~ N(0, C sigma^2 / n)^n to the matrix-vector product and normalizes.
/// Runs the full T rounds; Fail is a value, not an error.
/// x0_override replaces the initial draw; search_C uses it to give every
/// candidate the same start (x_0 is data-independent), and tests use it to
/// replay runs against the classical iteration.
inline PowerResult ppi(const SymmetricMatrix& A, const PpiConfig& cfg, RngStream& rng,
                       NoiseLedger* ledger = nullptr, const Vec* x0_override = nullptr) {
  cfg.validate();
  const int n = A.size();
  const double sigma = cfg.zero_noise ? 0.0 : ppi_noise_sigma(cfg.epsilon, cfg.delta, cfg.T);
  const double per_coord = sigma * std::sqrt(cfg.C / n);
  const double gate = cfg.C / n;

  PowerResult res;
  Vec x = x0_override ? *x0_override : sample_gaussian_vector(std::sqrt(1.0 / n), n, rng);
  if (x.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("ppi: x0 override has wrong dimension");
  res.trace.x0 = x;
  if (ledger) ledger->record({"gaussian-init", 0.0, 0.0, 0.0, std::sqrt(1.0 / n)});

  // Implied per-round budget, surfaced for the ledger: split delta/T per round
  // and invert the Gaussian mechanism at the noise level the figure prescribes.
  const double delta_round = cfg.delta / cfg.T;
  const double eps_round =
      cfg.zero_noise ? 0.0 : 4.0 * std::sqrt(std::log(2.0 / delta_round)) / sigma;

  for (int t = 1; t <= cfg.T; ++t) {
    RoundRecord rec;
    const double xinf = norm_inf(x);
    rec.gate_inf_sq = xinf * xinf;
    if (rec.gate_inf_sq > gate) {
      rec.gate_passed = false;
      res.trace.rounds.push_back(std::move(rec));
      res.trace.status = RunStatus::Fail;
      res.trace.terminal_round = t;
      return res;
    }

    Vec xp = A.matvec(x);
    if (!cfg.zero_noise) {
      Vec g = sample_gaussian_vector(per_coord, n, rng);
      add_in_place(xp, g);
    }
    if (ledger) {
      ledger->record({"gaussian-ppi-round", eps_round, cfg.zero_noise ? 0.0 : delta_round,
                      std::sqrt(cfg.C / n), per_coord});
    }
    const double npr = norm2(xp);
    rec.x_prime_norm = npr;
    if (npr < 1e-300) throw NumericError("ppi: degenerate iterate at round " + std::to_string(t));
    for (double& v : xp) v /= npr;
    x = xp;
    rec.x = x;
    res.trace.rounds.push_back(std::move(rec));
  }
  res.trace.status = RunStatus::RanFullT;
  res.trace.terminal_round = cfg.T;
  res.output = std::move(x);
  return res;
}

/// T = ceil(4 ln sigma1_upper), clamped to at least 1. Inputs below 1 clamp to
/// 1 (the caller is expected to warn). A 1e-9 slack inside the ceiling absorbs
/// log/exp round-trip error.
inline int choose_T(double sigma1_upper) {
  if (!(sigma1_upper >= 1.0)) return 1;
  const double t = 4.0 * std::log(sigma1_upper);
  const int T = static_cast<int>(std::ceil(t - 1e-9));
  return T < 1 ? 1 : T;
}

struct SearchCandidate {
  double C = 0.0;
  PowerResult run;
  std::optional<double> noisy_score;  // absent when the run failed
};

struct SearchCResult {
  std::optional<Vec> best;
  double chosen_C = 0.0;  // 0 when every candidate failed
  std::vector<SearchCandidate> candidates;
};

/// Doubling search over the coherence bound: tries C = 2^i for
/// i in {0, ..., floor(log2 n)}, splitting (eps, delta) evenly across the
/// candidate runs plus one extra slice per run for a private quality score
/// ||A x|| + Lap(2/eps_slice) (sensitivity of ||A x|| under one entry change is
/// ||x||_inf <= 1; the loose bound 1 is used). Returns the candidate with the
/// highest noisy score among non-Fail runs; ties go to the smallest C. All
/// candidates share the same (data-independent) x_0, so a zero-noise replay
/// picks the smallest non-failing C. Candidate runs draw from independent
/// streams derived from `seed`, so they could execute concurrently; results
/// merge by candidate index.
inline SearchCResult search_C(const SymmetricMatrix& A, int T, const PrivacyBudget& budget,
                              std::uint64_t seed, NoiseLedger* ledger = nullptr,
                              bool zero_noise = false) {
  budget.validate();
  const int n = A.size();
  int num_candidates = 1;
  while ((1 << num_candidates) <= n) ++num_candidates;  // floor(log2 n) + 1
  const int slices = 2 * num_candidates;
  const double eps_slice = budget.epsilon / slices;
  const double delta_slice = budget.delta / slices;

  RngStream x0_rng(seed, static_cast<std::uint64_t>(2 * num_candidates));
  const Vec x0 = sample_gaussian_vector(std::sqrt(1.0 / n), n, x0_rng);

  SearchCResult result;
  double best_score = 0.0;
  for (int i = 0; i < num_candidates; ++i) {
    SearchCandidate cand;
    cand.C = static_cast<double>(1 << i);
    PpiConfig cfg;
    cfg.T = T;
    cfg.epsilon = eps_slice;
    cfg.delta = delta_slice;
    cfg.C = cand.C;
    cfg.zero_noise = zero_noise;
    RngStream run_rng(seed, static_cast<std::uint64_t>(2 * i));
    cand.run = ppi(A, cfg, run_rng, ledger, &x0);
    if (cand.run.output.has_value()) {
      RngStream score_rng(seed, static_cast<std::uint64_t>(2 * i + 1));
      const double quality = norm2(A.matvec(*cand.run.output));
      const double noise = zero_noise ? 0.0 : sample_laplace(2.0 / eps_slice, score_rng);
      cand.noisy_score = quality + noise;
      if (ledger) {
        ledger->record({"laplace-score", zero_noise ? 0.0 : eps_slice, 0.0, 1.0,
                        zero_noise ? 0.0 : 2.0 / eps_slice});
      }
      if (!result.best.has_value() || *cand.noisy_score > best_score) {
        best_score = *cand.noisy_score;
        result.best = cand.run.output;
        result.chosen_C = cand.C;
      }
    }
    result.candidates.push_back(std::move(cand));
  }
  return result;
}

/// Signs of the correlations of the oracle eigenvectors with the iterate x_t
/// after t rounds of PPI; t = 0 reads the signs off x_0 directly. A Fail run
/// yields an empty optional.
inline std::optional<std::vector<int>> sign_pattern(const SymmetricMatrix& A,
                                                    const SpectralFactorization& F, int t,
                                                    const PpiConfig& base_cfg, RngStream& rng) {
  if (t < 0) throw std::invalid_argument("sign_pattern: t must be >= 0");
  const int n = A.size();
  Vec x;
  if (t == 0) {
    x = sample_gaussian_vector(std::sqrt(1.0 / n), n, rng);
  } else {
    PpiConfig cfg = base_cfg;
    cfg.T = t;
    PowerResult res = ppi(A, cfg, rng);
    if (!res.output.has_value()) return std::nullopt;
    x = *res.output;
  }
  std::vector<int> signs;
  signs.reserve(F.left.size());
  for (const Vec& u : F.left) signs.push_back(dot(u, x) >= 0.0 ? 1 : -1);
  return signs;
}

}  // namespace dpspectra
