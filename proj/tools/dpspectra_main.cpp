// dpspectra: differentially private spectral analysis toolbox.
//
// Subcommands: coherence, ppi, rankk, lowerbound-demo, sensitivity-probe,
// sweep. Matrix Market or CSV in, JSON report out. Exit codes: 0 success,
// 1 usage, 2 parse error, 3 numeric failure, 4 the run returned Fail.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "dpspectra/dpspectra.hpp"
#include "dpspectra/report.hpp"

namespace {

using namespace dpspectra;

constexpr const char* kSchemaVersion = "1";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kNumeric = 3,
  kFailResult = 4,
};

struct CommonOpts {
  std::string matrix_path;
  std::string format = "auto";
  std::string output;  // empty = stdout
  double epsilon = 1.0;
  double delta = 1e-6;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool zero_noise = false;
  bool oracle = false;
};

void add_matrix_opts(CLI::App* cmd, CommonOpts& o, bool required = true) {
  auto* m = cmd->add_option("--matrix", o.matrix_path, "input matrix file");
  if (required) m->required();
  cmd->add_option("--format", o.format, "matrix format: matrix-market | csv | auto")
      ->check(CLI::IsMember({"matrix-market", "csv", "auto"}));
}

void add_output_opt(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--output", o.output, "write the JSON report here (default stdout)");
}

void add_seed_opt(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--seed", o.seed, "RNG seed (fallback: DPSPECTRA_SEED, then 0)")
      ->each([&o](const std::string&) { o.seed_given = true; });
}

void add_privacy_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--epsilon", o.epsilon, "privacy parameter epsilon")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", o.delta, "privacy parameter delta");
}

void add_unsafe_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_flag("--unsafe-zero-noise", o.zero_noise,
                "test mode: force every noise draw to zero (report is stamped non-private)");
  cmd->add_flag("--unsafe-oracle", o.oracle,
                "test mode: embed exact-oracle comparisons (report is stamped non-private)");
}

void resolve_seed(CommonOpts& o) {
  if (o.seed_given) return;
  if (const char* env = std::getenv("DPSPECTRA_SEED")) {
    o.seed = std::strtoull(env, nullptr, 10);
  }
}

json config_echo(const CommonOpts& o) {
  return {{"matrix", o.matrix_path}, {"format", o.format},   {"epsilon", o.epsilon},
          {"delta", o.delta},        {"seed", o.seed},       {"zero_noise", o.zero_noise},
          {"oracle", o.oracle},      {"output", o.output}};
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

json base_report(const std::string& command, const CommonOpts& o) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"config", config_echo(o)},
          {"private", !(o.zero_noise || o.oracle)}};
}

void emit(json& report, const Timer& timer, const std::string& output) {
  report["timings"] = {{"total_ms", timer.ms()}};
  write_report(report, output);
}

// ---------------------------------------------------------------------------
// coherence

int run_coherence(const CommonOpts& opts, const std::vector<int>& ks, bool include_null) {
  Timer timer;
  const auto ingest = ingest_path(opts.matrix_path, opts.format);

  SpectralFactorization F;
  int m = 0, n = 0;
  if (ingest.symmetric) {
    const auto& A = ingest.as_symmetric();
    m = n = A.size();
    F = exact_factorization(A);
  } else {
    const auto& R = ingest.as_rect();
    m = R.rows();
    n = R.cols();
    F = rect_factorization(R);
  }
  for (int kval : ks) {
    if (kval < 1 || static_cast<std::size_t>(kval) > F.left.size()) {
      std::cerr << "error: requested k=" << kval << " is outside the available "
                << F.left.size() << " singular vector pairs\n";
      return kUsage;
    }
  }
  const auto rep = coherence_report(F, m, n, ks, include_null);

  json out = base_report("coherence", opts);
  out["private"] = false;  // exact data statistics, never a private release
  json mu_k_json = json::object();
  for (const auto& [kval, v] : rep.mu_k) mu_k_json[std::to_string(kval)] = v;
  out["result"] = {{"mu", rep.mu},
                   {"mu0", rep.mu0},
                   {"mu_k", std::move(mu_k_json)},
                   {"svd_provenance", rep.svd_provenance},
                   {"symmetric_input", ingest.symmetric},
                   {"include_null_space", include_null}};
  emit(out, timer, opts.output);
  return kOk;
}

// ---------------------------------------------------------------------------
// ppi

struct PpiCliConfig {
  int rounds = 0;  // 0 = auto via the private sigma_1 upper bound
  double coherence_bound = 0.0;
  bool search_c = false;
};

int run_ppi(const CommonOpts& opts, const PpiCliConfig& pc) {
  Timer timer;
  const auto ingest = ingest_path(opts.matrix_path, opts.format);

  double eps = opts.epsilon;
  double delta = opts.delta;
  const bool dilated = !ingest.symmetric;
  SymmetricMatrix A = dilated ? dilate(ingest.as_rect()) : ingest.as_symmetric();
  if (dilated) {
    // entry changes in the rectangle show up twice in the dilation
    eps /= 2.0;
    delta /= 2.0;
  }

  NoiseLedger ledger;
  RngStream rng(opts.seed, 0);

  int T = pc.rounds;
  double sigma1_bound = 0.0;
  if (T <= 0) {
    // a tenth of the budget buys the private sigma_1 upper bound for T
    const double eps_bound = eps / 10.0;
    sigma1_bound = private_sigma1_upper(A, eps_bound, rng, &ledger, opts.zero_noise);
    eps -= eps_bound;
    if (sigma1_bound < 1.0)
      std::cerr << "warning: private sigma_1 bound below 1; clamping T to 1\n";
    T = choose_T(sigma1_bound);
  }

  json out = base_report("ppi", opts);
  out["config"]["rounds"] = T;
  out["config"]["dilated"] = dilated;

  json result;
  std::optional<Vec> output;
  std::vector<const IterationTrace*> traces;

  SearchCResult search;
  PowerResult single;
  if (pc.search_c) {
    search = search_C(A, T, {eps, delta}, opts.seed, &ledger, opts.zero_noise);
    json cands = json::array();
    for (const auto& c : search.candidates) {
      json cj = {{"c", c.C}, {"status", to_string(c.run.trace.status)}};
      if (c.noisy_score) cj["noisy_score"] = *c.noisy_score;
      cands.push_back(std::move(cj));
      traces.push_back(&c.run.trace);
    }
    result["candidates"] = std::move(cands);
    result["chosen_c"] = search.chosen_C;
    out["config"]["search_c"] = true;
    output = search.best;
  } else {
    PpiConfig cfg;
    cfg.T = T;
    cfg.epsilon = eps;
    cfg.delta = delta;
    cfg.C = pc.coherence_bound;
    cfg.zero_noise = opts.zero_noise;
    single = ppi(A, cfg, rng, &ledger);
    traces.push_back(&single.trace);
    out["config"]["coherence_bound"] = pc.coherence_bound;
    output = single.output;
  }

  result["status"] = output.has_value() ? "ok" : "fail";
  if (output) {
    result["vector"] = vec_to_json(*output);
    if (dilated) {
      const int mrows = ingest.as_rect().rows();
      Vec left(output->begin(), output->begin() + mrows);
      Vec right(output->begin() + mrows, output->end());
      normalize(left);
      normalize(right);
      result["left_part"] = vec_to_json(left);
      result["right_part"] = vec_to_json(right);
    }
  }
  if (sigma1_bound > 0.0) result["private_sigma1_upper"] = sigma1_bound;

  json trace_json = json::array();
  for (const auto* t : traces) trace_json.push_back(trace_summary(*t));
  out["traces"] = std::move(trace_json);
  out["ledger"] = ledger_to_json(ledger);

  if (opts.oracle) {
    const auto F = exact_factorization(A);
    json oracle = {{"sigma1", F.sigma[0]}};
    if (output) {
      const double q = norm2(A.matvec(*output));
      oracle["quality"] = q;
      oracle["error"] = F.sigma[0] - q;
      oracle["cosine_top"] = std::abs(dot(F.left[0], *output));
    }
    out["oracle"] = std::move(oracle);
  }

  out["result"] = std::move(result);
  emit(out, timer, opts.output);
  return output.has_value() ? kOk : kFailResult;
}

// ---------------------------------------------------------------------------
// rankk

int run_rankk(const CommonOpts& opts, int k, int rounds, double coherence_bound) {
  Timer timer;
  const auto ingest = ingest_path(opts.matrix_path, opts.format);
  if (!ingest.symmetric) {
    std::cerr << "error: rankk requires a symmetric input matrix\n";
    return kUsage;
  }
  const auto& A = ingest.as_symmetric();

  NoiseLedger ledger;
  int T = rounds;
  double sigma1_bound = 0.0;
  double eps = opts.epsilon;
  if (T <= 0) {
    RngStream rng(opts.seed, 1000);
    const double eps_bound = eps / 10.0;
    sigma1_bound = private_sigma1_upper(A, eps_bound, rng, &ledger, opts.zero_noise);
    eps -= eps_bound;
    T = choose_T(sigma1_bound);
  }

  json out = base_report("rankk", opts);
  out["config"]["k"] = k;
  out["config"]["rounds"] = T;
  out["config"]["coherence_bound"] = coherence_bound;

  const auto res = rank_k_approx(A, k, T, {eps, opts.delta}, coherence_bound, opts.seed, &ledger,
                                 opts.zero_noise);
  json result;
  json trace_json = json::array();
  int exit_code = kOk;
  if (std::holds_alternative<RankKFail>(res)) {
    const auto& f = std::get<RankKFail>(res);
    result["status"] = "fail";
    result["failed_stage"] = f.stage;
    for (const auto& t : f.traces) trace_json.push_back(trace_summary(t));
    exit_code = kFailResult;
  } else {
    const auto& r = std::get<RankKResult>(res);
    result["status"] = "ok";
    result["sigma_hat"] = json(r.sigma_hat);
    json vecs = json::array();
    for (const auto& v : r.vectors) vecs.push_back(vec_to_json(v));
    result["vectors"] = std::move(vecs);
    for (const auto& t : r.traces) trace_json.push_back(trace_summary(t));
    if (opts.oracle) {
      const auto FA = exact_factorization(A);
      json oracle = {
          {"sigma_k_plus_1", k < A.size() ? FA.sigma[static_cast<std::size_t>(k)] : 0.0}};
      oracle["residual_spectral_norm"] = spectral_norm(r.residual);
      json per_stage = json::array();
      SymmetricMatrix Ai = A;
      for (std::size_t i = 0; i < r.vectors.size(); ++i) {
        Ai = Ai.subtract_rank1(r.sigma_hat[i], r.vectors[i]);
        per_stage.push_back(spectral_norm(Ai));
      }
      oracle["stage_residual_norms"] = std::move(per_stage);
      out["oracle"] = std::move(oracle);
    }
  }
  out["traces"] = std::move(trace_json);
  out["ledger"] = ledger_to_json(ledger);
  out["result"] = std::move(result);
  emit(out, timer, opts.output);
  return exit_code;
}

// ---------------------------------------------------------------------------
// lowerbound-demo

int run_lowerbound(const CommonOpts& opts, int n, double c, int trials) {
  Timer timer;
  const auto rep = attack_demo(n, c, opts.epsilon, opts.delta, trials, opts.seed, opts.zero_noise);

  json out = base_report("lowerbound-demo", opts);
  out["config"]["n"] = n;
  out["config"]["c"] = c;
  out["config"]["trials"] = trials;
  out["private"] = false;  // simulation on synthetic data

  json per_trial = json::array();
  std::vector<double> qualities, hammings;
  for (const auto& t : rep.per_trial) {
    per_trial.push_back({{"ppi_failed", t.ppi_failed},
                         {"degenerate", t.degenerate},
                         {"quality", t.quality},
                         {"hamming", t.hamming},
                         {"above_999", t.above_999},
                         {"correlation_consistent", t.correlation_consistent}});
    if (!t.ppi_failed) {
      qualities.push_back(t.quality);
      hammings.push_back(static_cast<double>(t.hamming));
    }
  }
  auto quantile = [](std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(p * (v.size() - 1));
    return v[idx];
  };
  out["result"] = {{"sigma1", rep.sigma1},
                   {"per_trial", std::move(per_trial)},
                   {"failed_trials", rep.failed_trials},
                   {"quality_quantiles",
                    {{"q10", quantile(qualities, 0.1)},
                     {"q50", rep.median_quality},
                     {"q90", quantile(qualities, 0.9)}}},
                   {"hamming_quantiles",
                    {{"q10", quantile(hammings, 0.1)},
                     {"q50", rep.median_hamming},
                     {"q90", quantile(hammings, 0.9)}}}};
  emit(out, timer, opts.output);
  return kOk;
}

// ---------------------------------------------------------------------------
// sensitivity-probe

int run_sensitivity(const CommonOpts& opts, int q, int k, const std::string& entry, int trials) {
  Timer timer;
  const auto ingest = ingest_path(opts.matrix_path, opts.format);
  if (!ingest.symmetric) {
    std::cerr << "error: sensitivity-probe requires a symmetric input matrix\n";
    return kUsage;
  }
  const auto& M = ingest.as_symmetric();

  const auto comma = entry.find(',');
  int s = 0, t = 0;
  try {
    if (comma == std::string::npos) throw std::invalid_argument("missing comma");
    s = std::stoi(entry.substr(0, comma)) - 1;
    t = std::stoi(entry.substr(comma + 1)) - 1;
  } catch (const std::exception&) {
    std::cerr << "error: --entry expects 's,t' (1-based indices)\n";
    return kUsage;
  }

  const auto est = power_gap_estimate(M, s, t, q, trials, opts.seed);
  const auto bound = mu_k_power_bound(M, k, q);

  json out = base_report("sensitivity-probe", opts);
  out["config"]["q"] = q;
  out["config"]["k"] = k;
  out["config"]["entry"] = entry;
  out["config"]["trials"] = trials;
  out["private"] = false;  // monte-carlo probe of exact data
  out["result"] = {{"estimate", est.mean},
                   {"std_error", est.std_error},
                   {"bound", bound.bound},
                   {"sigma1", bound.sigma1},
                   {"mu_k", bound.mu_k_value},
                   {"preconditions",
                    {{"sigma1_at_least_4q", bound.sigma1_large_enough},
                     {"tail_at_most_half_sigma1", bound.tail_small_enough},
                     {"q_at_least_log_n_plus_1", bound.q_large_enough},
                     {"all", bound.preconditions_met}}},
                   {"estimate_within_bound", est.mean <= bound.bound + 3.0 * est.std_error}};
  emit(out, timer, opts.output);
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

int run_sweep(const CommonOpts& opts, const std::vector<double>& eps_grid,
              const std::vector<double>& c_grid, int rounds, int seeds_per_cell) {
  Timer timer;
  const auto ingest = ingest_path(opts.matrix_path, opts.format);
  if (!ingest.symmetric) {
    std::cerr << "error: sweep requires a symmetric input matrix\n";
    return kUsage;
  }
  const auto& A = ingest.as_symmetric();
  const double sigma1 = spectral_norm(A);
  const int T = rounds > 0 ? rounds : choose_T(sigma1);

  json out = base_report("sweep", opts);
  out["config"]["rounds"] = T;
  out["config"]["eps_grid"] = json(eps_grid);
  out["config"]["c_grid"] = json(c_grid);
  out["config"]["seeds_per_cell"] = seeds_per_cell;
  out["private"] = false;  // the tabulated error uses the exact sigma_1

  json cells = json::array();
  std::uint64_t stream = 0;
  for (double eps : eps_grid) {
    for (double c : c_grid) {
      std::vector<double> errors;
      int fails = 0;
      for (int run = 0; run < seeds_per_cell; ++run) {
        PpiConfig cfg;
        cfg.T = T;
        cfg.epsilon = eps;
        cfg.delta = opts.delta;
        cfg.C = c;
        cfg.zero_noise = opts.zero_noise;
        RngStream rng(opts.seed, stream++);
        const auto res = ppi(A, cfg, rng);
        if (res.output) {
          errors.push_back(sigma1 - norm2(A.matvec(*res.output)));
        } else {
          ++fails;
        }
      }
      std::sort(errors.begin(), errors.end());
      const double median =
          errors.empty()
              ? 0.0
              : (errors.size() % 2 == 1
                     ? errors[errors.size() / 2]
                     : 0.5 * (errors[errors.size() / 2 - 1] + errors[errors.size() / 2]));
      cells.push_back({{"epsilon", eps},
                       {"c", c},
                       {"median_error", median},
                       {"fail_count", fails},
                       {"runs", seeds_per_cell}});
    }
  }
  out["result"] = {{"sigma1", sigma1}, {"cells", std::move(cells)}};
  emit(out, timer, opts.output);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private singular vectors via noisy power iteration"};
  app.require_subcommand(1);

  CommonOpts opts;

  // coherence
  auto* coherence_cmd = app.add_subcommand("coherence", "coherence measures of a matrix");
  std::vector<int> ks{1};
  bool include_null = false;
  add_matrix_opts(coherence_cmd, opts);
  add_output_opt(coherence_cmd, opts);
  coherence_cmd->add_option("--k", ks, "k values for the top-k coherence")->delimiter(',');
  coherence_cmd->add_flag("--include-null-space", include_null,
                          "include null-space singular vectors in mu");

  // ppi
  auto* ppi_cmd = app.add_subcommand("ppi", "private power iteration for the top singular vector");
  PpiCliConfig pc;
  add_matrix_opts(ppi_cmd, opts);
  add_privacy_opts(ppi_cmd, opts);
  add_seed_opt(ppi_cmd, opts);
  add_output_opt(ppi_cmd, opts);
  add_unsafe_opts(ppi_cmd, opts);
  ppi_cmd->add_option("--rounds", pc.rounds,
                      "iteration count T (omit to derive it from a private sigma_1 bound)");
  auto* copt =
      ppi_cmd->add_option("--coherence-bound", pc.coherence_bound, "coherence upper bound C (>= 1)");
  auto* sopt = ppi_cmd->add_flag("--search-c", pc.search_c,
                                 "doubling search over C = 2^i instead of a fixed bound");
  copt->excludes(sopt);

  // rankk
  auto* rankk_cmd = app.add_subcommand("rankk", "rank-k approximation by PPI and deflation");
  int k = 1;
  int rankk_rounds = 0;
  double rankk_c = 1.0;
  add_matrix_opts(rankk_cmd, opts);
  add_privacy_opts(rankk_cmd, opts);
  add_seed_opt(rankk_cmd, opts);
  add_output_opt(rankk_cmd, opts);
  add_unsafe_opts(rankk_cmd, opts);
  rankk_cmd->add_option("--k", k, "target rank (>= 1)")->required();
  rankk_cmd->add_option("--rounds", rankk_rounds, "iteration count T per stage (omit for auto)");
  rankk_cmd->add_option("--coherence-bound", rankk_c, "coherence upper bound C (>= 1)")->required();

  // lowerbound-demo
  auto* lb_cmd = app.add_subcommand("lowerbound-demo",
                                    "reconstruction attack on the coherence-C hard instances");
  int lb_n = 64;
  double lb_c = 4.0;
  int lb_trials = 10;
  add_privacy_opts(lb_cmd, opts);
  add_seed_opt(lb_cmd, opts);
  add_output_opt(lb_cmd, opts);
  add_unsafe_opts(lb_cmd, opts);
  lb_cmd->add_option("--n", lb_n, "instance dimension (even)")->required();
  lb_cmd->add_option("--c", lb_c, "coherence parameter C in [2, n] with n/C integer")->required();
  lb_cmd->add_option("--trials", lb_trials, "number of independent trials");

  // sensitivity-probe
  auto* sp_cmd = app.add_subcommand("sensitivity-probe",
                                    "monte-carlo check of the matrix-power perturbation bound");
  int sp_q = 4;
  int sp_k = 1;
  std::string sp_entry = "1,1";
  int sp_trials = 200;
  add_matrix_opts(sp_cmd, opts);
  add_seed_opt(sp_cmd, opts);
  add_output_opt(sp_cmd, opts);
  sp_cmd->add_option("--q", sp_q, "matrix power q");
  sp_cmd->add_option("--k", sp_k, "coherence index k");
  sp_cmd->add_option("--entry", sp_entry, "perturbed entry 's,t' (1-based)");
  sp_cmd->add_option("--trials", sp_trials, "g-sample count");

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "tabulate achieved error over an (epsilon, C) grid");
  std::vector<double> eps_grid{0.5, 1.0, 2.0};
  std::vector<double> c_grid{4.0, 16.0};
  int sweep_rounds = 0;
  int seeds_per_cell = 1;
  add_matrix_opts(sweep_cmd, opts);
  add_seed_opt(sweep_cmd, opts);
  add_output_opt(sweep_cmd, opts);
  sweep_cmd->add_option("--delta", opts.delta, "privacy parameter delta per run");
  sweep_cmd->add_option("--eps-grid", eps_grid, "epsilon grid values")->delimiter(',');
  sweep_cmd->add_option("--c-grid", c_grid, "coherence-bound grid values")->delimiter(',');
  sweep_cmd->add_option("--rounds", sweep_rounds, "iteration count T (omit for auto via sigma_1)");
  sweep_cmd->add_option("--seeds-per-cell", seeds_per_cell, "independent runs per grid cell");
  sweep_cmd->add_flag("--unsafe-zero-noise", opts.zero_noise, "test mode: zero noise");

  CLI11_PARSE(app, argc, argv);
  resolve_seed(opts);

  try {
    if (app.got_subcommand(coherence_cmd)) return run_coherence(opts, ks, include_null);
    if (app.got_subcommand(ppi_cmd)) {
      if (!pc.search_c && !(pc.coherence_bound >= 1.0)) {
        std::cerr << "error: ppi needs --coherence-bound >= 1 or --search-c\n";
        return kUsage;
      }
      return run_ppi(opts, pc);
    }
    if (app.got_subcommand(rankk_cmd)) {
      if (k < 1) {
        std::cerr << "error: --k must be >= 1\n";
        return kUsage;
      }
      return run_rankk(opts, k, rankk_rounds, rankk_c);
    }
    if (app.got_subcommand(lb_cmd)) return run_lowerbound(opts, lb_n, lb_c, lb_trials);
    if (app.got_subcommand(sp_cmd)) return run_sensitivity(opts, sp_q, sp_k, sp_entry, sp_trials);
    if (app.got_subcommand(sweep_cmd))
      return run_sweep(opts, eps_grid, c_grid, sweep_rounds, seeds_per_cell);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
