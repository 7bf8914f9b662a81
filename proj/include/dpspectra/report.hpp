#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "dpspectra/linalg.hpp"
#include "dpspectra/power_iteration.hpp"
#include "dpspectra/privacy.hpp"

namespace dpspectra {

using json = nlohmann::json;

inline json vec_to_json(const Vec& v) { return json(v); }

inline json ledger_to_json(const NoiseLedger& ledger) {
  json out = json::array();
  for (const auto& e : ledger.entries()) {
    out.push_back({{"mechanism", e.mechanism},
                   {"epsilon", e.epsilon},
                   {"delta", e.delta},
                   {"sensitivity", e.sensitivity},
                   {"scale", e.scale}});
  }
  return out;
}

/// Round-by-round norms and gate outcomes; the iterate vectors themselves stay
/// out of the summary (the final output is reported separately).
inline json trace_summary(const IterationTrace& trace) {
  json rounds = json::array();
  for (const auto& r : trace.rounds) {
    rounds.push_back({{"gate_inf_sq", r.gate_inf_sq},
                      {"gate_passed", r.gate_passed},
                      {"x_prime_norm", r.x_prime_norm}});
  }
  return {{"status", to_string(trace.status)},
          {"terminal_round", trace.terminal_round},
          {"rounds", std::move(rounds)}};
}

/// Writes through a temp file in the destination directory and renames, so a
/// crash never leaves a torn report. An empty path writes to stdout.
inline void write_report(const json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path dest(path);
  fs::path tmp = dest;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file '" + tmp.string() + "'");
    out << text;
  }
  fs::rename(tmp, dest);
}

}  // namespace dpspectra
