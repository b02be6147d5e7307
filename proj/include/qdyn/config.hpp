#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "qdyn/error.hpp"

namespace qdyn {

// Run-wide tunables.  File format: `key = value` lines, '#' comments; CLI
// flags override file values.  Unknown keys are rejected with the line number.
struct RunConfig {
  int period = 10;
  double rho = 0.05;
  double delta = 1.8;
  double delta_lo = 1.05;
  double delta_hi = 2.0;
  double bisect_tol = 0.05;
  int truncation = 34;           // series depth j
  double prune_threshold = 1e-9;
  int grid_radial = 4;
  int grid_angular = 12;
  std::uint64_t node_budget = 50'000'000;
  int profile_depth = 12;
  int samples = 100'000;         // Monte Carlo samples
  int mc_budget = 1500;
  std::uint64_t seed = 20240704;
  double track_factor = 0.5;
  std::string precision = "double";  // or "extended"
  std::string out_dir = "out";
  bool paper_inequality_mode = false;
  bool area_paper_mode = false;
  int threads = 0;  // 0: library default / env
  double kappa = 0.3;
  double epsilon = 0.3;
  int kmax = 30;
  int degree = 20;

  void validate() const;
};

// Total parse: every failure names the line and key.
RunConfig load_config(const std::string& path);

// Applies `key = value` semantics to one field; shared by file and CLI paths.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value,
                        int line_for_errors = 0);

}  // namespace qdyn
