#pragma once

// Command-line front door. Subcommands map one-to-one onto the calculators
// and experiment drivers; every run resolves a RunConfig (JSON config file
// merged with flag overrides), validates it, and emits CSV + a JSON
// manifest capturing the resolved configuration, seeds, grids and
// conventions, plus an optional gnuplot script.
//
// Exit codes: 0 = within tolerance, 1 = violation detected,
// 2 = configuration or budget error.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "harmlab/manifold.hpp"

namespace harmlab::cli {

struct RunConfig {
  ManifoldSpec manifold{{2}, 1};
  int k = 1;
  double p = 4.0;
  std::vector<double> N_schedule;     // dyadic list
  long long A_lo = 0, A_hi = 0;       // count range (A_lo, A_hi]
  bool exhaustive_b = false;          // count: all integer offsets vs b = 0
  std::string mode = "i1";            // expsum: i1 | i2
  double N1_ratio_power = 2.0;        // i2/strichartz: N1 = N2^power
  std::string witness = "zonal";      // projector: zonal | hw per all factors
  int lambda1_mult = 4;               // projector: lambda1 = mult * lambda2
  int trials = 20;
  std::uint64_t seed = 1;
  std::size_t budget = 10'000'000;
  int jobs = 1;
  double tolerance = 0.15;            // slope tolerance for verdicts
  double count_slope_max = 0.25;      // count: divisor-proxy ceiling
  double count_max = 2;               // count: far-regime point ceiling
  std::string out_dir;                // empty: print only
  std::string format = "csv";        // csv | json
  bool gnuplot = false;
  bool dry_run = false;
  std::string fit_input;              // fit: CSV path with N,value columns
  int fit_drop = 0;

  void validate() const;
};

// "4:64" -> {4,8,16,32,64}; "8" -> {8}; "a,b,c" -> listed values
std::vector<double> parse_schedule(const std::string& text);

// Loads the flat command block from a JSON config file into cfg; unknown
// keys are rejected. Missing file or block is an error.
void apply_config_file(RunConfig& cfg, const std::string& path, const std::string& command);

int cmd_thresholds(const RunConfig& cfg);
int cmd_expsum(const RunConfig& cfg);
int cmd_projector(const RunConfig& cfg);
int cmd_strichartz(const RunConfig& cfg);
int cmd_count(const RunConfig& cfg);
int cmd_weyl(const RunConfig& cfg);
int cmd_fit(const RunConfig& cfg);

int dispatch(const std::string& command, const RunConfig& cfg);

}  // namespace harmlab::cli
