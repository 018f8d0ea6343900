// harness.hpp -- experiment configuration, sweeps, and result emission for
// the command-line front end.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_HARNESS_HPP
#define POF_HARNESS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pof/simnet.hpp"

namespace pof {

// Synthetic training-set description for `tune`; alternatively explicit
// labeled trace-pair files.
struct TuneSpec {
  double legit_distance = 20.0;
  double adversary_distance = 90.0;
  std::size_t pairs = 12;       // simulated pairs per class
  std::size_t K_max = 40;
  double train_fraction = 0.3;  // seeded split; remainder is held out
  std::vector<std::pair<std::string, std::string>> legit_files;
  std::vector<std::pair<std::string, std::string>> adversary_files;
};

struct ExperimentConfig {
  WorldSpec world;
  SessionConfig session;  // carries PofParams
  std::vector<AttackScenario> scenarios;
  std::vector<std::uint64_t> seeds = {1};
  std::string output = "out";
  std::optional<TuneSpec> tune;
  std::size_t runs_per_point = 5;  // sweep repetitions per grid value

  void validate() const;
};

// Parses and schema-validates a JSON config. Errors carry the file name and,
// for syntax errors, the line number.
ExperimentConfig load_experiment_config(const std::string& path);

// Reads PofParams from JSON, either flat {N,M,K,tau,alpha} or nested under
// a "params" key (an experiment config works too).
PofParams load_params_json(const std::string& path);

// scenarios x seeds simulation runs; per-run SimReport JSON plus
// `aggregate.csv` (scenario,seed,verdict,mean_rho,passed_count) under
// cfg.output. Deterministic: identical config yields byte-identical files.
void cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);

// Seeded train/holdout split over per-class rho samples, EER grid search on
// the training share, held-out F_C / F_M report. Writes tuned-params JSON to
// `out` when non-empty. Throws InseparableTrainingError when infeasible.
TunedParams cmd_tune(const ExperimentConfig& cfg, std::uint64_t seed,
                     const std::string& out, std::ostream& log);

// kind: distance | time-offset | theta | delta-t | K. One CSV row per grid
// value: `x,mean,std,n`.
void cmd_sweep(const ExperimentConfig& cfg, const std::string& kind,
               const std::vector<double>& grid, std::uint64_t seed,
               const std::string& out, std::ostream& log);

// Offline decision over two recorded traces. Writes verdict JSON to `out`
// when non-empty.
PofDecision cmd_verify_trace(const std::string& verifier_csv,
                             const std::string& candidate_csv,
                             const PofParams& params, const std::string& out,
                             std::ostream& log);

// Smooths with `smooth_window`, then ApEn with R = r_factor * std.
double cmd_apen(const std::string& trace_csv, std::size_t m, double r_factor,
                std::size_t smooth_window, std::ostream& log);

// Mean per-subset correlation between a platoon pair at constant gap
// `distance`, repeated `runs` times. Exposed for sweeps and tuning.
std::vector<double> platoon_rhos(const WorldSpec& world, double distance,
                                 const PofParams& params, std::uint64_t seed,
                                 std::size_t runs);

}  // namespace pof

#endif  // POF_HARNESS_HPP
