// pof_main.cpp -- command-line front end.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pof/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInfeasibleTuning = 3;
constexpr int kRuntimeError = 4;

pof::ExperimentConfig load_config(const std::string& path, std::uint64_t seed,
                                  bool seed_set, const std::string& out) {
  pof::ExperimentConfig cfg = pof::load_experiment_config(path);
  if (seed_set) cfg.seeds = {seed};
  if (!out.empty()) cfg.output = out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof-of-Following simulation and verification toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 1;
  std::vector<CLI::Option*> seed_opts;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* c = cmd->add_option("--config", config_path,
                              "experiment config JSON");
    if (config_required) c->required();
    cmd->add_option("--out", out_path, "output path");
    seed_opts.push_back(cmd->add_option("--seed", seed, "seed override"));
    return cmd;
  };

  auto* sim = add_common(app.add_subcommand("simulate",
                                            "run scenarios x seeds"),
                         true);

  auto* tun = add_common(
      app.add_subcommand("tune", "EER parameter search on training data"),
      true);

  std::string sweep_kind;
  std::vector<double> sweep_grid;
  auto* swp = add_common(
      app.add_subcommand("sweep", "one curve CSV over a parameter grid"),
      true);
  swp->add_option("--kind", sweep_kind,
                  "distance | time-offset | theta | delta-t | K")
      ->required();
  swp->add_option("--grid", sweep_grid, "grid values")->required();

  std::string verifier_csv, candidate_csv;
  auto* ver = add_common(
      app.add_subcommand("verify-trace", "offline decision on two traces"),
      false);
  ver->add_option("--verifier", verifier_csv, "verifier trace CSV")
      ->required();
  ver->add_option("--candidate", candidate_csv, "candidate trace CSV")
      ->required();

  std::string apen_trace;
  std::size_t apen_m = 2;
  double apen_r_factor = 0.2;
  std::size_t apen_smooth = 20;
  auto* apn = app.add_subcommand("apen", "approximate entropy of a trace");
  apn->add_option("--trace", apen_trace, "trace CSV")->required();
  apn->add_option("--m", apen_m, "embedding dimension");
  apn->add_option("--r-factor", apen_r_factor, "R as a multiple of std");
  apn->add_option("--smooth-window", apen_smooth,
                  "moving-average window (1 disables)");

  CLI11_PARSE(app, argc, argv);
  bool seed_set = false;
  for (const auto* o : seed_opts) seed_set = seed_set || o->count() > 0;

  try {
    if (sim->parsed()) {
      pof::cmd_simulate(load_config(config_path, seed, seed_set, out_path),
                        std::cout);
    } else if (tun->parsed()) {
      pof::cmd_tune(pof::load_experiment_config(config_path), seed,
                    out_path.empty() ? "tuned_params.json" : out_path,
                    std::cout);
    } else if (swp->parsed()) {
      pof::cmd_sweep(pof::load_experiment_config(config_path), sweep_kind,
                     sweep_grid, seed,
                     out_path.empty() ? "sweep.csv" : out_path, std::cout);
    } else if (ver->parsed()) {
      const pof::PofParams params = config_path.empty()
                                        ? pof::PofParams{}
                                        : pof::load_params_json(config_path);
      pof::cmd_verify_trace(verifier_csv, candidate_csv, params, out_path,
                            std::cout);
    } else if (apn->parsed()) {
      pof::cmd_apen(apen_trace, apen_m, apen_r_factor, apen_smooth,
                    std::cout);
    }
  } catch (const pof::InseparableTrainingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasibleTuning;
  } catch (const pof::InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
