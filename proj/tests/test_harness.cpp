// test_harness.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pof/harness.hpp"
#include "pof/trace_io.hpp"

namespace fs = std::filesystem;
using namespace pof;

namespace {

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("pof_harness_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name) const {
    return (dir / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

RssTrace random_trace(const std::string& id, std::size_t n,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(-60.0, 5.0);
  RssTrace t;
  t.vehicle_id = id;
  t.rate = 20.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.samples.push_back({static_cast<double>(i) / 20.0, d(rng)});
  }
  return t;
}

// Small-window config with one distant station: fast runs, flat path loss.
std::string fast_config_json(const std::string& extra = "") {
  return std::string("{\n"
                     "  \"world\": {\"stations\": [[10000, 200000]]},\n"
                     "  \"params\": {\"N\": 400, \"M\": 20, \"K\": 3,\n"
                     "               \"tau\": 0.35, \"alpha\": 0.55}") +
         (extra.empty() ? "" : ",\n" + extra) + "\n}\n";
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("config loading reports actionable errors") {
  Scratch s("cfgerr");
  SUBCASE("missing file") {
    try {
      load_experiment_config(s.file("nope.json"));
      FAIL("expected error");
    } catch (const InvalidArgumentError& e) {
      CHECK(std::string(e.what()).find("nope.json") != std::string::npos);
    }
  }
  SUBCASE("syntax errors carry the file and line") {
    const std::string p = s.file("bad.json");
    write_file(p, "{\n  \"seeds\": [1],\n  \"output\" \"x\"\n}\n");
    try {
      load_experiment_config(p);
      FAIL("expected error");
    } catch (const InvalidArgumentError& e) {
      CHECK(std::string(e.what()).find(p + ":3") != std::string::npos);
    }
  }
  SUBCASE("missing route file is named") {
    const std::string p = s.file("route.json");
    write_file(p,
               "{\"world\": {\"route_file\": \"/no/such/route.csv\"}}\n");
    try {
      load_experiment_config(p);
      FAIL("expected error");
    } catch (const InvalidArgumentError& e) {
      CHECK(std::string(e.what()).find("/no/such/route.csv") !=
            std::string::npos);
    }
  }
  SUBCASE("semantic validation still applies") {
    const std::string p = s.file("sem.json");
    write_file(p, "{\"seeds\": []}\n");
    CHECK_THROWS_AS(load_experiment_config(p), InvalidArgumentError);
  }
}

TEST_CASE("load_params_json accepts flat and nested layouts") {
  Scratch s("params");
  const std::string flat = s.file("flat.json");
  write_file(flat, "{\"N\": 100, \"M\": 10, \"K\": 7, \"tau\": 0.4}\n");
  PofParams p = load_params_json(flat);
  CHECK(p.N == 100);
  CHECK(p.K == 7);
  CHECK(p.tau == doctest::Approx(0.4));
  CHECK(p.alpha == doctest::Approx(0.55));  // default preserved

  const std::string nested = s.file("nested.json");
  write_file(nested, "{\"params\": {\"K\": 9}}\n");
  CHECK(load_params_json(nested).K == 9);

  const std::string invalid = s.file("invalid.json");
  write_file(invalid, "{\"N\": 3}\n");
  CHECK_THROWS_AS(load_params_json(invalid), InvalidArgumentError);
}

TEST_CASE("cmd_simulate writes per-run JSON and a deterministic aggregate") {
  Scratch s("simulate");
  const std::string cfg_path = s.file("cfg.json");
  write_file(cfg_path,
             fast_config_json(
                 "  \"scenarios\": [{\"kind\": \"legit\"},\n"
                 "                  {\"kind\": \"remote\"}],\n"
                 "  \"seeds\": [1, 2, 3],\n"
                 "  \"output\": \"" + s.file("out") + "\""));
  const ExperimentConfig cfg = load_experiment_config(cfg_path);
  std::ostringstream log;
  cmd_simulate(cfg, log);

  const auto rows = read_csv(s.file("out") + "/aggregate.csv");
  REQUIRE(rows.size() == 7);  // header + 2 scenarios x 3 seeds
  CHECK(rows[0] ==
        std::vector<std::string>{"scenario", "seed", "verdict", "mean_rho",
                                 "passed_count"});
  for (int seed = 1; seed <= 3; ++seed) {
    CHECK(fs::exists(s.file("out") + "/sim_0_legit_" + std::to_string(seed) +
                     ".json"));
    CHECK(fs::exists(s.file("out") + "/sim_1_remote_" + std::to_string(seed) +
                     ".json"));
  }
  // Legit accepts, remote rejects, across all seeds.
  for (std::size_t i = 1; i <= 3; ++i) CHECK(rows[i][2] == "accept");
  for (std::size_t i = 4; i <= 6; ++i) CHECK(rows[i][2] == "reject");

  // Byte-identical rerun.
  const std::string before = read_file(s.file("out") + "/sim_0_legit_2.json");
  const std::string agg_before = read_file(s.file("out") + "/aggregate.csv");
  std::ostringstream log2;
  cmd_simulate(cfg, log2);
  CHECK(read_file(s.file("out") + "/sim_0_legit_2.json") == before);
  CHECK(read_file(s.file("out") + "/aggregate.csv") == agg_before);
}

TEST_CASE("cmd_tune separates synthetic platoon classes") {
  Scratch s("tune");
  const std::string cfg_path = s.file("cfg.json");
  write_file(cfg_path,
             fast_config_json("  \"tune\": {\"legit_distance\": 15,\n"
                              "             \"adversary_distance\": 90,\n"
                              "             \"pairs\": 4, \"K_max\": 6}"));
  const ExperimentConfig cfg = load_experiment_config(cfg_path);
  std::ostringstream log;
  const TunedParams t = cmd_tune(cfg, 5, s.file("tuned.json"), log);
  CHECK(t.eer < 0.2);
  CHECK(t.tau > 0.0);
  CHECK(t.K >= 1);
  CHECK(t.K <= 6);
  CHECK(t.f_C > 0.5);
  CHECK(t.f_M < 0.5);
  CHECK(fs::exists(s.file("tuned.json")));
  const std::string out = read_file(s.file("tuned.json"));
  CHECK(out.find("\"holdout\"") != std::string::npos);
  CHECK(out.find("\"tau\"") != std::string::npos);
}

TEST_CASE("cmd_tune file mode, warnings, and inseparable classes") {
  Scratch s("tunefiles");
  // 16 samples satisfy the small N=8, M=2, K=3 parameter set.
  const RssTrace v = random_trace("veh-v", 16, 1);
  RssTrace c = v;
  c.vehicle_id = "veh-c";
  const RssTrace noise = random_trace("veh-m", 16, 999);
  save_trace_csv(v, s.file("v.csv"));
  save_trace_csv(c, s.file("c.csv"));
  save_trace_csv(noise, s.file("m.csv"));

  const std::string small_params =
      "  \"params\": {\"N\": 8, \"M\": 2, \"K\": 3,\n"
      "               \"tau\": 0.35, \"alpha\": 0.55}";
  SUBCASE("separable pairs tune cleanly and warn on small samples") {
    const std::string cfg_path = s.file("cfg.json");
    write_file(cfg_path,
               "{\n" + small_params + ",\n" +
                   "  \"tune\": {\"K_max\": 3,\n"
                   "    \"legit_files\": [[\"" + s.file("v.csv") + "\", \"" +
                   s.file("c.csv") + "\"]],\n"
                   "    \"adversary_files\": [[\"" + s.file("v.csv") +
                   "\", \"" + s.file("m.csv") + "\"]]}\n}\n");
    const ExperimentConfig cfg = load_experiment_config(cfg_path);
    std::ostringstream log;
    const TunedParams t = cmd_tune(cfg, 1, "", log);
    CHECK(t.eer == 0.0);
    CHECK(log.str().find("warning") != std::string::npos);
  }
  SUBCASE("identical classes are inseparable") {
    const std::string cfg_path = s.file("cfg2.json");
    write_file(cfg_path,
               "{\n" + small_params + ",\n" +
                   "  \"tune\": {\"K_max\": 3,\n"
                   "    \"legit_files\": [[\"" + s.file("v.csv") + "\", \"" +
                   s.file("c.csv") + "\"]],\n"
                   "    \"adversary_files\": [[\"" + s.file("v.csv") +
                   "\", \"" + s.file("c.csv") + "\"]]}\n}\n");
    const ExperimentConfig cfg = load_experiment_config(cfg_path);
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_tune(cfg, 1, "", log), InseparableTrainingError);
  }
  SUBCASE("missing trace file is rejected at load time") {
    const std::string cfg_path = s.file("cfg3.json");
    write_file(cfg_path,
               "{\n" + small_params + ",\n" +
                   "  \"tune\": {\"legit_files\": [[\"" + s.file("v.csv") +
                   "\", \"" + s.file("gone.csv") + "\"]]}\n}\n");
    CHECK_THROWS_AS(load_experiment_config(cfg_path), InvalidArgumentError);
  }
}

TEST_CASE("cmd_sweep kinds") {
  Scratch s("sweep");
  const std::string cfg_path = s.file("cfg.json");
  write_file(cfg_path, fast_config_json("  \"runs_per_point\": 2"));
  const ExperimentConfig cfg = load_experiment_config(cfg_path);
  std::ostringstream log;

  SUBCASE("unknown kind errors") {
    CHECK_THROWS_AS(cmd_sweep(cfg, "bogus", {1.0}, 1, s.file("x.csv"), log),
                    InvalidArgumentError);
  }
  SUBCASE("empty grid errors") {
    CHECK_THROWS_AS(cmd_sweep(cfg, "distance", {}, 1, s.file("x.csv"), log),
                    InvalidArgumentError);
  }
  SUBCASE("distance sweep decays with separation") {
    const std::string out = s.file("dist.csv");
    cmd_sweep(cfg, "distance", {10.0, 60.0}, 3, out, log);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"x", "mean", "std", "n"});
    CHECK(std::stod(rows[1][1]) > std::stod(rows[2][1]));
    CHECK(std::stod(rows[1][1]) > 0.5);
    CHECK(std::stod(rows[2][1]) < 0.4);
  }
  SUBCASE("time-offset sweep decays with staleness") {
    const std::string out = s.file("toff.csv");
    cmd_sweep(cfg, "time-offset", {0.0, 30.0}, 3, out, log);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][1]) > 0.9);  // zero offset, same vehicle path
    CHECK(std::stod(rows[2][1]) < 0.3);
  }
  SUBCASE("delta-t sweep: in-platoon relay passes only when fresh") {
    const std::string out = s.file("dt.csv");
    cmd_sweep(cfg, "delta-t", {0.0, 3.0}, 3, out, log);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0));
    CHECK(std::stod(rows[2][1]) == doctest::Approx(0.0));
    CHECK_THROWS_AS(cmd_sweep(cfg, "delta-t", {-1.0}, 1, out, log),
                    InvalidArgumentError);
  }
  SUBCASE("K sweep runs the full protocol per grid value") {
    const std::string out = s.file("k.csv");
    cmd_sweep(cfg, "K", {1.0, 3.0}, 3, out, log);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 3);
    // Honest follower accepts at every K.
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0));
    CHECK(std::stod(rows[2][1]) == doctest::Approx(1.0));
    CHECK_THROWS_AS(cmd_sweep(cfg, "K", {0.0}, 1, out, log),
                    InvalidArgumentError);
  }
}

TEST_CASE("cmd_verify_trace offline decisions") {
  Scratch s("verify");
  PofParams small;
  small.N = 8;
  small.M = 2;
  small.K = 3;
  const std::size_t need = small.required_samples();

  const RssTrace v = random_trace("veh-v", need, 4);
  RssTrace c = v;
  c.vehicle_id = "veh-c";
  save_trace_csv(v, s.file("v.csv"));
  save_trace_csv(c, s.file("c.csv"));

  std::ostringstream log;
  const PofDecision d = cmd_verify_trace(s.file("v.csv"), s.file("c.csv"),
                                         small, s.file("verdict.json"), log);
  CHECK(d.accept);
  CHECK(d.passed_count == small.K);
  for (double r : d.rhos) CHECK(r == doctest::Approx(1.0));
  CHECK(read_file(s.file("verdict.json")).find("\"accept\"") !=
        std::string::npos);

  // Value-shuffled candidate decorrelates.
  RssTrace shuffled = c;
  std::mt19937_64 rng(10);
  for (std::size_t i = shuffled.samples.size(); i > 1; --i) {
    std::swap(shuffled.samples[i - 1].rss,
              shuffled.samples[rng() % i].rss);
  }
  save_trace_csv(shuffled, s.file("shuf.csv"));
  CHECK_FALSE(cmd_verify_trace(s.file("v.csv"), s.file("shuf.csv"), small, "",
                               log)
                  .accept);

  // Default parameters need 4200 samples; the error names the number.
  try {
    cmd_verify_trace(s.file("v.csv"), s.file("c.csv"), PofParams{}, "", log);
    FAIL("expected error");
  } catch (const InvalidArgumentError& e) {
    CHECK(std::string(e.what()).find("4200") != std::string::npos);
  }
}

TEST_CASE("cmd_apen on recorded traces") {
  Scratch s("apen");
  RssTrace flat = random_trace("veh-x", 200, 1);
  for (auto& smp : flat.samples) smp.rss = -60.0;
  save_trace_csv(flat, s.file("flat.csv"));
  const RssTrace noisy = random_trace("veh-y", 1000, 2);
  save_trace_csv(noisy, s.file("noisy.csv"));

  std::ostringstream log;
  // Zero-variance trace gives R = 0, which ApEn rejects.
  CHECK_THROWS_AS(cmd_apen(s.file("flat.csv"), 2, 0.2, 1, log),
                  InvalidArgumentError);
  CHECK(cmd_apen(s.file("noisy.csv"), 2, 0.2, 1, log) > 0.2);
  // Smoothing a random stream lowers its irregularity.
  CHECK(cmd_apen(s.file("noisy.csv"), 2, 0.2, 20, log) <
        cmd_apen(s.file("noisy.csv"), 2, 0.2, 1, log));

  RssTrace tiny = random_trace("veh-z", 3, 3);
  save_trace_csv(tiny, s.file("tiny.csv"));
  CHECK_THROWS_AS(cmd_apen(s.file("tiny.csv"), 2, 0.2, 1, log),
                  InvalidArgumentError);
}
