// harness.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "pof/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pof {

void ExperimentConfig::validate() const {
  world.validate();
  session.validate();
  for (const auto& s : scenarios) s.validate();
  if (seeds.empty()) throw InvalidArgumentError("config needs >= 1 seed");
  if (runs_per_point == 0) {
    throw InvalidArgumentError("runs_per_point must be >= 1");
  }
  if (tune) {
    if (tune->train_fraction <= 0.0 || tune->train_fraction >= 1.0) {
      throw InvalidArgumentError("tune.train_fraction must be in (0, 1)");
    }
    if (tune->legit_files.empty() && tune->pairs == 0) {
      throw InvalidArgumentError("tune needs pairs > 0 or explicit files");
    }
  }
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t line_of_byte(const std::string& path, std::size_t byte) {
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(),
                            text.begin() +
                                static_cast<std::ptrdiff_t>(
                                    std::min(byte, text.size())),
                            '\n'));
}

Vec2 parse_vec2(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) {
    throw InvalidArgumentError(what + " must be a [x, y] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Vec2> parse_points(const json& j, const std::string& what) {
  std::vector<Vec2> out;
  for (const auto& p : j) out.push_back(parse_vec2(p, what));
  return out;
}

void parse_world(const json& j, const std::string& file, WorldSpec* w) {
  if (j.contains("route_file")) {
    const std::string rf = j.at("route_file").get<std::string>();
    if (!fs::exists(rf)) {
      throw InvalidArgumentError(file + ": route file not found: " + rf);
    }
    w->path.clear();
    for (const auto& p : load_route_csv(rf).points()) w->path.push_back(p.pos);
  } else if (j.contains("path")) {
    w->path = parse_points(j.at("path"), "world.path entry");
  }
  if (j.contains("stations")) {
    w->stations = parse_points(j.at("stations"), "world.stations entry");
  }
  w->speed = j.value("speed", w->speed);
  w->duration = j.value("duration", w->duration);
  w->lead_offset = j.value("lead_offset", w->lead_offset);
  w->rate_hz = j.value("rate_hz", w->rate_hz);
  w->small_scale_std = j.value("small_scale_std", w->small_scale_std);
  w->route_jitter = j.value("route_jitter", w->route_jitter);
  w->msg_latency = j.value("msg_latency", w->msg_latency);
  w->clock_offset_bound = j.value("clock_offset_bound", w->clock_offset_bound);
  if (j.contains("path_loss")) {
    const json& p = j.at("path_loss");
    w->path_loss.d0 = p.value("d0", w->path_loss.d0);
    w->path_loss.L_d0 = p.value("L_d0", w->path_loss.L_d0);
    w->path_loss.beta = p.value("beta", w->path_loss.beta);
    w->path_loss.sigma_shadow = p.value("sigma_shadow",
                                        w->path_loss.sigma_shadow);
    w->path_loss.tx_power = p.value("tx_power", w->path_loss.tx_power);
  }
  if (j.contains("shadow")) {
    const json& s = j.at("shadow");
    w->shadow.d_corr = s.value("d_corr", w->shadow.d_corr);
    w->shadow.t_corr = s.value("t_corr", w->shadow.t_corr);
    w->shadow.seed = s.value("seed", w->shadow.seed);
    w->shadow.num_waves = s.value("num_waves", w->shadow.num_waves);
  }
}

void parse_params(const json& j, PofParams* p) {
  p->N = j.value("N", p->N);
  p->M = j.value("M", p->M);
  p->K = j.value("K", p->K);
  p->tau = j.value("tau", p->tau);
  p->alpha = j.value("alpha", p->alpha);
}

void parse_session(const json& j, double world_rate, SessionConfig* s) {
  s->epsilon = j.value("epsilon", s->epsilon);
  s->delta_t = j.value("delta_t", s->delta_t);
  s->rate_hz = j.value("rate_hz", world_rate);
  s->freq_hz = j.value("freq_hz", s->freq_hz);
  s->setup_delay = j.value("setup_delay", s->setup_delay);
  s->sync_error_bound = j.value("sync_error_bound", s->sync_error_bound);
}

Variant parse_variant(const std::string& v) {
  if (v == "known-verifier") return Variant::kKnownVerifier;
  if (v == "commitment") return Variant::kCommitment;
  throw InvalidArgumentError("unknown variant: " + v +
                             " (known-verifier | commitment)");
}

AttackScenario parse_scenario(const json& j) {
  AttackScenario s;
  s.kind = attack_kind_from_string(j.value("kind", std::string("legit")));
  s.variant = parse_variant(j.value("variant", std::string("known-verifier")));
  s.d_ref = j.value("d_ref", s.d_ref);
  s.legit_distance = j.value("legit_distance", s.legit_distance);
  s.adversary_distance = j.value("adversary_distance", s.adversary_distance);
  s.pre_record_lead = j.value("pre_record_lead", s.pre_record_lead);
  s.theta = j.value("theta", s.theta);
  return s;
}

std::vector<std::pair<std::string, std::string>> parse_pair_files(
    const json& j, const std::string& file) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) {
      throw InvalidArgumentError(file +
                                 ": trace pair must be [verifier, candidate]");
    }
    std::pair<std::string, std::string> p{e[0].get<std::string>(),
                                          e[1].get<std::string>()};
    for (const auto& f : {p.first, p.second}) {
      if (!fs::exists(f)) {
        throw InvalidArgumentError(file + ": trace file not found: " + f);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(9) << v;
  return ss.str();
}

std::string verdict_string(const SimReport& r) {
  if (r.abort) return "abort:" + to_string(r.abort->reason);
  if (!r.decision) return "no-verdict";
  return r.decision->accept ? "accept" : "reject";
}

// Constant-gap platoon pair driving the configured road, both traces over one
// full collection window.
struct PairTraces {
  RssTrace v;
  RssTrace c;
};

PairTraces platoon_pair(const WorldSpec& world, double distance,
                        double window_len, std::uint64_t run_seed,
                        double candidate_time_shift = 0.0,
                        double verifier_extra = 0.0) {
  if (world.lead_offset < distance) {
    throw InvalidArgumentError(
        "world.lead_offset must be >= pair distance for direct generation");
  }
  ShadowFieldParams sp = world.shadow;
  sp.seed = mix(world.shadow.seed ^ mix(run_seed));
  const ShadowField field(sp, world.path_loss.sigma_shadow);

  KinematicSpec vs{world.path, world.speed, world.lead_offset, 0.0,
                   world.route_jitter};
  KinematicSpec cs{world.path, world.speed, world.lead_offset - distance,
                   candidate_time_shift, world.route_jitter};
  const Route vr = make_route(vs, window_len + verifier_extra, 0.05,
                              mix(run_seed ^ 11));
  const Route cr = make_route(cs, window_len, 0.05, mix(run_seed ^ 12));
  PairTraces out;
  out.v = generate_rss_trace(vr, world.stations, world.path_loss, field,
                             world.rate_hz, world.small_scale_std,
                             mix(run_seed ^ 13), "verifier");
  out.c = generate_rss_trace(cr, world.stations, world.path_loss, field,
                             world.rate_hz, world.small_scale_std,
                             mix(run_seed ^ 13), "candidate");
  return out;
}

std::vector<double> rhos_from_traces(const RssTrace& v, const RssTrace& c,
                                     const PofParams& params) {
  return correlation_tests(align(v, c), params);
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - r.mean) * (x - r.mean);
  r.stddev = std::sqrt(acc / static_cast<double>(xs.size()));
  return r;
}

void write_sweep_csv(const std::string& out,
                     const std::vector<SweepPoint>& points) {
  std::ofstream o(out);
  if (!o) throw InvalidArgumentError("cannot write sweep output: " + out);
  o << "x,mean,std,n\n";
  for (const auto& p : points) {
    o << fmt(p.x) << ',' << fmt(p.mean) << ',' << fmt(p.stddev) << ','
      << p.n << '\n';
  }
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgumentError(path + ":" +
                               std::to_string(line_of_byte(path, e.byte)) +
                               ": " + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("world")) parse_world(j.at("world"), path, &cfg.world);
    if (j.contains("params")) parse_params(j.at("params"), &cfg.session.params);
    if (j.contains("session")) {
      parse_session(j.at("session"), cfg.world.rate_hz, &cfg.session);
    } else {
      cfg.session.rate_hz = cfg.world.rate_hz;
    }
    if (j.contains("scenarios")) {
      for (const auto& s : j.at("scenarios")) {
        cfg.scenarios.push_back(parse_scenario(s));
      }
    }
    if (j.contains("seeds")) {
      cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    }
    cfg.output = j.value("output", cfg.output);
    cfg.runs_per_point = j.value("runs_per_point", cfg.runs_per_point);
    if (j.contains("tune")) {
      const json& t = j.at("tune");
      TuneSpec ts;
      ts.legit_distance = t.value("legit_distance", ts.legit_distance);
      ts.adversary_distance =
          t.value("adversary_distance", ts.adversary_distance);
      ts.pairs = t.value("pairs", ts.pairs);
      ts.K_max = t.value("K_max", ts.K_max);
      ts.train_fraction = t.value("train_fraction", ts.train_fraction);
      if (t.contains("legit_files")) {
        ts.legit_files = parse_pair_files(t.at("legit_files"), path);
      }
      if (t.contains("adversary_files")) {
        ts.adversary_files = parse_pair_files(t.at("adversary_files"), path);
      }
      cfg.tune = std::move(ts);
    }
  } catch (const json::exception& e) {
    throw InvalidArgumentError(path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

PofParams load_params_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open params file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgumentError(path + ":" +
                               std::to_string(line_of_byte(path, e.byte)) +
                               ": " + e.what());
  }
  PofParams p;
  try {
    parse_params(j.contains("params") ? j.at("params") : j, &p);
  } catch (const json::exception& e) {
    throw InvalidArgumentError(path + ": " + e.what());
  }
  p.validate();
  return p;
}

void cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.scenarios.empty()) {
    throw InvalidArgumentError("simulate: config has no scenarios");
  }
  fs::create_directories(cfg.output);
  std::ofstream agg(fs::path(cfg.output) / "aggregate.csv");
  if (!agg) {
    throw InvalidArgumentError("cannot write aggregate CSV under " +
                               cfg.output);
  }
  agg << "scenario,seed,verdict,mean_rho,passed_count\n";
  for (std::size_t si = 0; si < cfg.scenarios.size(); ++si) {
    const AttackScenario& sc = cfg.scenarios[si];
    for (std::uint64_t seed : cfg.seeds) {
      const SimReport rep = run_simulation(cfg.world, sc, cfg.session, seed);
      json out = {
          {"scenario", to_string(sc.kind)},
          {"seed", seed},
          {"verdict", verdict_string(rep)},
          {"accepted", rep.accepted},
          {"mean_rho", rep.mean_rho},
          {"passed_count", rep.decision ? rep.decision->passed_count : 0},
          {"ground_truth_following", rep.ground_truth_following},
      };
      if (rep.decision) out["rhos"] = rep.decision->rhos;
      if (rep.abort) {
        out["abort"] = {{"reason", to_string(rep.abort->reason)},
                        {"detail", rep.abort->detail}};
      }
      json transcript = json::array();
      for (const auto& e : rep.transcript) {
        transcript.push_back({{"t", e.t},
                              {"src", e.src},
                              {"dst", e.dst},
                              {"type", e.type},
                              {"size", e.size},
                              {"note", e.note}});
      }
      out["transcript"] = std::move(transcript);

      const std::string name = "sim_" + std::to_string(si) + "_" +
                               to_string(sc.kind) + "_" +
                               std::to_string(seed) + ".json";
      std::ofstream of(fs::path(cfg.output) / name);
      of << out.dump(2) << '\n';
      agg << to_string(sc.kind) << ',' << seed << ',' << verdict_string(rep)
          << ',' << fmt(rep.mean_rho) << ','
          << (rep.decision ? rep.decision->passed_count : 0) << '\n';
      log << name << ": " << verdict_string(rep) << '\n';
    }
  }
}

std::vector<double> platoon_rhos(const WorldSpec& world, double distance,
                                 const PofParams& params, std::uint64_t seed,
                                 std::size_t runs) {
  const double window_len =
      static_cast<double>(params.required_samples()) / world.rate_hz;
  std::vector<double> rhos;
  for (std::size_t r = 0; r < runs; ++r) {
    const PairTraces pt =
        platoon_pair(world, distance, window_len, mix(seed + r));
    const auto rs = rhos_from_traces(pt.v, pt.c, params);
    rhos.insert(rhos.end(), rs.begin(), rs.end());
  }
  return rhos;
}

TunedParams cmd_tune(const ExperimentConfig& cfg, std::uint64_t seed,
                     const std::string& out, std::ostream& log) {
  if (!cfg.tune) throw InvalidArgumentError("tune: config lacks a tune block");
  const TuneSpec& ts = *cfg.tune;
  const PofParams& base = cfg.session.params;

  std::vector<double> rho_C, rho_M;
  if (!ts.legit_files.empty() || !ts.adversary_files.empty()) {
    for (const auto& [vf, cf] : ts.legit_files) {
      const auto rs =
          rhos_from_traces(load_trace_csv(vf), load_trace_csv(cf), base);
      rho_C.insert(rho_C.end(), rs.begin(), rs.end());
    }
    for (const auto& [vf, cf] : ts.adversary_files) {
      const auto rs =
          rhos_from_traces(load_trace_csv(vf), load_trace_csv(cf), base);
      rho_M.insert(rho_M.end(), rs.begin(), rs.end());
    }
    if (ts.legit_files.size() < 2 || ts.adversary_files.size() < 2) {
      log << "warning: fewer than 2 trace pairs per class; held-out "
             "estimates will be unstable\n";
    }
  } else {
    if (ts.pairs < 2) {
      log << "warning: fewer than 2 simulated pairs per class; held-out "
             "estimates will be unstable\n";
    }
    rho_C = platoon_rhos(cfg.world, ts.legit_distance, base, mix(seed ^ 0xC),
                         ts.pairs);
    rho_M = platoon_rhos(cfg.world, ts.adversary_distance, base,
                         mix(seed ^ 0xA), ts.pairs);
  }

  auto split = [&](std::vector<double> xs, std::uint64_t salt) {
    std::shuffle(xs.begin(), xs.end(), std::mt19937_64(mix(seed ^ salt)));
    const std::size_t n_train = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(
               ts.train_fraction * static_cast<double>(xs.size()))));
    std::vector<double> train(xs.begin(),
                              xs.begin() + static_cast<std::ptrdiff_t>(
                                               std::min(n_train, xs.size())));
    std::vector<double> test(train.size() < xs.size()
                                 ? xs.begin() + static_cast<std::ptrdiff_t>(
                                                    train.size())
                                 : xs.end(),
                             xs.end());
    if (test.empty()) test = train;  // degenerate small-sample fallback
    return std::pair(train, test);
  };
  const auto [train_C, test_C] = split(rho_C, 0x51);
  const auto [train_M, test_M] = split(rho_M, 0x52);

  const TunedParams tuned = tune(train_C, train_M, ts.K_max);
  const double f_C_hold = estimate_pass_rate(test_C, tuned.tau);
  const double f_M_hold = estimate_pass_rate(test_M, tuned.tau);
  const double F_C_hold = pass_probability(f_C_hold, tuned.K, tuned.alpha);
  const double F_M_hold = pass_probability(f_M_hold, tuned.K, tuned.alpha);

  json j = {{"tau", tuned.tau},       {"K", tuned.K},
            {"alpha", tuned.alpha},   {"eer", tuned.eer},
            {"f_C", tuned.f_C},       {"f_M", tuned.f_M},
            {"holdout", {{"f_C", f_C_hold},
                         {"f_M", f_M_hold},
                         {"F_C", F_C_hold},
                         {"F_M", F_M_hold}}}};
  if (!out.empty()) {
    std::ofstream of(out);
    if (!of) throw InvalidArgumentError("cannot write tuned params: " + out);
    of << j.dump(2) << '\n';
  }
  log << j.dump(2) << '\n';
  return tuned;
}

void cmd_sweep(const ExperimentConfig& cfg, const std::string& kind,
               const std::vector<double>& grid, std::uint64_t seed,
               const std::string& out, std::ostream& log) {
  if (grid.empty()) throw InvalidArgumentError("sweep: empty grid");
  const PofParams& params = cfg.session.params;
  const double window_len =
      static_cast<double>(params.required_samples()) / cfg.world.rate_hz;
  const AttackScenario base_sc =
      cfg.scenarios.empty() ? AttackScenario{} : cfg.scenarios.front();
  std::vector<SweepPoint> points;

  if (kind == "distance") {
    // Mean per-subset correlation of a pair at constant gap x.
    for (double x : grid) {
      std::vector<double> rhos =
          platoon_rhos(cfg.world, x, params, mix(seed ^ 0xD1),
                       cfg.runs_per_point);
      const MeanStd ms = mean_std(rhos);
      points.push_back({x, ms.mean, ms.stddev, rhos.size()});
    }
  } else if (kind == "time-offset") {
    // Same locations revisited x seconds later; index-aligned correlation.
    for (double x : grid) {
      std::vector<double> rhos;
      for (std::size_t r = 0; r < cfg.runs_per_point; ++r) {
        const PairTraces pt = platoon_pair(cfg.world, 0.0, window_len,
                                           mix(seed + 31 * r), x);
        AlignedPair pair;
        pair.a = pt.v.values();
        pair.b = pt.c.values();
        pair.rate = cfg.world.rate_hz;
        const auto rs = correlation_tests(pair, params);
        rhos.insert(rhos.end(), rs.begin(), rs.end());
      }
      const MeanStd ms = mean_std(rhos);
      points.push_back({x, ms.mean, ms.stddev, rhos.size()});
    }
  } else if (kind == "theta") {
    points = partially_following_sweep(cfg.world, base_sc, cfg.session, grid,
                                       cfg.runs_per_point, seed);
  } else if (kind == "delta-t") {
    // Relay of an in-platoon trace re-stamped x seconds late; passing rate.
    for (double x : grid) {
      if (x < 0.0) throw InvalidArgumentError("delta-t grid must be >= 0");
      std::size_t accepted = 0;
      for (std::size_t r = 0; r < cfg.runs_per_point; ++r) {
        const PairTraces pt =
            platoon_pair(cfg.world, base_sc.legit_distance, window_len,
                         mix(seed + 77 * r), 0.0, x);
        const std::size_t shift =
            static_cast<std::size_t>(std::llround(x * cfg.world.rate_hz));
        AlignedPair pair;
        const auto va = pt.v.values();
        pair.a.assign(va.begin() + static_cast<std::ptrdiff_t>(shift),
                      va.end());
        pair.b = pt.c.values();
        const std::size_t n = std::min(pair.a.size(), pair.b.size());
        pair.a.resize(n);
        pair.b.resize(n);
        pair.rate = cfg.world.rate_hz;
        const auto d = decide(correlation_tests(pair, params), params.tau,
                              params.alpha);
        accepted += d.accept ? 1 : 0;
      }
      const double mean =
          static_cast<double>(accepted) /
          static_cast<double>(cfg.runs_per_point);
      points.push_back({x, mean, std::sqrt(mean * (1.0 - mean)),
                        cfg.runs_per_point});
    }
  } else if (kind == "K") {
    // Full-protocol passing rate with K swept, scenario from the config.
    for (double x : grid) {
      const auto K = static_cast<std::size_t>(std::llround(x));
      if (K == 0) throw InvalidArgumentError("K grid must be >= 1");
      SessionConfig sc = cfg.session;
      sc.params.K = K;
      std::size_t accepted = 0;
      for (std::size_t r = 0; r < cfg.runs_per_point; ++r) {
        accepted += run_simulation(cfg.world, base_sc, sc, mix(seed + 7 * r))
                            .accepted
                        ? 1
                        : 0;
      }
      const double mean =
          static_cast<double>(accepted) /
          static_cast<double>(cfg.runs_per_point);
      points.push_back({x, mean, std::sqrt(mean * (1.0 - mean)),
                        cfg.runs_per_point});
    }
  } else {
    throw InvalidArgumentError(
        "unknown sweep kind: " + kind +
        " (distance | time-offset | theta | delta-t | K)");
  }

  write_sweep_csv(out, points);
  log << "wrote " << points.size() << " sweep rows to " << out << '\n';
}

PofDecision cmd_verify_trace(const std::string& verifier_csv,
                             const std::string& candidate_csv,
                             const PofParams& params, const std::string& out,
                             std::ostream& log) {
  const RssTrace tv = load_trace_csv(verifier_csv);
  const RssTrace tc = load_trace_csv(candidate_csv);
  const std::size_t need = params.required_samples();
  for (const auto* t : {&tv, &tc}) {
    if (t->samples.size() < need) {
      throw InvalidArgumentError(
          "trace has " + std::to_string(t->samples.size()) +
          " samples; the configured parameters require " +
          std::to_string(need));
    }
  }
  const auto rhos = correlation_tests(align(tv, tc), params);
  const PofDecision d = decide(rhos, params.tau, params.alpha);

  json j = {{"verdict", d.accept ? "accept" : "reject"},
            {"passed_count", d.passed_count},
            {"required_passes", required_passes(params.alpha, params.K)},
            {"rhos", d.rhos}};
  if (!out.empty()) {
    std::ofstream of(out);
    if (!of) throw InvalidArgumentError("cannot write verdict: " + out);
    of << j.dump(2) << '\n';
  }
  log << j.dump(2) << '\n';
  return d;
}

double cmd_apen(const std::string& trace_csv, std::size_t m, double r_factor,
                std::size_t smooth_window, std::ostream& log) {
  const RssTrace trace = load_trace_csv(trace_csv);
  std::vector<double> xs = trace.values();
  if (smooth_window > 1) xs = moving_average(xs, smooth_window);
  if (xs.size() < m + 2) {
    throw InvalidArgumentError("trace too short for ApEn: need >= " +
                               std::to_string(m + 2) + " smoothed samples");
  }
  const MeanStd ms = mean_std(xs);
  const double R = r_factor * ms.stddev;
  const double apen = approx_entropy(xs, m, R);
  log << std::setprecision(9) << apen << '\n';
  return apen;
}

}  // namespace pof
