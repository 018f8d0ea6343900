// simnet.hpp -- deterministic discrete-event network binding sessions,
// channel traces, and adversary actors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_SIMNET_HPP
#define POF_SIMNET_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pof/protocol.hpp"

namespace pof {

// The road, the channel, and the shared collection parameters of one run.
struct WorldSpec {
  std::vector<Vec2> path = {{0.0, 0.0}, {20000.0, 0.0}};  // road polyline, m
  double speed = 13.3;            // m/s
  double duration = 260.0;        // s of simulated driving
  double lead_offset = 500.0;     // verifier start arc-offset along the path
  std::vector<Vec2> stations = {{0.0, 400.0}, {2000.0, -400.0},
                                {4000.0, 400.0}, {6000.0, -400.0}};
  PathLossParams path_loss;
  ShadowFieldParams shadow;
  double small_scale_std = 4.0;
  double rate_hz = 20.0;
  double route_jitter = 0.0;      // positional noise std, m
  double msg_latency = 0.01;      // s
  double clock_offset_bound = 0.05;  // s, uniform per party

  void validate() const;
};

enum class AttackKind {
  kNone,               // honest candidate, transparent wire
  kRemote,             // replays a trace pre-recorded on the route
  kFollowingAfar,      // real-time collection beyond d_ref
  kPartiallyFollowing, // within d_ref for a fraction theta of the window
  kMitmKnown,          // Dolev-Yao MiTM, verifier identity known (variant A)
  kMitmParallel,       // MiTM with parallel sessions (variant B)
  kMitmDelayed,        // MiTM delaying the verifier session by delta_t
};

std::string to_string(AttackKind k);
AttackKind attack_kind_from_string(const std::string& s);

struct AttackScenario {
  AttackKind kind = AttackKind::kNone;
  Variant variant = Variant::kKnownVerifier;
  double d_ref = 25.0;           // following distance bound, m
  double legit_distance = 11.0;  // honest candidate separation, m
  double adversary_distance = 90.0;  // afar/MiTM adversary separation, m
  double pre_record_lead = 60.0;     // s, remote adversary
  double theta = 0.0;                // partial adversary following fraction

  void validate() const;
};

struct TranscriptEntry {
  double t = 0.0;
  std::string src;
  std::string dst;
  std::string type;
  std::size_t size = 0;
  std::string note;  // adversary action, if any
};

struct SimReport {
  bool accepted = false;
  std::optional<PofDecision> decision;
  std::optional<AbortInfo> abort;   // verifier-side abort, if any
  bool ground_truth_following = false;
  double mean_rho = 0.0;
  std::vector<TranscriptEntry> transcript;
};

// Adversary wire actions, exposed for the passive/bespoke hooks.
struct AdversaryAction {
  enum Kind { kDrop, kRelay, kDelay, kInject, kRecord } kind = kRelay;
  double delay = 0.0;   // for kDelay
  Bytes payload;        // for kInject
  std::string dst;      // for kInject
};

// Executes one full PoF run under the given scenario. Deterministic in
// (world, scenario, config, seed).
SimReport run_simulation(const WorldSpec& world, const AttackScenario& scenario,
                         const SessionConfig& config, std::uint64_t seed);

struct SweepPoint {
  double x = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

// Mean PoF passing rate of the partially-following adversary per theta.
std::vector<SweepPoint> partially_following_sweep(
    const WorldSpec& world, const AttackScenario& base,
    const SessionConfig& config, const std::vector<double>& thetas,
    std::size_t runs_per_point, std::uint64_t seed);

}  // namespace pof

#endif  // POF_SIMNET_HPP
