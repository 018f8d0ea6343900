// simnet.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>

namespace pof {

void WorldSpec::validate() const {
  if (path.size() < 2) throw InvalidArgumentError("world path needs >= 2 vertices");
  if (speed <= 0.0) throw InvalidArgumentError("world speed must be > 0");
  if (duration <= 0.0) throw InvalidArgumentError("world duration must be > 0");
  if (stations.empty()) throw InvalidArgumentError("world needs >= 1 station");
  if (rate_hz <= 0.0) throw InvalidArgumentError("world rate must be > 0");
  if (msg_latency < 0.0) throw InvalidArgumentError("latency must be >= 0");
  path_loss.validate();
  shadow.validate();
}

void AttackScenario::validate() const {
  if (theta < 0.0 || theta > 1.0) {
    throw InvalidArgumentError("theta must be in [0, 1]");
  }
  if (d_ref <= 0.0) throw InvalidArgumentError("d_ref must be > 0");
  if ((kind == AttackKind::kFollowingAfar ||
       kind == AttackKind::kPartiallyFollowing) &&
      adversary_distance <= d_ref) {
    throw InvalidArgumentError(
        "following-afar adversary distance must exceed d_ref");
  }
  if ((kind == AttackKind::kMitmParallel ||
       kind == AttackKind::kMitmDelayed) &&
      variant != Variant::kCommitment) {
    throw InvalidArgumentError(
        "parallel/delayed MiTM scenarios require the commitment variant");
  }
  if (kind == AttackKind::kMitmKnown && variant != Variant::kKnownVerifier) {
    throw InvalidArgumentError(
        "the known-verifier MiTM scenario requires the known-verifier variant");
  }
}

std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::kNone: return "legit";
    case AttackKind::kRemote: return "remote";
    case AttackKind::kFollowingAfar: return "following-afar";
    case AttackKind::kPartiallyFollowing: return "partially-following";
    case AttackKind::kMitmKnown: return "mitm-known";
    case AttackKind::kMitmParallel: return "mitm-parallel";
    case AttackKind::kMitmDelayed: return "mitm-delayed";
  }
  return "unknown";
}

AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "legit" || s == "none") return AttackKind::kNone;
  if (s == "remote") return AttackKind::kRemote;
  if (s == "following-afar") return AttackKind::kFollowingAfar;
  if (s == "partially-following") return AttackKind::kPartiallyFollowing;
  if (s == "mitm-known") return AttackKind::kMitmKnown;
  if (s == "mitm-parallel") return AttackKind::kMitmParallel;
  if (s == "mitm-delayed") return AttackKind::kMitmDelayed;
  throw InvalidArgumentError("unknown attack kind: " + s);
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// ---------------------------------------------------------------------------
// Event loop
// ---------------------------------------------------------------------------

struct Event {
  double t = 0.0;
  std::uint64_t seq = 0;
  std::function<void(double)> fn;
};

struct EventOrder {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;  // FIFO among equal-time events
  }
};

struct Party {
  std::function<void(const Bytes&, double)> on_message;
};

class Sim {
 public:
  explicit Sim(double latency) : latency_(latency) {}

  // hook(src, dst, payload, t) -> actions; empty means plain relay.
  std::function<std::vector<AdversaryAction>(const std::string&,
                                             const std::string&,
                                             const Bytes&, double)>
      hook;

  std::map<std::string, Party> parties;
  std::vector<TranscriptEntry> transcript;

  void at(double t, std::function<void(double)> fn) {
    queue_.push({t, seq_++, std::move(fn)});
  }

  void deliver(const std::string& dst, Bytes payload, double t) {
    at(t, [this, dst, payload = std::move(payload)](double now) {
      auto it = parties.find(dst);
      if (it != parties.end()) it->second.on_message(payload, now);
    });
  }

  void send(const std::string& src, const std::string& dst,
            const Bytes& payload, double t, const std::string& note = {}) {
    TranscriptEntry e;
    e.t = t;
    e.src = src;
    e.dst = dst;
    e.size = payload.size();
    try {
      e.type = std::to_string(static_cast<int>(peek_type(payload)));
    } catch (const Error&) {
      e.type = "?";
    }
    e.note = note;

    std::vector<AdversaryAction> actions;
    if (hook) actions = hook(src, dst, payload, t);
    if (actions.empty()) actions.push_back({AdversaryAction::kRelay});
    for (const auto& a : actions) {
      switch (a.kind) {
        case AdversaryAction::kRelay:
          deliver(dst, payload, t + latency_);
          break;
        case AdversaryAction::kDelay:
          deliver(dst, payload, t + latency_ + a.delay);
          e.note += "[delayed]";
          break;
        case AdversaryAction::kDrop:
          e.note += "[dropped]";
          break;
        case AdversaryAction::kInject:
          deliver(a.dst, a.payload, t + latency_);
          e.note += "[injected->" + a.dst + "]";
          break;
        case AdversaryAction::kRecord:
          e.note += "[recorded]";
          break;
      }
    }
    transcript.push_back(std::move(e));
  }

  void run() {
    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      e.fn(e.t);
    }
  }

 private:
  double latency_;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
};

// ---------------------------------------------------------------------------
// Kinematics helpers
// ---------------------------------------------------------------------------

// Verifier motion extended backward in time so followers at any lag can be
// interpolated.
Route base_route(const WorldSpec& w, double back_span) {
  KinematicSpec spec;
  spec.path = w.path;
  spec.speed = w.speed;
  spec.start_offset = std::max(0.0, w.lead_offset - back_span * w.speed);
  spec.start_time = -back_span;
  return make_route(spec, w.duration + back_span, 0.05, 0);
}

// Follower whose gap (meters behind the base vehicle) is gap_of(t).
Route follower_route(const Route& base, const WorldSpec& w,
                     const std::function<double(double)>& gap_of,
                     double jitter, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, jitter);
  std::vector<RoutePoint> pts;
  const auto steps = static_cast<std::size_t>(w.duration / 0.05);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * 0.05;
    const double lag = gap_of(t) / w.speed;
    Vec2 p = base.position_at(
        std::clamp(t - lag, base.start_time(), base.end_time()));
    if (jitter > 0.0) {
      p.x += noise(rng);
      p.y += noise(rng);
    }
    pts.push_back({t, p});
  }
  return Route(std::move(pts), 1e9);  // gap ramps may exceed road speed
}

Route static_route(const Vec2& pos, double t0, double t1) {
  return Route({{t0, pos}, {t1, pos}}, 1.0);
}

// Dense sub-route over [lo, hi] used as the collection-window drive.
Route slice_route(const Route& r, double lo, double hi) {
  std::vector<RoutePoint> pts;
  const auto steps = static_cast<std::size_t>((hi - lo) / 0.05);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = lo + static_cast<double>(i) * 0.05;
    pts.push_back(
        {t, r.position_at(std::clamp(t, r.start_time(), r.end_time()))});
  }
  return Route(std::move(pts), 1e9);
}

RssTrace stamp_clock(RssTrace trace, double clock_offset) {
  for (auto& s : trace.samples) s.t += clock_offset;
  return trace;
}

}  // namespace

// ---------------------------------------------------------------------------
// run_simulation
// ---------------------------------------------------------------------------

SimReport run_simulation(const WorldSpec& world,
                         const AttackScenario& scenario,
                         const SessionConfig& config, std::uint64_t seed) {
  world.validate();
  scenario.validate();
  config.validate();
  if (config.window_length() + config.setup_delay + config.delta_t + 5.0 >
      world.duration) {
    throw InvalidArgumentError(
        "world duration too short for one PoF round (needs about " +
        std::to_string(config.window_length() + config.setup_delay +
                       config.delta_t + 5.0) +
        " s)");
  }

  ToyCryptoProvider crypto(mix64(seed ^ 0xc0ffee));
  const KeyPair ca = crypto.generate_keypair("ca");
  auto make_identity = [&](const std::string& id) {
    const KeyPair kp = crypto.generate_keypair(id);
    return std::pair<Identity, Bytes>(
        Identity{id, kp.pk, issue_certificate(crypto, ca.sk, id, kp.pk)},
        kp.sk);
  };
  auto [vid, v_sk] = make_identity("verifier");
  auto [cid, c_sk] = make_identity("candidate");
  auto [mid, m_sk] = make_identity("mallory");

  std::mt19937_64 clock_rng(mix64(seed ^ 0x5eed));
  std::uniform_real_distribution<double> offs(-world.clock_offset_bound,
                                              world.clock_offset_bound);
  const double o_v = offs(clock_rng);
  const double o_c = offs(clock_rng);
  const double o_m = offs(clock_rng);

  ShadowFieldParams shadow = world.shadow;
  shadow.seed = mix64(world.shadow.seed ^ mix64(seed));
  const ShadowField field(shadow, world.path_loss.sigma_shadow);

  const double back_span = 60.0;
  const Route base = base_route(world, back_span);
  const Route verifier_route = follower_route(
      base, world, [](double) { return 0.0; }, world.route_jitter,
      mix64(seed ^ 1));

  // Predicted collection window, used only to shape the partial adversary's
  // gap profile.
  const double predicted_start =
      2.0 * world.msg_latency + config.setup_delay +
      (scenario.variant == Variant::kCommitment ? world.msg_latency : 0.0);
  const double window_len = config.window_length();

  std::function<double(double)> actor_gap;
  switch (scenario.kind) {
    case AttackKind::kNone:
    case AttackKind::kRemote:  // claimed kinematics; real ones are remote
    case AttackKind::kMitmKnown:     // honest candidate, jammed wire
    case AttackKind::kMitmParallel:  // honest candidate, spoofed verifier
    case AttackKind::kMitmDelayed:
      actor_gap = [&](double) { return scenario.legit_distance; };
      break;
    case AttackKind::kFollowingAfar:
      actor_gap = [&](double) { return scenario.adversary_distance; };
      break;
    case AttackKind::kPartiallyFollowing: {
      const double t_switch = predicted_start + scenario.theta * window_len;
      const double ramp = 10.0;  // s to fall back from near to far
      actor_gap = [&, t_switch](double t) {
        if (scenario.theta >= 1.0 || t < t_switch) {
          return scenario.legit_distance;
        }
        const double w = std::min(1.0, (t - t_switch) / ramp);
        return scenario.legit_distance +
               w * (scenario.adversary_distance - scenario.legit_distance);
      };
      break;
    }
  }

  const Route legit_follower = follower_route(
      base, world, [&](double) { return scenario.legit_distance; },
      world.route_jitter, mix64(seed ^ 2));
  const Route actor_route = follower_route(base, world, actor_gap,
                                           world.route_jitter,
                                           mix64(seed ^ 3));
  const Route adversary_route = follower_route(
      base, world, [&](double) { return scenario.adversary_distance; },
      world.route_jitter, mix64(seed ^ 4));

  // Trace sources, all in true time; clock offsets are stamped afterwards.
  auto collect = [&](const Route& r, double lo, double hi,
                     const std::string& id) {
    return generate_rss_trace(slice_route(r, lo, hi), world.stations,
                              world.path_loss, field, world.rate_hz,
                              world.small_scale_std, mix64(seed ^ 7), id);
  };
  // Remote adversary: RSS recorded on the claimed positions but
  // pre_record_lead seconds in the past, replayed with fresh timestamps.
  auto collect_prerecorded = [&](double lo, double hi,
                                 const std::string& id) {
    Route claimed = slice_route(actor_route, lo, hi);
    std::vector<RoutePoint> shifted;
    for (const auto& p : claimed.points()) {
      shifted.push_back({p.t - scenario.pre_record_lead, p.pos});
    }
    RssTrace tr = generate_rss_trace(Route(std::move(shifted), 1e9),
                                     world.stations, world.path_loss, field,
                                     world.rate_hz, world.small_scale_std,
                                     mix64(seed ^ 7), id);
    for (auto& s : tr.samples) s.t += scenario.pre_record_lead;
    return tr;
  };

  Sim sim(world.msg_latency);
  SimReport report;

  // --- Verifier ------------------------------------------------------------
  VerifierSession verifier(scenario.variant, vid, v_sk, ca.pk, config,
                           crypto);
  std::optional<std::pair<double, double>> v_window;

  std::function<void(const StepResult&, double)> apply_verifier;
  auto verifier_out = [&](const Bytes& b, double t) {
    const std::string dst =
        verifier.candidate() ? verifier.candidate()->id : std::string("*");
    if (dst == "*") {
      for (const auto& [pid, _] : sim.parties) {
        if (pid != "verifier") sim.send("verifier", pid, b, t);
      }
    } else {
      sim.send("verifier", dst, b, t);
    }
  };
  apply_verifier = [&](const StepResult& r, double t) {
    for (const auto& b : r.outbound) verifier_out(b, t);
    if (r.collect_window) {
      v_window = {r.collect_window->first - o_v,
                  r.collect_window->second - o_v};  // local -> true
      sim.at(v_window->second, [&](double now) {
        RssTrace tr = stamp_clock(
            collect(verifier_route, v_window->first, v_window->second,
                    "verifier"),
            o_v);
        apply_verifier(verifier.on_collection_complete(tr, now + o_v), now);
      });
    }
    if (r.verdict) report.decision = *r.verdict;
    if (r.abort) report.abort = *r.abort;
  };

  // --- Honest / adversarial candidate actor --------------------------------
  const bool actor_is_adversary = scenario.kind == AttackKind::kRemote ||
                                  scenario.kind == AttackKind::kFollowingAfar ||
                                  scenario.kind ==
                                      AttackKind::kPartiallyFollowing;
  const Identity actor_id = actor_is_adversary ? mid : cid;
  const Bytes actor_sk = actor_is_adversary ? m_sk : c_sk;
  const double actor_clock = actor_is_adversary ? o_m : o_c;

  CandidateSession candidate(
      scenario.variant, actor_id, actor_sk, ca.pk,
      scenario.variant == Variant::kKnownVerifier
          ? std::optional<Identity>(vid)
          : std::nullopt,
      config, crypto);

  std::function<void(const StepResult&, double)> apply_candidate;
  apply_candidate = [&](const StepResult& r, double t) {
    for (const auto& b : r.outbound) sim.send(actor_id.id, "verifier", b, t);
    if (r.collect_window) {
      const double lo = r.collect_window->first - actor_clock;
      const double hi = r.collect_window->second - actor_clock;
      sim.at(hi, [&, lo, hi](double now) {
        RssTrace tr =
            scenario.kind == AttackKind::kRemote
                ? collect_prerecorded(lo, hi, actor_id.id)
                : collect(actor_route, lo, hi, actor_id.id);
        apply_candidate(candidate.on_collection_complete(
                            stamp_clock(std::move(tr), actor_clock),
                            now + actor_clock),
                        now);
      });
    }
    if (r.timer_at) {
      sim.at(*r.timer_at - actor_clock, [&](double now) {
        apply_candidate(candidate.on_timer(now + actor_clock), now);
      });
    }
  };

  sim.parties["verifier"] = {[&](const Bytes& b, double t) {
    apply_verifier(verifier.on_message(b, t + o_v), t);
  }};
  sim.parties[actor_id.id] = {[&](const Bytes& b, double t) {
    apply_candidate(candidate.on_message(b, t + actor_clock), t);
  }};

  // --- MiTM actors ----------------------------------------------------------
  const bool is_mitm = scenario.kind == AttackKind::kMitmKnown ||
                       scenario.kind == AttackKind::kMitmParallel ||
                       scenario.kind == AttackKind::kMitmDelayed;

  // mitm-known: a full candidate session for Mallory, fed by real-time far
  // RSS, while the honest candidate's wire traffic is jammed.
  std::optional<CandidateSession> mallory_session;
  std::function<void(const StepResult&, double)> apply_mallory;
  if (scenario.kind == AttackKind::kMitmKnown) {
    mallory_session.emplace(Variant::kKnownVerifier, mid, m_sk, ca.pk,
                            std::optional<Identity>(vid), config, crypto);
    apply_mallory = [&](const StepResult& r, double t) {
      for (const auto& b : r.outbound) sim.send("mallory", "verifier", b, t);
      if (r.collect_window) {
        const double lo = r.collect_window->first - o_m;
        const double hi = r.collect_window->second - o_m;
        sim.at(hi, [&, lo, hi](double now) {
          apply_mallory(mallory_session->on_collection_complete(
                            stamp_clock(collect(adversary_route, lo, hi,
                                                "mallory"),
                                        o_m),
                            now + o_m),
                        now);
        });
      }
    };
    sim.parties["mallory"] = {[&](const Bytes& b, double t) {
      // Jammed candidate traffic is sealed to the verifier's key and cannot
      // be read; only messages addressed to Mallory reach the session.
      auto sm = unseal(b, m_sk, crypto);
      if (!sm) return;
      if (std::holds_alternative<Reply>(sm->msg)) {
        // Relay the reply onward (re-encrypted) so the honest candidate
        // keeps collecting and reporting into the jammed wire.
        sim.send("mallory", "candidate",
                 reencrypt_signed(sm->sig, sm->inner, cid.pk, crypto), t,
                 "spoofed-relay");
      }
      apply_mallory(mallory_session->on_message(b, t + o_m), t);
    }};
  }

  // mitm-parallel / mitm-delayed: bespoke actor speaking the commitment
  // variant on both faces.
  struct MalloryState {
    std::optional<std::pair<double, double>> c_window;  // window given to C
    std::optional<RssTrace> gamma_c;
    Bytes open_nonce;
  };
  MalloryState mstate;
  if (scenario.kind == AttackKind::kMitmParallel ||
      scenario.kind == AttackKind::kMitmDelayed) {
    sim.parties["mallory"] = {[&](const Bytes& b, double t) {
      // Face toward the candidate: spoofed verifier.
      if (auto sm = unseal(b, m_sk, crypto)) {
        if (std::holds_alternative<JoinReq>(sm->msg)) {
          const double start = t + o_m + config.setup_delay;
          mstate.c_window = {start, start + config.window_length()};
          sim.send("mallory", "candidate",
                   seal(Reply{mid.id, mstate.c_window->first,
                              mstate.c_window->second, config.freq_hz,
                              config.rate_hz},
                        m_sk, cid.pk, crypto),
                   t, "spoofed-reply");
          if (scenario.kind == AttackKind::kMitmParallel) {
            // Parallel session with the verifier right away.
            sim.send("mallory", "verifier",
                     seal(JoinReq{mid.id, mid.pk, mid.cert}, m_sk, vid.pk,
                          crypto),
                     t);
          } else {
            // Delay the verifier-facing session by delta_t so the timing
            // check will pass.
            const double join_at = mstate.c_window->first + config.delta_t -
                                   config.setup_delay - world.msg_latency;
            sim.at(join_at, [&](double now) {
              sim.send("mallory", "verifier",
                       seal(JoinReq{mid.id, mid.pk, mid.cert}, m_sk, vid.pk,
                            crypto),
                       now);
            });
          }
          return;
        }
        if (std::holds_alternative<CommitMsg>(sm->msg)) {
          return;  // hiding: nothing useful can be done with c
        }
        if (std::holds_alternative<OpenMsg>(sm->msg)) {
          const auto& open = std::get<OpenMsg>(sm->msg);
          mstate.gamma_c = open.trace;
          RssTrace forged = open.trace;
          if (scenario.kind == AttackKind::kMitmDelayed) {
            for (auto& s : forged.samples) s.t += config.delta_t;
          }
          forged.vehicle_id = mid.id;
          mstate.open_nonce = crypto.nonce();
          Bytes payload = serialize_trace(forged);
          payload.insert(payload.end(), mid.id.begin(), mid.id.end());
          const Bytes c = crypto.commit(payload, mstate.open_nonce);
          sim.send("mallory", "verifier",
                   seal(CommitMsg{c}, m_sk, vid.pk, crypto), t,
                   "forged-commit");
          sim.send("mallory", "verifier",
                   seal(OpenMsg{mid.id, forged, mstate.open_nonce}, m_sk,
                        vid.pk, crypto),
                   t + 2.0 * world.msg_latency, "forged-open");
          return;
        }
        // Replies from the verifier need no action: windows were scheduled
        // when the join request went out.
      }
    }};
  }

  // --- Wire hook ------------------------------------------------------------
  sim.hook = [&](const std::string& src, const std::string& dst,
                 const Bytes&, double) -> std::vector<AdversaryAction> {
    if (!is_mitm) return {};  // transparent wire
    if (src == "candidate") {
      // Reactive jamming: everything the honest candidate sends toward the
      // real verifier is redirected to Mallory.
      if (dst == "verifier") {
        AdversaryAction inject{AdversaryAction::kInject};
        inject.dst = "mallory";
        // payload forwarding handled below via kInject in send()
        return {{AdversaryAction::kDrop}, inject};
      }
      return {};
    }
    if (src == "verifier" && dst == "candidate") {
      // Beacon / reply jammed away from the honest candidate.
      return {{AdversaryAction::kDrop}, {AdversaryAction::kRecord}};
    }
    return {};
  };

  // Fix up: kInject above needs the payload; wrap the hook to fill it in.
  auto raw_hook = sim.hook;
  sim.hook = [raw_hook](const std::string& src, const std::string& dst,
                        const Bytes& payload, double t) {
    auto actions = raw_hook(src, dst, payload, t);
    for (auto& a : actions) {
      if (a.kind == AdversaryAction::kInject && a.payload.empty()) {
        a.payload = payload;
      }
    }
    return actions;
  };

  // --- Kickoff --------------------------------------------------------------
  sim.at(0.0, [&](double t) { apply_verifier(verifier.on_start(t + o_v), t); });
  if (is_mitm && scenario.kind != AttackKind::kMitmKnown) {
    // Mallory spoofs a discovery beacon to the honest candidate.
    sim.at(0.005, [&](double t) {
      sim.send("mallory", "candidate",
               seal_plain(Beacon{mid.id, mid.pk, mid.cert}), t,
               "spoofed-beacon");
    });
  }
  sim.at(0.01, [&](double t) {
    apply_candidate(candidate.on_start(t + actor_clock), t);
  });
  if (scenario.kind == AttackKind::kMitmKnown) {
    sim.at(0.012, [&](double t) {
      apply_mallory(mallory_session->on_start(t + o_m), t);
    });
  }

  sim.run();

  // --- Report ---------------------------------------------------------------
  report.transcript = std::move(sim.transcript);
  report.accepted = report.decision && report.decision->accept;
  if (report.decision && !report.decision->rhos.empty()) {
    double acc = 0.0;
    for (double r : report.decision->rhos) acc += r;
    report.mean_rho = acc / static_cast<double>(report.decision->rhos.size());
  }
  // Ground truth over the verifier's collection window: the kinematics of
  // whichever party the verifier would admit.
  if (v_window) {
    const Route& truth_route =
        is_mitm ? adversary_route
                : (scenario.kind == AttackKind::kRemote
                       ? static_route({-5000.0, -5000.0}, -back_span,
                                      world.duration)
                       : actor_route);
    const double lo = std::max({v_window->first, verifier_route.start_time(),
                                truth_route.start_time()});
    const double hi = std::min({v_window->second, verifier_route.end_time(),
                                truth_route.end_time()});
    if (lo < hi) {
      Route vw = slice_route(verifier_route, lo, hi);
      Route cw = slice_route(truth_route, lo, hi);
      report.ground_truth_following =
          is_following(vw, cw, scenario.d_ref).following;
    }
  }
  return report;
}

std::vector<SweepPoint> partially_following_sweep(
    const WorldSpec& world, const AttackScenario& base,
    const SessionConfig& config, const std::vector<double>& thetas,
    std::size_t runs_per_point, std::uint64_t seed) {
  std::vector<SweepPoint> curve;
  for (double theta : thetas) {
    AttackScenario s = base;
    s.kind = AttackKind::kPartiallyFollowing;
    s.theta = theta;
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t r = 0; r < runs_per_point; ++r) {
      const SimReport rep =
          run_simulation(world, s, config, mix64(seed + 1000 * r) ^ r);
      const double v = rep.accepted ? 1.0 : 0.0;
      acc += v;
      acc2 += v * v;
    }
    const double n = static_cast<double>(runs_per_point);
    const double mean = acc / n;
    curve.push_back({theta, mean,
                     std::sqrt(std::max(0.0, acc2 / n - mean * mean)),
                     runs_per_point});
  }
  return curve;
}

}  // namespace pof
