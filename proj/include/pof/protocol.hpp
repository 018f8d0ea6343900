// protocol.hpp -- wire messages and the candidate/verifier session state
// machines for both protocol variants.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_PROTOCOL_HPP
#define POF_PROTOCOL_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pof/crypto.hpp"
#include "pof/verify.hpp"

namespace pof {

// ---------------------------------------------------------------------------
// Wire format: length-prefixed envelope {version:1B, msg_type:1B, payload}.
// RSS values travel as little-endian centi-dB int32, timestamps as
// microsecond int64, both length-prefixed, so commitments and signatures
// reproduce bit-exactly across platforms.
// ---------------------------------------------------------------------------

enum class MsgType : std::uint8_t {
  kJoinReq = 1,
  kReply = 2,
  kRssReport = 3,
  kCommit = 4,
  kOpen = 5,
  kBeacon = 6,
  kSealed = 7,  // encrypted envelope carrying a signed inner envelope
};

struct JoinReq {
  std::string id;
  Bytes pk;
  Bytes cert;
};

struct Reply {
  std::string id;
  double start_t = 0.0;  // collection window, seconds
  double end_t = 0.0;
  double freq_hz = 0.0;  // opaque sampling config echoed by both sides
  double rate_hz = 20.0;
};

struct RssReport {
  std::string id;
  RssTrace trace;
};

struct CommitMsg {
  Bytes c;
};

struct OpenMsg {
  std::string id;
  RssTrace trace;
  Bytes r;
};

struct Beacon {
  std::string id;
  Bytes pk;
  Bytes cert;
};

using Message =
    std::variant<JoinReq, Reply, RssReport, CommitMsg, OpenMsg, Beacon>;

MsgType message_type(const Message& m);

// Canonical (bit-exact) trace serialization used in reports, commitments and
// signatures.
Bytes serialize_trace(const RssTrace& trace);
RssTrace deserialize_trace(const Bytes& data, std::size_t* offset);

// Inner envelope: [len u32][version][type][payload].
Bytes encode_message(const Message& m);
Message decode_message(const Bytes& wire);

// Sign-inner / encrypt-outer layering.
Bytes seal(const Message& m, const Bytes& sender_sk,
           const Bytes& recipient_pk, CryptoProvider& crypto);
Bytes seal_plain(const Message& m);

struct SignedMessage {
  Message msg;
  Bytes sig;
  Bytes inner;  // the signed bytes
};

// Decrypts and parses; nullopt on decryption failure or malformed payload.
// Signature is returned unverified -- the session checks it against the pk
// the protocol requires.
std::optional<SignedMessage> unseal(const Bytes& wire, const Bytes& own_sk,
                                    CryptoProvider& crypto);

// Re-wraps an already-signed inner envelope for a different recipient without
// touching the signature. Used by man-in-the-middle actors in simulations.
Bytes reencrypt_signed(const Bytes& sig, const Bytes& inner,
                       const Bytes& recipient_pk, CryptoProvider& crypto);
std::optional<Message> parse_plain(const Bytes& wire);
MsgType peek_type(const Bytes& wire);

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

enum class Variant {
  kKnownVerifier,  // four-phase protocol, verifier identity preloaded
  kCommitment,     // discovery + commit/delayed-open variant
};

enum class AbortReason {
  kProtocolViolation,
  kAuthFailure,
  kBindingFailure,
  kStaleCommit,
};

std::string to_string(AbortReason r);

struct AbortInfo {
  AbortReason reason;
  std::string detail;
};

struct SessionConfig {
  PofParams params;
  double epsilon = 0.5;      // timing slack, s
  double delta_t = 3.0;      // commitment opening delay, s
  double rate_hz = 20.0;
  double freq_hz = 1.972e9;
  double setup_delay = 1.0;  // reply -> collection start, s
  double sync_error_bound = 0.05;

  void validate() const;
  double window_length() const;
};

// true iff the commitment arrived within epsilon of the last verifier RSS
// sample (strict inequality).
bool timing_check(double t_commit, double t_v_last, double epsilon);

struct StepResult {
  std::vector<Bytes> outbound;
  // Request to the harness: collect RSS over [first, second].
  std::optional<std::pair<double, double>> collect_window;
  std::optional<double> timer_at;
  std::optional<PofDecision> verdict;
  std::optional<AbortInfo> abort;
};

class CandidateSession {
 public:
  enum class State {
    kIdle,
    kAwaitBeacon,
    kAwaitReply,
    kCollecting,
    kAwaitOpenTimer,
    kDone,
    kAborted,
  };

  CandidateSession(Variant variant, Identity self, Bytes sk, Bytes ca_pk,
                   std::optional<Identity> known_verifier,
                   SessionConfig config, CryptoProvider& crypto);

  StepResult on_start(double t);
  StepResult on_message(const Bytes& wire, double t);
  StepResult on_collection_complete(const RssTrace& trace, double t);
  StepResult on_timer(double t);

  State state() const { return state_; }
  const std::optional<AbortInfo>& abort_info() const { return abort_; }

 private:
  StepResult fail(AbortReason reason, const std::string& detail);
  StepResult send_join_request();

  Variant variant_;
  Identity self_;
  Bytes sk_;
  Bytes ca_pk_;
  std::optional<Identity> verifier_;
  SessionConfig config_;
  CryptoProvider& crypto_;
  State state_ = State::kIdle;
  std::optional<AbortInfo> abort_;
  RssTrace collected_;
  Bytes nonce_;
};

class VerifierSession {
 public:
  enum class State {
    kIdle,
    kAwaitReport,
    kAwaitCommit,
    kAwaitOpen,
    kDone,
    kAborted,
  };

  VerifierSession(Variant variant, Identity self, Bytes sk, Bytes ca_pk,
                  SessionConfig config, CryptoProvider& crypto);

  // Variant B: emits the discovery beacon.
  StepResult on_start(double t);
  StepResult on_message(const Bytes& wire, double t);
  StepResult on_collection_complete(const RssTrace& trace, double t);

  State state() const { return state_; }
  const std::optional<AbortInfo>& abort_info() const { return abort_; }
  const std::optional<Identity>& candidate() const { return candidate_; }
  const std::optional<std::pair<double, double>>& window() const {
    return window_;
  }

 private:
  StepResult fail(AbortReason reason, const std::string& detail);
  StepResult try_verdict();

  Variant variant_;
  Identity self_;
  Bytes sk_;
  Bytes ca_pk_;
  SessionConfig config_;
  CryptoProvider& crypto_;
  State state_ = State::kIdle;
  std::optional<AbortInfo> abort_;
  std::optional<Identity> candidate_;
  std::optional<std::pair<double, double>> window_;
  std::optional<RssTrace> own_trace_;
  std::optional<RssTrace> reported_trace_;
  std::optional<Bytes> commitment_;
  double t_commit_ = 0.0;
};

// Offline continuous verification: one verdict per (K+1)*N/2-sample window;
// stops after the first reject (membership revoked). Windows that fail to
// align (stream gaps) are skipped with a diagnostic.
std::vector<PofDecision> continuous_verification(
    const RssTrace& verifier_trace, const RssTrace& candidate_trace,
    const PofParams& params, std::vector<std::string>* diagnostics = nullptr);

}  // namespace pof

#endif  // POF_PROTOCOL_HPP
