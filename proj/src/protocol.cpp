// protocol.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/protocol.hpp"

#include <cmath>
#include <cstring>

namespace pof {

namespace {

constexpr std::uint8_t kWireVersion = 1;

void put_u32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_i32(Bytes& b, std::int32_t v) { put_u32(b, static_cast<std::uint32_t>(v)); }
void put_i64(Bytes& b, std::int64_t v) { put_u64(b, static_cast<std::uint64_t>(v)); }

void put_f64(Bytes& b, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(b, bits);
}

void put_bytes(Bytes& b, const Bytes& v) {
  put_u32(b, static_cast<std::uint32_t>(v.size()));
  b.insert(b.end(), v.begin(), v.end());
}

void put_string(Bytes& b, const std::string& v) {
  put_u32(b, static_cast<std::uint32_t>(v.size()));
  b.insert(b.end(), v.begin(), v.end());
}

class Reader {
 public:
  Reader(const Bytes& data, std::size_t offset = 0)
      : data_(data), pos_(offset) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }

  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  Bytes bytes() {
    const std::uint32_t n = u32();
    need(n);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }

  std::string string() {
    const Bytes b = bytes();
    return std::string(b.begin(), b.end());
  }

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) {
    if (pos_ + n > data_.size()) {
      throw InvalidArgumentError("truncated wire message");
    }
  }

  const Bytes& data_;
  std::size_t pos_;
};

}  // namespace

MsgType message_type(const Message& m) {
  return std::visit(
      [](const auto& v) -> MsgType {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, JoinReq>) return MsgType::kJoinReq;
        if constexpr (std::is_same_v<T, Reply>) return MsgType::kReply;
        if constexpr (std::is_same_v<T, RssReport>) return MsgType::kRssReport;
        if constexpr (std::is_same_v<T, CommitMsg>) return MsgType::kCommit;
        if constexpr (std::is_same_v<T, OpenMsg>) return MsgType::kOpen;
        if constexpr (std::is_same_v<T, Beacon>) return MsgType::kBeacon;
      },
      m);
}

Bytes serialize_trace(const RssTrace& trace) {
  Bytes out;
  put_string(out, trace.vehicle_id);
  put_f64(out, trace.rate);
  put_u32(out, static_cast<std::uint32_t>(trace.samples.size()));
  for (const auto& s : trace.samples) {
    put_i32(out, static_cast<std::int32_t>(std::llround(s.rss * 100.0)));
  }
  for (const auto& s : trace.samples) {
    put_i64(out, static_cast<std::int64_t>(std::llround(s.t * 1e6)));
  }
  return out;
}

RssTrace deserialize_trace(const Bytes& data, std::size_t* offset) {
  Reader r(data, offset ? *offset : 0);
  RssTrace trace;
  trace.vehicle_id = r.string();
  trace.rate = r.f64();
  const std::uint32_t n = r.u32();
  std::vector<double> rss(n), ts(n);
  for (std::uint32_t i = 0; i < n; ++i) rss[i] = r.i32() / 100.0;
  for (std::uint32_t i = 0; i < n; ++i) ts[i] = r.i64() / 1e6;
  trace.samples.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) trace.samples[i] = {ts[i], rss[i]};
  if (offset) *offset = r.pos();
  return trace;
}

namespace {

Bytes encode_payload(const Message& m) {
  Bytes p;
  std::visit(
      [&p](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, JoinReq> || std::is_same_v<T, Beacon>) {
          put_string(p, v.id);
          put_bytes(p, v.pk);
          put_bytes(p, v.cert);
        } else if constexpr (std::is_same_v<T, Reply>) {
          put_string(p, v.id);
          put_f64(p, v.start_t);
          put_f64(p, v.end_t);
          put_f64(p, v.freq_hz);
          put_f64(p, v.rate_hz);
        } else if constexpr (std::is_same_v<T, RssReport>) {
          put_string(p, v.id);
          const Bytes tr = serialize_trace(v.trace);
          p.insert(p.end(), tr.begin(), tr.end());
        } else if constexpr (std::is_same_v<T, CommitMsg>) {
          put_bytes(p, v.c);
        } else if constexpr (std::is_same_v<T, OpenMsg>) {
          put_string(p, v.id);
          put_bytes(p, v.r);
          const Bytes tr = serialize_trace(v.trace);
          p.insert(p.end(), tr.begin(), tr.end());
        }
      },
      m);
  return p;
}

Message decode_payload(MsgType type, const Bytes& payload) {
  Reader r(payload);
  switch (type) {
    case MsgType::kJoinReq: {
      JoinReq m;
      m.id = r.string();
      m.pk = r.bytes();
      m.cert = r.bytes();
      return m;
    }
    case MsgType::kBeacon: {
      Beacon m;
      m.id = r.string();
      m.pk = r.bytes();
      m.cert = r.bytes();
      return m;
    }
    case MsgType::kReply: {
      Reply m;
      m.id = r.string();
      m.start_t = r.f64();
      m.end_t = r.f64();
      m.freq_hz = r.f64();
      m.rate_hz = r.f64();
      return m;
    }
    case MsgType::kRssReport: {
      RssReport m;
      m.id = r.string();
      std::size_t off = r.pos();
      m.trace = deserialize_trace(payload, &off);
      return m;
    }
    case MsgType::kCommit: {
      CommitMsg m;
      m.c = r.bytes();
      return m;
    }
    case MsgType::kOpen: {
      OpenMsg m;
      m.id = r.string();
      m.r = r.bytes();
      std::size_t off = r.pos();
      m.trace = deserialize_trace(payload, &off);
      return m;
    }
    default:
      throw InvalidArgumentError("unknown message type");
  }
}

Bytes envelope(MsgType type, const Bytes& payload) {
  Bytes out;
  put_u32(out, static_cast<std::uint32_t>(payload.size() + 2));
  out.push_back(kWireVersion);
  out.push_back(static_cast<std::uint8_t>(type));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

struct EnvelopeView {
  MsgType type;
  Bytes payload;
};

EnvelopeView open_envelope(const Bytes& wire) {
  Reader r(wire);
  const std::uint32_t len = r.u32();
  if (len + 4 != wire.size() || len < 2) {
    throw InvalidArgumentError("bad envelope length");
  }
  if (r.u8() != kWireVersion) {
    throw InvalidArgumentError("unsupported wire version");
  }
  EnvelopeView v;
  v.type = static_cast<MsgType>(r.u8());
  v.payload.assign(wire.begin() + 6, wire.end());
  return v;
}

}  // namespace

Bytes encode_message(const Message& m) {
  return envelope(message_type(m), encode_payload(m));
}

Message decode_message(const Bytes& wire) {
  const EnvelopeView v = open_envelope(wire);
  return decode_payload(v.type, v.payload);
}

Bytes seal(const Message& m, const Bytes& sender_sk,
           const Bytes& recipient_pk, CryptoProvider& crypto) {
  const Bytes inner = encode_message(m);
  const Bytes sig = crypto.sign(sender_sk, inner);
  Bytes signed_blob;
  put_bytes(signed_blob, sig);
  signed_blob.insert(signed_blob.end(), inner.begin(), inner.end());
  return envelope(MsgType::kSealed, crypto.encrypt(recipient_pk, signed_blob));
}

Bytes seal_plain(const Message& m) { return encode_message(m); }

Bytes reencrypt_signed(const Bytes& sig, const Bytes& inner,
                       const Bytes& recipient_pk, CryptoProvider& crypto) {
  Bytes signed_blob;
  put_bytes(signed_blob, sig);
  signed_blob.insert(signed_blob.end(), inner.begin(), inner.end());
  return envelope(MsgType::kSealed, crypto.encrypt(recipient_pk, signed_blob));
}

std::optional<SignedMessage> unseal(const Bytes& wire, const Bytes& own_sk,
                                    CryptoProvider& crypto) {
  try {
    const EnvelopeView v = open_envelope(wire);
    if (v.type != MsgType::kSealed) return std::nullopt;
    const auto plain = crypto.decrypt(own_sk, v.payload);
    if (!plain) return std::nullopt;
    Reader r(*plain);
    SignedMessage sm;
    sm.sig = r.bytes();
    sm.inner.assign(plain->begin() + r.pos(), plain->end());
    sm.msg = decode_message(sm.inner);
    return sm;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<Message> parse_plain(const Bytes& wire) {
  try {
    return decode_message(wire);
  } catch (const Error&) {
    return std::nullopt;
  }
}

MsgType peek_type(const Bytes& wire) { return open_envelope(wire).type; }

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

std::string to_string(AbortReason r) {
  switch (r) {
    case AbortReason::kProtocolViolation: return "protocol-violation";
    case AbortReason::kAuthFailure: return "auth-failure";
    case AbortReason::kBindingFailure: return "binding-failure";
    case AbortReason::kStaleCommit: return "stale-commit";
  }
  return "unknown";
}

void SessionConfig::validate() const {
  params.validate();
  if (epsilon <= 0.0) throw InvalidArgumentError("epsilon must be > 0");
  if (delta_t <= 0.0) throw InvalidArgumentError("delta_t must be > 0");
  if (epsilon > delta_t / 4.0) {
    throw InvalidArgumentError("epsilon must be <= delta_t / 4");
  }
  if (rate_hz <= 0.0) throw InvalidArgumentError("rate_hz must be > 0");
}

double SessionConfig::window_length() const {
  return static_cast<double>(params.required_samples()) / rate_hz;
}

bool timing_check(double t_commit, double t_v_last, double epsilon) {
  return t_commit - t_v_last < epsilon;
}

namespace {

Bytes commit_payload(const RssTrace& trace, const std::string& id) {
  Bytes p = serialize_trace(trace);
  p.insert(p.end(), id.begin(), id.end());
  return p;
}

}  // namespace

CandidateSession::CandidateSession(Variant variant, Identity self, Bytes sk,
                                   Bytes ca_pk,
                                   std::optional<Identity> known_verifier,
                                   SessionConfig config,
                                   CryptoProvider& crypto)
    : variant_(variant),
      self_(std::move(self)),
      sk_(std::move(sk)),
      ca_pk_(std::move(ca_pk)),
      verifier_(std::move(known_verifier)),
      config_(std::move(config)),
      crypto_(crypto) {
  config_.validate();
  if (variant_ == Variant::kKnownVerifier && !verifier_) {
    throw InvalidArgumentError(
        "known-verifier variant requires the verifier identity");
  }
}

StepResult CandidateSession::fail(AbortReason reason,
                                  const std::string& detail) {
  state_ = State::kAborted;
  abort_ = AbortInfo{reason, detail};
  StepResult r;
  r.abort = abort_;
  return r;
}

StepResult CandidateSession::send_join_request() {
  StepResult r;
  r.outbound.push_back(seal(JoinReq{self_.id, self_.pk, self_.cert}, sk_,
                            verifier_->pk, crypto_));
  state_ = State::kAwaitReply;
  return r;
}

StepResult CandidateSession::on_start(double) {
  if (state_ != State::kIdle) {
    return fail(AbortReason::kProtocolViolation, "start in non-idle state");
  }
  if (variant_ == Variant::kKnownVerifier) return send_join_request();
  state_ = State::kAwaitBeacon;
  return {};
}

StepResult CandidateSession::on_message(const Bytes& wire, double) {
  if (state_ == State::kAwaitBeacon) {
    const auto msg = parse_plain(wire);
    if (!msg || !std::holds_alternative<Beacon>(*msg)) {
      return fail(AbortReason::kProtocolViolation,
                  "expected verifier beacon");
    }
    const auto& b = std::get<Beacon>(*msg);
    Identity v{b.id, b.pk, b.cert};
    if (!verify_certificate(crypto_, ca_pk_, v)) {
      return fail(AbortReason::kAuthFailure, "beacon certificate invalid");
    }
    verifier_ = std::move(v);
    return send_join_request();
  }
  if (state_ == State::kAwaitReply) {
    const auto sm = unseal(wire, sk_, crypto_);
    if (!sm) {
      return fail(AbortReason::kAuthFailure, "cannot decrypt reply");
    }
    if (!std::holds_alternative<Reply>(sm->msg)) {
      return fail(AbortReason::kProtocolViolation,
                  "expected REPLY, got other message");
    }
    if (!crypto_.verify(verifier_->pk, sm->inner, sm->sig)) {
      return fail(AbortReason::kAuthFailure,
                  "reply signature not from the expected verifier");
    }
    const auto& reply = std::get<Reply>(sm->msg);
    if (reply.id != verifier_->id) {
      return fail(AbortReason::kAuthFailure, "reply identity mismatch");
    }
    StepResult r;
    r.collect_window = {reply.start_t, reply.end_t};
    state_ = State::kCollecting;
    return r;
  }
  return fail(AbortReason::kProtocolViolation,
              "unexpected message in state " +
                  std::to_string(static_cast<int>(state_)));
}

StepResult CandidateSession::on_collection_complete(const RssTrace& trace,
                                                    double t) {
  if (state_ != State::kCollecting) {
    return fail(AbortReason::kProtocolViolation,
                "collection completed in unexpected state");
  }
  StepResult r;
  if (variant_ == Variant::kKnownVerifier) {
    r.outbound.push_back(
        seal(RssReport{self_.id, trace}, sk_, verifier_->pk, crypto_));
    state_ = State::kDone;
    return r;
  }
  collected_ = trace;
  nonce_ = crypto_.nonce();
  const Bytes c = crypto_.commit(commit_payload(trace, self_.id), nonce_);
  r.outbound.push_back(seal(CommitMsg{c}, sk_, verifier_->pk, crypto_));
  r.timer_at = t + config_.delta_t;
  state_ = State::kAwaitOpenTimer;
  return r;
}

StepResult CandidateSession::on_timer(double) {
  if (state_ != State::kAwaitOpenTimer) {
    return fail(AbortReason::kProtocolViolation, "unexpected timer");
  }
  StepResult r;
  r.outbound.push_back(
      seal(OpenMsg{self_.id, collected_, nonce_}, sk_, verifier_->pk,
           crypto_));
  state_ = State::kDone;
  return r;
}

VerifierSession::VerifierSession(Variant variant, Identity self, Bytes sk,
                                 Bytes ca_pk, SessionConfig config,
                                 CryptoProvider& crypto)
    : variant_(variant),
      self_(std::move(self)),
      sk_(std::move(sk)),
      ca_pk_(std::move(ca_pk)),
      config_(std::move(config)),
      crypto_(crypto) {
  config_.validate();
}

StepResult VerifierSession::fail(AbortReason reason,
                                 const std::string& detail) {
  state_ = State::kAborted;
  abort_ = AbortInfo{reason, detail};
  StepResult r;
  r.abort = abort_;
  return r;
}

StepResult VerifierSession::on_start(double) {
  StepResult r;
  if (variant_ == Variant::kCommitment) {
    r.outbound.push_back(seal_plain(Beacon{self_.id, self_.pk, self_.cert}));
  }
  return r;
}

StepResult VerifierSession::on_message(const Bytes& wire, double t) {
  const auto sm = unseal(wire, sk_, crypto_);
  if (!sm) {
    return fail(AbortReason::kAuthFailure, "cannot decrypt inbound message");
  }
  if (state_ == State::kIdle) {
    if (!std::holds_alternative<JoinReq>(sm->msg)) {
      return fail(AbortReason::kProtocolViolation, "expected join request");
    }
    const auto& req = std::get<JoinReq>(sm->msg);
    Identity cand{req.id, req.pk, req.cert};
    if (!verify_certificate(crypto_, ca_pk_, cand)) {
      return fail(AbortReason::kAuthFailure,
                  "candidate certificate invalid");
    }
    if (!crypto_.verify(cand.pk, sm->inner, sm->sig)) {
      return fail(AbortReason::kAuthFailure,
                  "join request signature invalid");
    }
    candidate_ = std::move(cand);
    const double start = t + config_.setup_delay;
    window_ = {start, start + config_.window_length()};
    StepResult r;
    r.outbound.push_back(
        seal(Reply{self_.id, window_->first, window_->second,
                   config_.freq_hz, config_.rate_hz},
             sk_, candidate_->pk, crypto_));
    r.collect_window = window_;
    state_ = variant_ == Variant::kKnownVerifier ? State::kAwaitReport
                                                 : State::kAwaitCommit;
    return r;
  }
  if (!crypto_.verify(candidate_->pk, sm->inner, sm->sig)) {
    return fail(AbortReason::kAuthFailure, "message signature invalid");
  }
  if (state_ == State::kAwaitReport) {
    if (!std::holds_alternative<RssReport>(sm->msg)) {
      return fail(AbortReason::kProtocolViolation, "expected RSS report");
    }
    const auto& report = std::get<RssReport>(sm->msg);
    if (report.id != candidate_->id) {
      return fail(AbortReason::kAuthFailure, "report identity mismatch");
    }
    reported_trace_ = report.trace;
    return try_verdict();
  }
  if (state_ == State::kAwaitCommit) {
    if (!std::holds_alternative<CommitMsg>(sm->msg)) {
      return fail(AbortReason::kProtocolViolation, "expected commitment");
    }
    commitment_ = std::get<CommitMsg>(sm->msg).c;
    t_commit_ = t;
    state_ = State::kAwaitOpen;
    return {};
  }
  if (state_ == State::kAwaitOpen) {
    if (!std::holds_alternative<OpenMsg>(sm->msg)) {
      return fail(AbortReason::kProtocolViolation, "expected opening");
    }
    const auto& open = std::get<OpenMsg>(sm->msg);
    if (open.id != candidate_->id) {
      return fail(AbortReason::kAuthFailure, "opening identity mismatch");
    }
    const Bytes expect =
        crypto_.commit(commit_payload(open.trace, open.id), open.r);
    if (expect != *commitment_) {
      return fail(AbortReason::kBindingFailure,
                  "opened values do not match the commitment");
    }
    reported_trace_ = open.trace;
    return try_verdict();
  }
  return fail(AbortReason::kProtocolViolation, "unexpected message");
}

StepResult VerifierSession::on_collection_complete(const RssTrace& trace,
                                                   double) {
  own_trace_ = trace;
  if (state_ == State::kAborted || state_ == State::kDone) return {};
  return try_verdict();
}

StepResult VerifierSession::try_verdict() {
  if (!own_trace_ || !reported_trace_) return {};
  if (variant_ == Variant::kCommitment &&
      !timing_check(t_commit_, own_trace_->end_time(), config_.epsilon)) {
    return fail(AbortReason::kStaleCommit,
                "commitment arrived " +
                    std::to_string(t_commit_ - own_trace_->end_time()) +
                    " s after collection end (epsilon " +
                    std::to_string(config_.epsilon) + ")");
  }
  StepResult r;
  try {
    const AlignedPair pair = align(*own_trace_, *reported_trace_);
    const auto rhos = correlation_tests(pair, config_.params);
    r.verdict = decide(rhos, config_.params.tau, config_.params.alpha);
  } catch (const Error& e) {
    return fail(AbortReason::kProtocolViolation,
                std::string("verification failed: ") + e.what());
  }
  state_ = State::kDone;
  return r;
}

std::vector<PofDecision> continuous_verification(
    const RssTrace& verifier_trace, const RssTrace& candidate_trace,
    const PofParams& params, std::vector<std::string>* diagnostics) {
  params.validate();
  const double window = static_cast<double>(params.required_samples()) /
                        verifier_trace.rate;
  const double t0 = std::max(verifier_trace.start_time(),
                             candidate_trace.start_time());
  const double t1 =
      std::min(verifier_trace.end_time(), candidate_trace.end_time());
  std::vector<PofDecision> verdicts;
  auto slice = [](const RssTrace& tr, double lo, double hi) {
    RssTrace out;
    out.rate = tr.rate;
    out.vehicle_id = tr.vehicle_id;
    for (const auto& s : tr.samples) {
      if (s.t >= lo && s.t < hi) out.samples.push_back(s);
    }
    return out;
  };
  for (int w = 0; t0 + (w + 1) * window <= t1 + 1e-9; ++w) {
    const double lo = t0 + w * window;
    const double hi = lo + window + 1e-9;
    try {
      const RssTrace sv = slice(verifier_trace, lo, hi);
      const RssTrace sc = slice(candidate_trace, lo, hi);
      sv.validate();
      sc.validate();
      const AlignedPair pair = align(sv, sc);
      const auto rhos = correlation_tests(pair, params);
      verdicts.push_back(decide(rhos, params.tau, params.alpha));
      if (!verdicts.back().accept) break;  // membership revoked
    } catch (const Error& e) {
      if (diagnostics) {
        diagnostics->push_back("window " + std::to_string(w) +
                               " skipped: " + e.what());
      }
    }
  }
  return verdicts;
}

}  // namespace pof
