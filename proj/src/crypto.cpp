// crypto.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "pof/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <initializer_list>
#include <stdexcept>

namespace pof {

namespace {

constexpr std::size_t kHashLen = 32;
constexpr std::size_t kTagLen = 16;
constexpr std::size_t kMacLen = 16;

Bytes hash_parts(std::initializer_list<Bytes> parts) {
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, kHashLen);
  for (const auto& p : parts) {
    crypto_generichash_update(&st, p.data(), p.size());
  }
  Bytes out(kHashLen);
  crypto_generichash_final(&st, out.data(), kHashLen);
  return out;
}

Bytes str_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

Bytes u64_bytes(std::uint64_t v) {
  Bytes b(8);
  for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return b;
}

}  // namespace

ToyCryptoProvider::ToyCryptoProvider(std::uint64_t seed) : seed_(seed) {
  if (sodium_init() < 0) {
    throw std::runtime_error("libsodium initialization failed");
  }
}

KeyPair ToyCryptoProvider::generate_keypair(const std::string& label) {
  KeyPair kp;
  kp.sk = hash_parts({str_bytes("sk"), u64_bytes(seed_), str_bytes(label)});
  kp.pk = hash_parts({str_bytes("pk"), kp.sk});
  registry_[kp.pk] = kp.sk;
  return kp;
}

Bytes ToyCryptoProvider::sign(const Bytes& sk, const Bytes& msg) {
  return hash_parts({str_bytes("sig"), sk, msg});
}

bool ToyCryptoProvider::verify(const Bytes& pk, const Bytes& msg,
                               const Bytes& sig) {
  auto it = registry_.find(pk);
  if (it == registry_.end()) return false;
  return sign(it->second, msg) == sig;
}

Bytes ToyCryptoProvider::encrypt(const Bytes& recipient_pk,
                                 const Bytes& plain) {
  auto it = registry_.find(recipient_pk);
  if (it == registry_.end()) {
    throw std::runtime_error("encrypt: unknown recipient key");
  }
  const Bytes& sk = it->second;
  Bytes out;
  out.insert(out.end(), recipient_pk.begin(),
             recipient_pk.begin() + kTagLen);
  // Keystream blocks keyed by the recipient secret.
  Bytes body(plain);
  for (std::size_t i = 0; i < body.size(); i += kHashLen) {
    const Bytes block =
        hash_parts({str_bytes("enc"), sk, u64_bytes(i / kHashLen)});
    for (std::size_t j = 0; j < kHashLen && i + j < body.size(); ++j) {
      body[i + j] ^= block[j];
    }
  }
  out.insert(out.end(), body.begin(), body.end());
  const Bytes mac = hash_parts({str_bytes("mac"), sk, body});
  out.insert(out.end(), mac.begin(), mac.begin() + kMacLen);
  return out;
}

std::optional<Bytes> ToyCryptoProvider::decrypt(const Bytes& sk,
                                                const Bytes& cipher) {
  if (cipher.size() < kTagLen + kMacLen) return std::nullopt;
  const Bytes pk = hash_parts({str_bytes("pk"), sk});
  if (!std::equal(cipher.begin(), cipher.begin() + kTagLen, pk.begin())) {
    return std::nullopt;  // addressed to a different key
  }
  Bytes body(cipher.begin() + kTagLen, cipher.end() - kMacLen);
  const Bytes mac = hash_parts({str_bytes("mac"), sk, body});
  if (!std::equal(cipher.end() - kMacLen, cipher.end(), mac.begin())) {
    return std::nullopt;  // tampered
  }
  for (std::size_t i = 0; i < body.size(); i += kHashLen) {
    const Bytes block =
        hash_parts({str_bytes("enc"), sk, u64_bytes(i / kHashLen)});
    for (std::size_t j = 0; j < kHashLen && i + j < body.size(); ++j) {
      body[i + j] ^= block[j];
    }
  }
  return body;
}

Bytes ToyCryptoProvider::commit(const Bytes& payload, const Bytes& nonce) {
  return hash_parts({str_bytes("commit"), payload, nonce});
}

Bytes ToyCryptoProvider::nonce() {
  const Bytes h = hash_parts(
      {str_bytes("nonce"), u64_bytes(seed_), u64_bytes(nonce_counter_++)});
  return Bytes(h.begin(), h.begin() + 16);
}

Bytes issue_certificate(CryptoProvider& crypto, const Bytes& ca_sk,
                        const std::string& id, const Bytes& pk) {
  Bytes msg = str_bytes("cert:" + id);
  msg.insert(msg.end(), pk.begin(), pk.end());
  return crypto.sign(ca_sk, msg);
}

bool verify_certificate(CryptoProvider& crypto, const Bytes& ca_pk,
                        const Identity& identity) {
  Bytes msg = str_bytes("cert:" + identity.id);
  msg.insert(msg.end(), identity.pk.begin(), identity.pk.end());
  return crypto.verify(ca_pk, msg, identity.cert);
}

}  // namespace pof
