// crypto.hpp -- pluggable cryptography for the protocol state machines.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_CRYPTO_HPP
#define POF_CRYPTO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pof {

using Bytes = std::vector<std::uint8_t>;

struct KeyPair {
  Bytes pk;
  Bytes sk;
};

// Abstract capability used by the sessions. Contracts: verify(sign(m)) is
// true, decrypt(encrypt(m)) == m and fails under any other key or after
// tampering, commit is hiding and binding for the toy threat model.
class CryptoProvider {
 public:
  virtual ~CryptoProvider() = default;

  virtual KeyPair generate_keypair(const std::string& label) = 0;
  virtual Bytes sign(const Bytes& sk, const Bytes& msg) = 0;
  virtual bool verify(const Bytes& pk, const Bytes& msg,
                      const Bytes& sig) = 0;
  virtual Bytes encrypt(const Bytes& recipient_pk, const Bytes& plain) = 0;
  virtual std::optional<Bytes> decrypt(const Bytes& sk,
                                       const Bytes& cipher) = 0;
  virtual Bytes commit(const Bytes& payload, const Bytes& nonce) = 0;
  virtual Bytes nonce() = 0;  // 128-bit
};

// Deterministic provider built on keyed BLAKE2b hashing. Signatures are
// keyed hashes verified through an internal pk -> sk registry; encryption is
// a key-indexed sealed box (keystream + MAC). Reproducible given the seed --
// the tests assert protocol logic, not cryptographic strength.
class ToyCryptoProvider : public CryptoProvider {
 public:
  explicit ToyCryptoProvider(std::uint64_t seed = 0);

  KeyPair generate_keypair(const std::string& label) override;
  Bytes sign(const Bytes& sk, const Bytes& msg) override;
  bool verify(const Bytes& pk, const Bytes& msg, const Bytes& sig) override;
  Bytes encrypt(const Bytes& recipient_pk, const Bytes& plain) override;
  std::optional<Bytes> decrypt(const Bytes& sk, const Bytes& cipher) override;
  Bytes commit(const Bytes& payload, const Bytes& nonce) override;
  Bytes nonce() override;

 private:
  std::uint64_t seed_;
  std::uint64_t nonce_counter_ = 0;
  std::map<Bytes, Bytes> registry_;  // pk -> sk
};

// Certified identity: cert binds id <-> pk under the CA key.
struct Identity {
  std::string id;
  Bytes pk;
  Bytes cert;
};

Bytes issue_certificate(CryptoProvider& crypto, const Bytes& ca_sk,
                        const std::string& id, const Bytes& pk);
bool verify_certificate(CryptoProvider& crypto, const Bytes& ca_pk,
                        const Identity& identity);

}  // namespace pof

#endif  // POF_CRYPTO_HPP
