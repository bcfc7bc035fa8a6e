// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Signed provenance manifests for raw assets and the corpus admission step
// that turns verified assets into the first dataset commitment.

#ifndef ATTEST_MANIFEST_H_
#define ATTEST_MANIFEST_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "attest/bytes.h"
#include "attest/canonical_json.h"
#include "attest/commitment.h"
#include "attest/hash.h"
#include "attest/merkle.h"

namespace attest {

using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;
using TrustedKeys = std::set<PublicKey>;

// Ed25519 key derived deterministically from a 32-byte seed.
class SigningKey {
 public:
  static SigningKey from_seed(const std::array<std::uint8_t, 32>& seed);
  static SigningKey generate();

  const PublicKey& public_key() const { return public_key_; }
  const std::array<std::uint8_t, 32>& seed() const { return seed_; }
  Signature sign(ByteView message) const;

 private:
  std::array<std::uint8_t, 32> seed_{};
  std::array<std::uint8_t, 64> secret_{};
  PublicKey public_key_{};
};

bool ed25519_verify(const PublicKey& key, ByteView message, const Signature& sig);

PublicKey public_key_from_hex(std::string_view hex);
// One lowercase or uppercase hex key per line; blank lines and lines
// starting with '#' are skipped.
TrustedKeys parse_trusted_keys(std::string_view text);

enum class AssertionValue { kAllow, kDeny };

inline constexpr std::array<std::string_view, 3> kKnownAssertions = {"ai_inference", "ai_training",
                                                                     "data_mining"};

struct Manifest {
  std::string asset_id;
  Digest asset_hash;
  std::map<std::string, AssertionValue> assertions;
  std::vector<Digest> ingredients;
  PublicKey signer_public_key{};
  Signature signature{};

  // Everything except the signature, as canonical JSON. This is what gets signed.
  std::string claim_json() const;
  Json to_json() const;
  std::string canonical_json() const { return canonical_dump(to_json()); }
  // SHA-256 of the canonical manifest; ingredient lists refer to manifests by it.
  Digest digest() const;

  static Manifest from_json(const Json& j);

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

Manifest manifest_sign(std::string asset_id, ByteView payload,
                       std::map<std::string, AssertionValue> assertions,
                       std::vector<Digest> ingredients, const SigningKey& key);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(std::string_view name) const;
  // Name of the first failing check, or empty.
  std::string first_failure() const;
};

// Ingredient manifests available for recursive checking, keyed by digest.
class ManifestStore {
 public:
  void add(const Manifest& m) { by_digest_[m.digest()] = m; }
  const Manifest* find(const Digest& d) const;
  const std::map<Digest, Manifest>& all() const { return by_digest_; }

 private:
  std::map<Digest, Manifest> by_digest_;
};

inline constexpr int kMaxIngredientDepth = 8;

// Checks, in order: hash_binding, signature, signer_trust, ingredients.
// Failures are report entries, never exceptions.
VerificationReport manifest_verify(ByteView payload, const Manifest& m, const TrustedKeys& trusted,
                                   const ManifestStore* ingredients = nullptr);

struct RawAsset {
  Bytes payload;
  Manifest manifest;
};

struct CorpusPolicy {
  std::map<std::string, AssertionValue> required;
  TrustedKeys trusted_keys;

  Json to_json() const;
  static CorpusPolicy from_json(const Json& j);
};

struct Rejection {
  std::size_t input_index = 0;
  std::string asset_id;
  std::string reason;
};

struct CorpusEntry {
  Bytes payload;
  Manifest manifest;
  Blinding blinding{};
  Digest leaf;
};

// Leaf commitment SHA-256(0x00 || blinding || asset_hash || payload).
Digest corpus_leaf(const Blinding& blinding, const Digest& asset_hash, ByteView payload);

struct CorpusCommitment {
  std::vector<CorpusEntry> accepted;
  std::vector<Rejection> rejected;
  std::vector<Digest> leaves;
  MerkleTree tree;

  const Digest& root() const { return tree.root(); }
};

// Name of the first failed check or "assertion_policy"; empty when admitted.
std::string admission_failure(ByteView payload, const Manifest& m, const CorpusPolicy& policy,
                              const ManifestStore* ingredients = nullptr);

// Accepts assets in input order. Throws EmptyAcceptedSet if nothing passes.
CorpusCommitment corpus_verify(std::span<const RawAsset> assets, const CorpusPolicy& policy,
                               BlindingSource& blindings,
                               const ManifestStore* ingredients = nullptr);

std::string_view assertion_value_name(AssertionValue v);
AssertionValue parse_assertion_value(std::string_view s);

}  // namespace attest

#endif  // ATTEST_MANIFEST_H_
