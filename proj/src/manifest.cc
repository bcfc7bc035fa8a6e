// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/manifest.h"

#include <algorithm>
#include <functional>
#include <sstream>

#include <sodium.h>

#include "attest/error.h"

namespace attest {

SigningKey SigningKey::from_seed(const std::array<std::uint8_t, 32>& seed) {
  ensure_sodium();
  SigningKey k;
  k.seed_ = seed;
  crypto_sign_seed_keypair(k.public_key_.data(), k.secret_.data(), seed.data());
  return k;
}

SigningKey SigningKey::generate() {
  ensure_sodium();
  std::array<std::uint8_t, 32> seed;
  randombytes_buf(seed.data(), seed.size());
  return from_seed(seed);
}

Signature SigningKey::sign(ByteView message) const {
  Signature sig;
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_.data());
  return sig;
}

bool ed25519_verify(const PublicKey& key, ByteView message, const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), key.data()) == 0;
}

PublicKey public_key_from_hex(std::string_view hex) {
  Bytes b = hex_decode(hex);
  if (b.size() != 32) throw Error(ErrorCode::kDecodeError, "public key must be 32 bytes");
  PublicKey k;
  std::copy(b.begin(), b.end(), k.begin());
  return k;
}

TrustedKeys parse_trusted_keys(std::string_view text) {
  TrustedKeys keys;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty() || line[0] == '#') continue;
    keys.insert(public_key_from_hex(line));
  }
  return keys;
}

std::string_view assertion_value_name(AssertionValue v) {
  return v == AssertionValue::kAllow ? "allow" : "deny";
}

AssertionValue parse_assertion_value(std::string_view s) {
  if (s == "allow") return AssertionValue::kAllow;
  if (s == "deny") return AssertionValue::kDeny;
  throw Error(ErrorCode::kSchemaMismatch, "assertion value must be allow or deny");
}

namespace {

Json assertions_json(const std::map<std::string, AssertionValue>& a) {
  Json j = Json::object();
  for (const auto& [k, v] : a) j[k] = std::string(assertion_value_name(v));
  return j;
}

std::map<std::string, AssertionValue> assertions_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaMismatch, "assertions must be an object");
  std::map<std::string, AssertionValue> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw Error(ErrorCode::kSchemaMismatch, "assertion values must be strings");
    out[k] = parse_assertion_value(v.get<std::string>());
  }
  return out;
}

Json claim_object(const Manifest& m) {
  Json ingredients = Json::array();
  for (const Digest& d : m.ingredients) ingredients.push_back(d.hex());
  return Json{{"asset_hash", m.asset_hash.hex()},
              {"asset_id", m.asset_id},
              {"assertions", assertions_json(m.assertions)},
              {"ingredients", ingredients},
              {"signer_public_key", hex_encode(m.signer_public_key)}};
}

}  // namespace

std::string Manifest::claim_json() const { return canonical_dump(claim_object(*this)); }

Json Manifest::to_json() const {
  Json j = claim_object(*this);
  j["signature"] = hex_encode(signature);
  return j;
}

Digest Manifest::digest() const { return sha256(canonical_json()); }

Manifest Manifest::from_json(const Json& j) {
  Manifest m;
  m.asset_id = json_string(j, "asset_id");
  m.asset_hash = json_digest(j, "asset_hash");
  m.assertions = assertions_from_json(json_field(j, "assertions"));
  const Json& ing = json_field(j, "ingredients");
  if (!ing.is_array()) throw Error(ErrorCode::kSchemaMismatch, "ingredients must be an array");
  for (const Json& d : ing) {
    if (!d.is_string()) throw Error(ErrorCode::kSchemaMismatch, "ingredient must be a hex digest");
    m.ingredients.push_back(Digest::from_hex(d.get<std::string>()));
  }
  m.signer_public_key = public_key_from_hex(json_string(j, "signer_public_key"));
  Bytes sig = hex_decode(json_string(j, "signature"));
  if (sig.size() != 64) throw Error(ErrorCode::kSchemaMismatch, "signature must be 64 bytes");
  std::copy(sig.begin(), sig.end(), m.signature.begin());
  return m;
}

Manifest manifest_sign(std::string asset_id, ByteView payload,
                       std::map<std::string, AssertionValue> assertions,
                       std::vector<Digest> ingredients, const SigningKey& key) {
  Manifest m;
  m.asset_id = std::move(asset_id);
  m.asset_hash = sha256(payload);
  m.assertions = std::move(assertions);
  m.ingredients = std::move(ingredients);
  m.signer_public_key = key.public_key();
  m.signature = key.sign(as_bytes(m.claim_json()));
  return m;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerificationReport::find(std::string_view name) const {
  for (const CheckResult& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string VerificationReport::first_failure() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) return c.name;
  }
  return {};
}

const Manifest* ManifestStore::find(const Digest& d) const {
  auto it = by_digest_.find(d);
  return it == by_digest_.end() ? nullptr : &it->second;
}

namespace {

bool signature_valid(const Manifest& m) {
  return ed25519_verify(m.signer_public_key, as_bytes(m.claim_json()), m.signature);
}

// Returns an empty string when every ingredient below `m` is present, validly
// signed and trusted; otherwise the reason.
std::string check_ingredients(const Manifest& m, const TrustedKeys& trusted,
                              const ManifestStore* store, int depth) {
  if (m.ingredients.empty()) return {};
  if (depth >= kMaxIngredientDepth) return "depth_exceeded";
  for (const Digest& d : m.ingredients) {
    const Manifest* child = store ? store->find(d) : nullptr;
    if (child == nullptr) return "ingredient_missing:" + d.hex();
    if (!signature_valid(*child)) return "ingredient_signature:" + d.hex();
    if (!trusted.contains(child->signer_public_key)) return "ingredient_untrusted:" + d.hex();
    std::string nested = check_ingredients(*child, trusted, store, depth + 1);
    if (!nested.empty()) return nested;
  }
  return {};
}

}  // namespace

VerificationReport manifest_verify(ByteView payload, const Manifest& m, const TrustedKeys& trusted,
                                   const ManifestStore* ingredients) {
  VerificationReport r;
  const bool bound = sha256(payload) == m.asset_hash;
  r.checks.push_back({"hash_binding", bound, bound ? "" : "asset bytes do not match asset_hash"});
  const bool sig = signature_valid(m);
  r.checks.push_back({"signature", sig, sig ? "" : "signature does not verify over claim"});
  const bool trust = trusted.contains(m.signer_public_key);
  r.checks.push_back({"signer_trust", trust, trust ? "" : "signer key not in trusted set"});
  std::string ing = check_ingredients(m, trusted, ingredients, 0);
  r.checks.push_back({"ingredients", ing.empty(), ing});
  return r;
}

Json CorpusPolicy::to_json() const {
  Json keys = Json::array();
  for (const PublicKey& k : trusted_keys) keys.push_back(hex_encode(k));
  return Json{{"required", assertions_json(required)}, {"trusted_keys", keys}};
}

CorpusPolicy CorpusPolicy::from_json(const Json& j) {
  CorpusPolicy p;
  p.required = assertions_from_json(json_field(j, "required"));
  const Json& keys = json_field(j, "trusted_keys");
  if (!keys.is_array()) throw Error(ErrorCode::kSchemaMismatch, "trusted_keys must be an array");
  for (const Json& k : keys) p.trusted_keys.insert(public_key_from_hex(k.get<std::string>()));
  return p;
}

Digest corpus_leaf(const Blinding& blinding, const Digest& asset_hash, ByteView payload) {
  return Sha256().update(Tag::kLeaf).update(ByteView(blinding)).update(asset_hash).update(payload).finish();
}

std::string admission_failure(ByteView payload, const Manifest& m, const CorpusPolicy& policy,
                              const ManifestStore* ingredients) {
  std::string reason = manifest_verify(payload, m, policy.trusted_keys, ingredients).first_failure();
  if (!reason.empty()) return reason;
  for (const auto& [name, want] : policy.required) {
    auto it = m.assertions.find(name);
    if (it == m.assertions.end() || it->second != want) return "assertion_policy";
  }
  return {};
}

CorpusCommitment corpus_verify(std::span<const RawAsset> assets, const CorpusPolicy& policy,
                               BlindingSource& blindings, const ManifestStore* ingredients) {
  std::vector<CorpusEntry> accepted;
  std::vector<Rejection> rejected;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const RawAsset& a = assets[i];
    const std::string reason = admission_failure(a.payload, a.manifest, policy, ingredients);
    if (!reason.empty()) {
      rejected.push_back({i, a.manifest.asset_id, reason});
      continue;
    }
    CorpusEntry e{a.payload, a.manifest, blindings.next(), {}};
    e.leaf = corpus_leaf(e.blinding, a.manifest.asset_hash, e.payload);
    accepted.push_back(std::move(e));
  }
  if (accepted.empty()) throw Error(ErrorCode::kEmptyAcceptedSet, "no asset passed verification and policy");
  std::vector<Digest> leaves;
  leaves.reserve(accepted.size());
  for (const CorpusEntry& e : accepted) leaves.push_back(e.leaf);
  MerkleTree tree = MerkleTree::build(std::span<const Digest>(leaves));
  return CorpusCommitment{std::move(accepted), std::move(rejected), std::move(leaves), std::move(tree)};
}

}  // namespace attest
