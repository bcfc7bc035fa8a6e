// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#ifndef ATTEST_COMMITMENT_H_
#define ATTEST_COMMITMENT_H_

#include <array>
#include <cstdint>
#include <optional>

#include "attest/bytes.h"
#include "attest/hash.h"

namespace attest {

using Blinding = std::array<std::uint8_t, 32>;

// Hiding commitment: digest = SHA-256(tag || blinding || payload).
struct Commitment {
  Digest digest;
  friend bool operator==(const Commitment&, const Commitment&) = default;
};

Commitment commit_create(ByteView payload, const Blinding& blinding, Tag tag = Tag::kValue);
bool commit_verify_opening(const Commitment& c, ByteView payload, ByteView blinding,
                           Tag tag = Tag::kValue);

// Produces blinding factors. The random source draws from the OS CSPRNG; the
// seeded source derives SHA-256(seed || counter) so runs can be replayed
// byte-for-byte.
class BlindingSource {
 public:
  static BlindingSource random();
  static BlindingSource seeded(const Digest& seed);
  static BlindingSource seeded(std::uint64_t seed);

  Blinding next();

 private:
  BlindingSource() = default;

  std::optional<Digest> seed_;
  std::uint64_t counter_ = 0;
};

void write_blinding(ByteWriter& w, const Blinding& b);
Blinding read_blinding(ByteReader& r);

}  // namespace attest

#endif  // ATTEST_COMMITMENT_H_
