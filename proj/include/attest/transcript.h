// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#ifndef ATTEST_TRANSCRIPT_H_
#define ATTEST_TRANSCRIPT_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "attest/bytes.h"
#include "attest/field.h"
#include "attest/hash.h"

namespace attest {

// Fiat-Shamir transcript. Each absorb replaces the state with
//   SHA-256(0x03 || state || len(label) || label || len(msg) || msg)
// and each challenge hashes SHA-256(0x03 || state || "challenge" || counter).
// Single owner; not safe for concurrent absorbs.
class Transcript {
 public:
  explicit Transcript(std::string_view protocol);

  void absorb(std::string_view label, ByteView message);
  void absorb(std::string_view label, const Digest& d) { absorb(label, d.view()); }
  void absorb_u64(std::string_view label, std::uint64_t v);
  void absorb_field(std::string_view label, FieldElement v) { absorb_u64(label, v.value()); }

  // Uniform in [0, p) by rejection sampling on 8 little-endian bytes.
  FieldElement challenge_field();
  // `count` distinct indices in [0, range), in draw order. Throws
  // TooManyIndices if count > range.
  std::vector<std::size_t> challenge_indices(std::size_t count, std::size_t range);

  const Digest& state() const { return state_; }

 private:
  Digest state_;
  std::uint64_t counter_ = 0;
};

}  // namespace attest

#endif  // ATTEST_TRANSCRIPT_H_
