// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/transcript.h"

#include <unordered_set>

#include "attest/error.h"

namespace attest {
namespace {

void update_prefixed(Sha256& h, ByteView b) {
  const auto n = static_cast<std::uint32_t>(b.size());
  std::uint8_t len[4] = {static_cast<std::uint8_t>(n), static_cast<std::uint8_t>(n >> 8),
                         static_cast<std::uint8_t>(n >> 16), static_cast<std::uint8_t>(n >> 24)};
  h.update(ByteView(len, 4)).update(b);
}

}  // namespace

Transcript::Transcript(std::string_view protocol) { absorb("protocol", as_bytes(protocol)); }

void Transcript::absorb(std::string_view label, ByteView message) {
  Sha256 h;
  h.update(Tag::kTranscript).update(state_);
  update_prefixed(h, as_bytes(label));
  update_prefixed(h, message);
  state_ = h.finish();
}

void Transcript::absorb_u64(std::string_view label, std::uint64_t v) {
  ByteWriter w;
  w.u64(v);
  absorb(label, w.data());
}

FieldElement Transcript::challenge_field() {
  for (;;) {
    Digest d = Sha256().update(Tag::kTranscript).update(state_).update("challenge").update_u64(counter_++).finish();
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(d.bytes[i]) << (8 * i);
    if (v < kModulus) return FieldElement(v);
  }
}

std::vector<std::size_t> Transcript::challenge_indices(std::size_t count, std::size_t range) {
  if (count > range) {
    throw Error(ErrorCode::kTooManyIndices,
                std::to_string(count) + " indices requested from a range of " + std::to_string(range));
  }
  std::vector<std::size_t> out;
  out.reserve(count);
  std::unordered_set<std::size_t> seen;
  while (out.size() < count) {
    auto idx = static_cast<std::size_t>(challenge_field().value() % range);
    if (seen.insert(idx).second) out.push_back(idx);
  }
  return out;
}

}  // namespace attest
