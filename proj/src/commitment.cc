// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/commitment.h"

#include <algorithm>

namespace attest {

Commitment commit_create(ByteView payload, const Blinding& blinding, Tag tag) {
  return Commitment{Sha256().update(tag).update(ByteView(blinding)).update(payload).finish()};
}

bool commit_verify_opening(const Commitment& c, ByteView payload, ByteView blinding, Tag tag) {
  if (blinding.size() != 32) return false;
  Blinding b;
  std::copy(blinding.begin(), blinding.end(), b.begin());
  return commit_create(payload, b, tag) == c;
}

BlindingSource BlindingSource::random() {
  ensure_sodium();
  return BlindingSource();
}

BlindingSource BlindingSource::seeded(const Digest& seed) {
  BlindingSource s;
  s.seed_ = seed;
  return s;
}

BlindingSource BlindingSource::seeded(std::uint64_t seed) {
  return seeded(Sha256().update("attest/blinding-seed").update_u64(seed).finish());
}

Blinding BlindingSource::next() {
  Blinding b;
  if (seed_) {
    Digest d = Sha256().update("attest/blinding").update(*seed_).update_u64(counter_++).finish();
    b = d.bytes;
  } else {
    randombytes_buf(b.data(), b.size());
  }
  return b;
}

void write_blinding(ByteWriter& w, const Blinding& b) { w.raw(b); }

Blinding read_blinding(ByteReader& r) {
  Blinding b;
  ByteView v = r.raw(32);
  std::copy(v.begin(), v.end(), b.begin());
  return b;
}

}  // namespace attest
