// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/hash.h"

#include <algorithm>
#include <stdexcept>

#include "attest/error.h"

namespace attest {

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

Digest Digest::from_hex(std::string_view hex) {
  Bytes b = hex_decode(hex);
  return from_bytes(b);
}

Digest Digest::from_bytes(ByteView b) {
  if (b.size() != 32) throw Error(ErrorCode::kDecodeError, "digest must be 32 bytes");
  Digest d;
  std::copy(b.begin(), b.end(), d.bytes.begin());
  return d;
}

Sha256::Sha256() { crypto_hash_sha256_init(&state_); }

Sha256& Sha256::update(ByteView data) {
  crypto_hash_sha256_update(&state_, data.data(), data.size());
  return *this;
}

Sha256& Sha256::update_u64(std::uint64_t v) {
  std::uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return update(ByteView(buf, 8));
}

Digest Sha256::finish() {
  Digest d;
  crypto_hash_sha256_final(&state_, d.bytes.data());
  return d;
}

Digest sha256(ByteView data) { return Sha256().update(data).finish(); }

}  // namespace attest
