// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#ifndef ATTEST_HASH_H_
#define ATTEST_HASH_H_

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <sodium.h>

#include "attest/bytes.h"

namespace attest {

// Domain-separation tags prefixed to every hashed structure.
enum class Tag : std::uint8_t {
  kLeaf = 0x00,
  kInternal = 0x01,
  kValue = 0x02,
  kTranscript = 0x03,
  kStageRecord = 0x04,
};

struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  static Digest filled(std::uint8_t b) {
    Digest d;
    d.bytes.fill(b);
    return d;
  }
  // Throws DecodeError unless `hex` encodes exactly 32 bytes.
  static Digest from_hex(std::string_view hex);
  static Digest from_bytes(ByteView b);

  std::string hex() const { return hex_encode(bytes); }
  ByteView view() const { return bytes; }
  bool is_zero() const { return *this == Digest{}; }

  void write(ByteWriter& w) const { w.raw(bytes); }
  static Digest read(ByteReader& r) { return from_bytes(r.raw(32)); }

  // Lexicographic byte order.
  friend auto operator<=>(const Digest&, const Digest&) = default;
  friend bool operator==(const Digest&, const Digest&) = default;
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    std::size_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};

// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  Sha256& update(ByteView data);
  Sha256& update(std::string_view s) { return update(as_bytes(s)); }
  Sha256& update(std::uint8_t b) { return update(ByteView(&b, 1)); }
  Sha256& update(Tag t) { return update(static_cast<std::uint8_t>(t)); }
  Sha256& update(const Digest& d) { return update(d.view()); }
  Sha256& update_u64(std::uint64_t v);
  Digest finish();

 private:
  crypto_hash_sha256_state state_;
};

Digest sha256(ByteView data);
inline Digest sha256(std::string_view s) { return sha256(as_bytes(s)); }

// Initializes libsodium once; every entry point that touches it calls this.
void ensure_sodium();

}  // namespace attest

#endif  // ATTEST_HASH_H_
