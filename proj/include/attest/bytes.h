// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#ifndef ATTEST_BYTES_H_
#define ATTEST_BYTES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attest {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}
inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return Bytes(v.begin(), v.end());
}
inline std::string to_string(ByteView b) {
  return std::string(reinterpret_cast<const char*>(b.data()), b.size());
}

std::string hex_encode(ByteView bytes);
// Accepts upper or lower case; throws DecodeError on odd length or bad digit.
Bytes hex_decode(std::string_view hex);

// Canonical binary encoding shared by every proof object: little-endian
// fixed-width integers, fixed-size items written raw, variable-length byte
// strings and sequences prefixed with a 4-byte little-endian length.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void raw(ByteView b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void bytes(ByteView b);
  void str(std::string_view s) { bytes(as_bytes(s)); }
  void count(std::size_t n);

  const Bytes& data() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  ByteView raw(std::size_t n);
  Bytes bytes();
  std::string str();
  // Reads a sequence length and rejects counts that cannot fit in the
  // remaining input assuming at least `min_item_size` bytes per item.
  std::size_t count(std::size_t min_item_size = 1);

  bool done() const { return pos_ == in_.size(); }
  // Throws DecodeError if unread bytes remain.
  void expect_done() const;

 private:
  void need(std::size_t n) const;

  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace attest

#endif  // ATTEST_BYTES_H_
