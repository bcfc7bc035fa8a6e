// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/bytes.h"

#include <limits>

#include "attest/error.h"

namespace attest {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string hex_encode(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes hex_decode(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kDecodeError, "odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kDecodeError, "invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::count(std::size_t n) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kOutOfRange, "sequence too long for 4-byte length prefix");
  }
  u32(static_cast<std::uint32_t>(n));
}

void ByteWriter::bytes(ByteView b) {
  count(b.size());
  raw(b);
}

void ByteReader::need(std::size_t n) const {
  if (in_.size() - pos_ < n) {
    throw Error(ErrorCode::kDecodeError, "truncated input");
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return in_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

ByteView ByteReader::raw(std::size_t n) {
  need(n);
  ByteView v = in_.subspan(pos_, n);
  pos_ += n;
  return v;
}

Bytes ByteReader::bytes() {
  std::size_t n = u32();
  ByteView v = raw(n);
  return Bytes(v.begin(), v.end());
}

std::string ByteReader::str() { return to_string(bytes()); }

std::size_t ByteReader::count(std::size_t min_item_size) {
  std::size_t n = u32();
  if (min_item_size > 0 && n > (in_.size() - pos_) / min_item_size) {
    throw Error(ErrorCode::kDecodeError, "sequence length exceeds input");
  }
  return n;
}

void ByteReader::expect_done() const {
  if (!done()) throw Error(ErrorCode::kDecodeError, "trailing bytes");
}

}  // namespace attest
