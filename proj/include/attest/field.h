// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Arithmetic in the prime field of order p = 2^64 - 2^32 + 1 and the signed
// fixed-point encoding (scale 2^16) that all committed computation uses.

#ifndef ATTEST_FIELD_H_
#define ATTEST_FIELD_H_

#include <compare>
#include <cstdint>
#include <span>

#include "attest/bytes.h"

namespace attest {

inline constexpr std::uint64_t kModulus = 0xFFFFFFFF00000001ULL;
// (p - 1) / 2: the largest value whose centered lift is non-negative.
inline constexpr std::uint64_t kHalfModulus = (kModulus - 1) / 2;

class FieldElement {
 public:
  constexpr FieldElement() = default;
  // Reduces `v` mod p.
  constexpr explicit FieldElement(std::uint64_t v) : value_(v >= kModulus ? v - kModulus : v) {}

  static FieldElement from_signed(std::int64_t v);

  constexpr std::uint64_t value() const { return value_; }
  // Signed representative in (-p/2, p/2].
  std::int64_t centered() const;

  static constexpr FieldElement zero() { return FieldElement(); }
  static constexpr FieldElement one() { return FieldElement(1); }

  friend FieldElement operator+(FieldElement a, FieldElement b);
  friend FieldElement operator-(FieldElement a, FieldElement b);
  friend FieldElement operator*(FieldElement a, FieldElement b);
  FieldElement operator-() const { return FieldElement() - *this; }
  FieldElement& operator+=(FieldElement o) { return *this = *this + o; }
  FieldElement& operator-=(FieldElement o) { return *this = *this - o; }
  FieldElement& operator*=(FieldElement o) { return *this = *this * o; }

  FieldElement pow(std::uint64_t exponent) const;
  // Throws ZeroInverse for 0.
  FieldElement inverse() const;

  friend constexpr bool operator==(FieldElement, FieldElement) = default;
  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;

  void write(ByteWriter& w) const { w.u64(value_); }
  // Rejects non-canonical encodings (value >= p).
  static FieldElement read(ByteReader& r);

 private:
  std::uint64_t value_ = 0;
};

inline FieldElement field_add(FieldElement a, FieldElement b) { return a + b; }
inline FieldElement field_mul(FieldElement a, FieldElement b) { return a * b; }
inline FieldElement field_inv(FieldElement a) { return a.inverse(); }

// Reduces a signed 128-bit integer into the field.
FieldElement reduce_i128(__int128 v);

inline constexpr int kFracBits = 16;
inline constexpr std::int64_t kFixedScale = std::int64_t{1} << kFracBits;
// Bound on the magnitude of every scaled fixed-point value the pipeline
// produces; results at or beyond it raise Overflow.
inline constexpr std::int64_t kFixedGuard = std::int64_t{1} << 40;
// Bound on exact dot-product accumulators before the final rescale.
inline constexpr __int128 kAccumulatorGuard = __int128{1} << 62;

// A real number x stored as the field element whose centered lift is
// s = x * 2^16.
class FixedPoint {
 public:
  constexpr FixedPoint() = default;
  explicit FixedPoint(FieldElement raw) : raw_(raw) {}

  // Throws OutOfRange if |scaled| > (p - 1) / 2.
  static FixedPoint from_scaled(std::int64_t scaled);

  FieldElement raw() const { return raw_; }
  std::int64_t scaled() const { return raw_.centered(); }
  double to_double() const;

  friend bool operator==(FixedPoint, FixedPoint) = default;

  void write(ByteWriter& w) const { raw_.write(w); }
  static FixedPoint read(ByteReader& r) { return FixedPoint(FieldElement::read(r)); }

 private:
  FieldElement raw_;
};

// round_half_even(x * 2^16). Throws OutOfRange unless |x| < 2^24.
FixedPoint fp_encode(double x);
// floor(s_a * s_b / 2^16). Throws Overflow when the result leaves the guard.
FixedPoint fp_mul_rescale(FixedPoint a, FixedPoint b);
// Clamp to [-bound, bound]; bound must be positive.
FixedPoint fp_saturate(FixedPoint a, double bound);
FixedPoint fp_add(FixedPoint a, FixedPoint b);
FixedPoint fp_sub(FixedPoint a, FixedPoint b);

// Exact sum of s_a[i] * s_b[i]. Throws DimensionMismatch on length mismatch
// and Overflow if the accumulator leaves kAccumulatorGuard.
__int128 fp_dot_accumulate(std::span<const FixedPoint> a, std::span<const FixedPoint> b);
// floor(acc / 2^16), guarded like fp_mul_rescale.
FixedPoint fp_rescale(__int128 acc);
inline FixedPoint fp_dot(std::span<const FixedPoint> a, std::span<const FixedPoint> b) {
  return fp_rescale(fp_dot_accumulate(a, b));
}

}  // namespace attest

#endif  // ATTEST_FIELD_H_
