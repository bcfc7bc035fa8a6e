// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/field.h"

#include <cmath>

#include "attest/error.h"

namespace attest {
namespace {

// 2^64 mod p.
constexpr std::uint64_t kEpsilon = 0xFFFFFFFFULL;

// Reduction using 2^64 = 2^32 - 1 and 2^96 = -1 (mod p).
std::uint64_t reduce128(unsigned __int128 x) {
  const auto lo = static_cast<std::uint64_t>(x);
  const auto hi = static_cast<std::uint64_t>(x >> 64);
  const std::uint64_t hi_hi = hi >> 32;
  const std::uint64_t hi_lo = hi & kEpsilon;

  std::uint64_t t0 = lo - hi_hi;
  if (lo < hi_hi) t0 -= kEpsilon;
  const std::uint64_t t1 = hi_lo * kEpsilon;
  std::uint64_t t2 = t0 + t1;
  if (t2 < t1) t2 += kEpsilon;
  if (t2 >= kModulus) t2 -= kModulus;
  return t2;
}

__int128 abs128(__int128 v) { return v < 0 ? -v : v; }

std::int64_t guarded(__int128 scaled) {
  if (abs128(scaled) >= kFixedGuard) {
    throw Error(ErrorCode::kOverflow, "fixed-point result outside guard range");
  }
  return static_cast<std::int64_t>(scaled);
}

// floor(v / 2^kFracBits) for signed v.
__int128 floor_rescale(__int128 v) {
  // Arithmetic right shift on signed __int128 rounds toward -infinity.
  return v >> kFracBits;
}

}  // namespace

FieldElement FieldElement::from_signed(std::int64_t v) {
  if (v >= 0) return FieldElement(static_cast<std::uint64_t>(v));
  return FieldElement() - FieldElement(static_cast<std::uint64_t>(-(v + 1)) + 1);
}

std::int64_t FieldElement::centered() const {
  if (value_ <= kHalfModulus) return static_cast<std::int64_t>(value_);
  return -static_cast<std::int64_t>(kModulus - value_);
}

FieldElement operator+(FieldElement a, FieldElement b) {
  std::uint64_t s;
  if (__builtin_add_overflow(a.value_, b.value_, &s)) s += kEpsilon;
  if (s >= kModulus) s -= kModulus;
  FieldElement r;
  r.value_ = s;
  return r;
}

FieldElement operator-(FieldElement a, FieldElement b) {
  FieldElement r;
  r.value_ = a.value_ >= b.value_ ? a.value_ - b.value_ : a.value_ + (kModulus - b.value_);
  return r;
}

FieldElement operator*(FieldElement a, FieldElement b) {
  FieldElement r;
  r.value_ = reduce128(static_cast<unsigned __int128>(a.value_) * b.value_);
  return r;
}

FieldElement FieldElement::pow(std::uint64_t exponent) const {
  FieldElement base = *this;
  FieldElement acc = one();
  while (exponent != 0) {
    if (exponent & 1) acc *= base;
    base *= base;
    exponent >>= 1;
  }
  return acc;
}

FieldElement FieldElement::inverse() const {
  if (value_ == 0) throw Error(ErrorCode::kZeroInverse, "zero has no inverse");
  return pow(kModulus - 2);
}

FieldElement FieldElement::read(ByteReader& r) {
  std::uint64_t v = r.u64();
  if (v >= kModulus) throw Error(ErrorCode::kDecodeError, "non-canonical field element");
  return FieldElement(v);
}

FieldElement reduce_i128(__int128 v) {
  if (v >= 0) return FieldElement(reduce128(static_cast<unsigned __int128>(v)));
  return -FieldElement(reduce128(static_cast<unsigned __int128>(-v)));
}

FixedPoint FixedPoint::from_scaled(std::int64_t scaled) {
  if (scaled > static_cast<std::int64_t>(kHalfModulus) ||
      scaled < -static_cast<std::int64_t>(kHalfModulus)) {
    throw Error(ErrorCode::kOutOfRange, "scaled value outside centered range");
  }
  return FixedPoint(FieldElement::from_signed(scaled));
}

double FixedPoint::to_double() const {
  return std::ldexp(static_cast<double>(scaled()), -kFracBits);
}

FixedPoint fp_encode(double x) {
  if (!std::isfinite(x) || std::fabs(x) >= 16777216.0) {
    throw Error(ErrorCode::kOutOfRange, "value outside encodable range |x| < 2^24");
  }
  // nearbyint honours the default round-to-nearest-even mode; x * 2^16 is exact.
  const double scaled = std::nearbyint(std::ldexp(x, kFracBits));
  if (std::fabs(scaled) >= static_cast<double>(kFixedGuard)) {
    throw Error(ErrorCode::kOutOfRange, "encoded value reaches guard bound");
  }
  return FixedPoint::from_scaled(static_cast<std::int64_t>(scaled));
}

FixedPoint fp_mul_rescale(FixedPoint a, FixedPoint b) {
  const __int128 product = static_cast<__int128>(a.scaled()) * b.scaled();
  return FixedPoint::from_scaled(guarded(floor_rescale(product)));
}

FixedPoint fp_saturate(FixedPoint a, double bound) {
  if (!(bound > 0)) throw Error(ErrorCode::kOutOfRange, "saturation bound must be positive");
  const double limit_d = std::nearbyint(std::ldexp(bound, kFracBits));
  const std::int64_t limit =
      limit_d >= static_cast<double>(kHalfModulus) ? static_cast<std::int64_t>(kHalfModulus)
                                                   : static_cast<std::int64_t>(limit_d);
  const std::int64_t s = a.scaled();
  if (s > limit) return FixedPoint::from_scaled(limit);
  if (s < -limit) return FixedPoint::from_scaled(-limit);
  return a;
}

FixedPoint fp_add(FixedPoint a, FixedPoint b) {
  return FixedPoint::from_scaled(guarded(static_cast<__int128>(a.scaled()) + b.scaled()));
}

FixedPoint fp_sub(FixedPoint a, FixedPoint b) {
  return FixedPoint::from_scaled(guarded(static_cast<__int128>(a.scaled()) - b.scaled()));
}

__int128 fp_dot_accumulate(std::span<const FixedPoint> a, std::span<const FixedPoint> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "dot product operands differ in length");
  }
  __int128 acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<__int128>(a[i].scaled()) * b[i].scaled();
    if (abs128(acc) >= kAccumulatorGuard) {
      throw Error(ErrorCode::kOverflow, "dot-product accumulator outside guard range");
    }
  }
  return acc;
}

FixedPoint fp_rescale(__int128 acc) {
  if (abs128(acc) >= kAccumulatorGuard) {
    throw Error(ErrorCode::kOverflow, "accumulator outside guard range");
  }
  return FixedPoint::from_scaled(guarded(floor_rescale(acc)));
}

}  // namespace attest
