// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Model description, weights, their per-coordinate commitment and the
// fixed-point forward pass shared by training, inference and evaluation.

#ifndef ATTEST_MODEL_H_
#define ATTEST_MODEL_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "attest/bytes.h"
#include "attest/canonical_json.h"
#include "attest/commitment.h"
#include "attest/field.h"
#include "attest/merkle.h"

namespace attest {

enum class ModelKind { kLinearRegression, kLogisticRegression };

std::string_view model_kind_name(ModelKind k);
// Throws SchemaMismatch.
ModelKind parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::kLinearRegression;
  std::size_t dimension = 0;
  FixedPoint learning_rate;
  std::size_t batch_size = 1;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;

  Json to_json() const;
  static ModelSpec from_json(const Json& j);
  Digest hash() const { return sha256(canonical_dump(to_json())); }
};

struct ModelWeights {
  std::vector<FixedPoint> w;
  FixedPoint bias;

  static ModelWeights zeros(std::size_t d) { return ModelWeights{std::vector<FixedPoint>(d), FixedPoint()}; }
  std::size_t dimension() const { return w.size(); }

  // d, then coordinates, then bias.
  void write(ByteWriter& out) const;
  static ModelWeights read(ByteReader& in);
  Bytes serialize() const;
  static ModelWeights deserialize(ByteView bytes);

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

// Saturation bound applied before the cubic sigmoid. The cubic
// 1/2 + z/4 - z^3/48 peaks at |z| = 2, so clamping there keeps it monotone.
inline constexpr double kSigmoidClamp = 2.0;

// 1/2 + z/4 - z^3/48 on fp_saturate(z, kSigmoidClamp).
FixedPoint sigmoid_approx(FixedPoint z);

struct ForwardResult {
  FixedPoint z;          // w . x + b
  FixedPoint activated;  // z for linear models, sigmoid_approx(z) for logistic
};

// Throws DimensionMismatch when x and the weights differ in length.
ForwardResult forward(ModelKind kind, const ModelWeights& weights, std::span<const FixedPoint> x);

// Class decision at score 1/2; a score of exactly 1/2 is class 1.
bool classify(FixedPoint score);

// Commitment leaf for coordinate `index` (d is the bias):
// SHA-256(0x00 || blinding || index as u32 || value as 8 bytes).
Digest weight_leaf(const Blinding& blinding, std::uint32_t index, FixedPoint value);

// Weights together with the blindings of their coordinate leaves.
struct WeightsOpening {
  ModelWeights weights;
  std::vector<Blinding> blindings;  // d + 1 entries

  static WeightsOpening fresh(ModelWeights weights, BlindingSource& source);

  std::vector<Digest> leaves() const;
  MerkleTree tree() const;
  Digest root() const { return tree().root(); }

  void write(ByteWriter& out) const;
  static WeightsOpening read(ByteReader& in);
  // Secret side file: the blindings only.
  Bytes serialize_blindings() const;
  static std::vector<Blinding> deserialize_blindings(ByteView bytes);
};

bool verify_weights_opening(const Digest& root, const WeightsOpening& opening);

struct CoordinateOpening {
  std::uint32_t index = 0;
  FixedPoint value;
  Blinding blinding{};
  MerklePath path;

  void write(ByteWriter& out) const;
  static CoordinateOpening read(ByteReader& in);
};

CoordinateOpening open_coordinate(const WeightsOpening& weights, std::uint32_t index);
bool verify_coordinate_opening(const Digest& root, const CoordinateOpening& opening);

}  // namespace attest

#endif  // ATTEST_MODEL_H_
