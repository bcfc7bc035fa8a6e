// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/model.h"

#include "attest/error.h"

namespace attest {
namespace {

const FixedPoint kHalf = FixedPoint::from_scaled(kFixedScale / 2);
const FixedPoint kQuarter = FixedPoint::from_scaled(kFixedScale / 4);
const FixedPoint kOneOver48 = fp_encode(1.0 / 48.0);

std::uint64_t non_negative(const Json& j, std::string_view key) {
  const std::int64_t v = json_int(j, key);
  if (v < 0) throw Error(ErrorCode::kSchemaMismatch, std::string(key) + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::string_view model_kind_name(ModelKind k) {
  return k == ModelKind::kLinearRegression ? "linear_regression" : "logistic_regression";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear_regression") return ModelKind::kLinearRegression;
  if (name == "logistic_regression") return ModelKind::kLogisticRegression;
  throw Error(ErrorCode::kSchemaMismatch, "unknown model kind '" + std::string(name) + "'");
}

Json ModelSpec::to_json() const {
  return Json{{"kind", std::string(model_kind_name(kind))},
              {"dimension", dimension},
              {"learning_rate", learning_rate.scaled()},
              {"batch_size", batch_size},
              {"iterations", iterations},
              {"seed", seed},
              {"activation_clamp", fp_encode(kSigmoidClamp).scaled()},
              {"unlearning", "retrain_from_init"}};
}

ModelSpec ModelSpec::from_json(const Json& j) {
  ModelSpec s;
  s.kind = parse_model_kind(json_string(j, "kind"));
  s.dimension = non_negative(j, "dimension");
  s.learning_rate = FixedPoint::from_scaled(json_int(j, "learning_rate"));
  s.batch_size = non_negative(j, "batch_size");
  s.iterations = non_negative(j, "iterations");
  s.seed = non_negative(j, "seed");
  if (s.batch_size == 0) throw Error(ErrorCode::kSchemaMismatch, "batch_size must be positive");
  if (j.contains("activation_clamp") && json_int(j, "activation_clamp") != fp_encode(kSigmoidClamp).scaled()) {
    throw Error(ErrorCode::kSchemaMismatch, "unsupported activation_clamp");
  }
  if (j.contains("unlearning") && json_string(j, "unlearning") != "retrain_from_init") {
    throw Error(ErrorCode::kSchemaMismatch, "unsupported unlearning mode");
  }
  return s;
}

void ModelWeights::write(ByteWriter& out) const {
  out.count(w.size());
  for (FixedPoint v : w) v.write(out);
  bias.write(out);
}

ModelWeights ModelWeights::read(ByteReader& in) {
  ModelWeights m;
  const std::size_t d = in.count(8);
  m.w.reserve(d);
  for (std::size_t j = 0; j < d; ++j) m.w.push_back(FixedPoint::read(in));
  m.bias = FixedPoint::read(in);
  return m;
}

Bytes ModelWeights::serialize() const {
  ByteWriter out;
  write(out);
  return std::move(out).take();
}

ModelWeights ModelWeights::deserialize(ByteView bytes) {
  ByteReader in(bytes);
  ModelWeights m = read(in);
  in.expect_done();
  return m;
}

FixedPoint sigmoid_approx(FixedPoint z) {
  const FixedPoint c = fp_saturate(z, kSigmoidClamp);
  const FixedPoint cube = fp_mul_rescale(fp_mul_rescale(c, c), c);
  return fp_sub(fp_add(kHalf, fp_mul_rescale(c, kQuarter)), fp_mul_rescale(cube, kOneOver48));
}

ForwardResult forward(ModelKind kind, const ModelWeights& weights, std::span<const FixedPoint> x) {
  if (x.size() != weights.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "input has " + std::to_string(x.size()) +
                                                   " features, model expects " +
                                                   std::to_string(weights.dimension()));
  }
  const FixedPoint z = fp_add(fp_dot(weights.w, x), weights.bias);
  return {z, kind == ModelKind::kLogisticRegression ? sigmoid_approx(z) : z};
}

bool classify(FixedPoint score) { return score.scaled() >= kFixedScale / 2; }

Digest weight_leaf(const Blinding& blinding, std::uint32_t index, FixedPoint value) {
  ByteWriter w;
  w.u32(index);
  value.write(w);
  return Sha256().update(Tag::kLeaf).update(ByteView(blinding)).update(w.data()).finish();
}

WeightsOpening WeightsOpening::fresh(ModelWeights weights, BlindingSource& source) {
  WeightsOpening o{std::move(weights), {}};
  for (std::size_t j = 0; j <= o.weights.dimension(); ++j) o.blindings.push_back(source.next());
  return o;
}

std::vector<Digest> WeightsOpening::leaves() const {
  const std::size_t d = weights.dimension();
  if (blindings.size() != d + 1) throw Error(ErrorCode::kDimensionMismatch, "need one blinding per coordinate plus bias");
  std::vector<Digest> out;
  out.reserve(d + 1);
  for (std::size_t j = 0; j < d; ++j) out.push_back(weight_leaf(blindings[j], static_cast<std::uint32_t>(j), weights.w[j]));
  out.push_back(weight_leaf(blindings[d], static_cast<std::uint32_t>(d), weights.bias));
  return out;
}

MerkleTree WeightsOpening::tree() const {
  const std::vector<Digest> l = leaves();
  return MerkleTree::build(std::span<const Digest>(l));
}

void WeightsOpening::write(ByteWriter& out) const {
  weights.write(out);
  out.count(blindings.size());
  for (const Blinding& b : blindings) write_blinding(out, b);
}

WeightsOpening WeightsOpening::read(ByteReader& in) {
  WeightsOpening o;
  o.weights = ModelWeights::read(in);
  const std::size_t n = in.count(32);
  for (std::size_t i = 0; i < n; ++i) o.blindings.push_back(read_blinding(in));
  return o;
}

Bytes WeightsOpening::serialize_blindings() const {
  ByteWriter out;
  out.count(blindings.size());
  for (const Blinding& b : blindings) write_blinding(out, b);
  return std::move(out).take();
}

std::vector<Blinding> WeightsOpening::deserialize_blindings(ByteView bytes) {
  ByteReader in(bytes);
  std::vector<Blinding> out;
  const std::size_t n = in.count(32);
  for (std::size_t i = 0; i < n; ++i) out.push_back(read_blinding(in));
  in.expect_done();
  return out;
}

bool verify_weights_opening(const Digest& root, const WeightsOpening& opening) {
  if (opening.blindings.size() != opening.weights.dimension() + 1) return false;
  return opening.root() == root;
}

void CoordinateOpening::write(ByteWriter& out) const {
  out.u32(index);
  value.write(out);
  write_blinding(out, blinding);
  path.write(out);
}

CoordinateOpening CoordinateOpening::read(ByteReader& in) {
  CoordinateOpening o;
  o.index = in.u32();
  o.value = FixedPoint::read(in);
  o.blinding = read_blinding(in);
  o.path = MerklePath::read(in);
  return o;
}

CoordinateOpening open_coordinate(const WeightsOpening& weights, std::uint32_t index) {
  const std::size_t d = weights.weights.dimension();
  if (index > d) throw Error(ErrorCode::kIndexOutOfRange, "coordinate index beyond bias");
  const FixedPoint v = index == d ? weights.weights.bias : weights.weights.w[index];
  return CoordinateOpening{index, v, weights.blindings.at(index), weights.tree().prove(index)};
}

bool verify_coordinate_opening(const Digest& root, const CoordinateOpening& o) {
  return o.path.leaf_index == o.index && merkle_verify(root, weight_leaf(o.blinding, o.index, o.value), o.path);
}

}  // namespace attest
