// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/infer_eval.h"

#include <algorithm>
#include <map>

#include "attest/error.h"
#include "attest/transcript.h"

namespace attest {

Bytes encode_input(std::span<const FixedPoint> x) {
  ByteWriter w;
  w.count(x.size());
  for (FixedPoint v : x) v.write(w);
  return std::move(w).take();
}

Bytes encode_output(FixedPoint output, bool predicted_class) {
  ByteWriter w;
  output.write(w);
  w.u8(predicted_class ? 1 : 0);
  return std::move(w).take();
}

namespace {

Bytes encode_value(FixedPoint v) {
  ByteWriter w;
  v.write(w);
  return std::move(w).take();
}

// Output must follow from z by the public activation and threshold.
bool output_consistent(ModelKind kind, FixedPoint z, FixedPoint output, bool predicted_class) {
  const FixedPoint expected = kind == ModelKind::kLogisticRegression ? sigmoid_approx(z) : z;
  return expected == output && classify(output) == predicted_class;
}

std::vector<std::size_t> inference_challenges(const Digest& weights_root, const Digest& input_commitment,
                                              const Digest& output_commitment, const Digest& z_commitment,
                                              const Digest& product_root, std::size_t d, std::size_t c) {
  Transcript t("attest/inference/v1");
  t.absorb("weights_root", weights_root);
  t.absorb("input_commitment", input_commitment);
  t.absorb("output_commitment", output_commitment);
  t.absorb("z_commitment", z_commitment);
  t.absorb("product_root", product_root);
  t.absorb_u64("dimension", d);
  t.absorb_u64("challenges", c);
  return t.challenge_indices(c, d);
}

void write_flag(ByteWriter& w, bool b) { w.u8(b ? 1 : 0); }

bool read_flag(ByteReader& r) {
  const std::uint8_t f = r.u8();
  if (f > 1) throw Error(ErrorCode::kDecodeError, "bad flag byte");
  return f == 1;
}

}  // namespace

Digest InferenceRecord::input_commitment() const { return commit_create(encode_input(input), input_blinding).digest; }
Digest InferenceRecord::z_commitment() const { return commit_create(encode_value(z), z_blinding).digest; }
Digest InferenceRecord::output_commitment() const {
  return commit_create(encode_output(output, predicted_class), output_blinding).digest;
}

InferenceRecord infer(ModelKind kind, const WeightsOpening& weights, std::span<const FixedPoint> x,
                      BlindingSource& blindings) {
  const ForwardResult f = forward(kind, weights.weights, x);
  InferenceRecord r;
  r.kind = kind;
  r.input.assign(x.begin(), x.end());
  r.z = f.z;
  r.output = f.activated;
  r.predicted_class = classify(f.activated);
  r.weights_root = weights.root();
  r.input_blinding = blindings.next();
  r.z_blinding = blindings.next();
  r.output_blinding = blindings.next();
  return r;
}

std::string_view inference_mode_name(InferenceMode m) { return m == InferenceMode::kAudit ? "audit" : "spotcheck"; }

InferenceMode parse_inference_mode(std::string_view s) {
  if (s == "audit") return InferenceMode::kAudit;
  if (s == "spotcheck") return InferenceMode::kSpotcheck;
  throw Error(ErrorCode::kSchemaMismatch, "unknown inference mode '" + std::string(s) + "'");
}

Digest product_leaf(const Blinding& blinding, std::uint32_t index, FieldElement value) {
  ByteWriter w;
  w.u32(index);
  value.write(w);
  return Sha256().update(Tag::kLeaf).update(ByteView(blinding)).update(w.data()).finish();
}

void ProductOpening::write(ByteWriter& w) const {
  w.u32(index);
  value.write(w);
  write_blinding(w, blinding);
  path.write(w);
}

ProductOpening ProductOpening::read(ByteReader& r) {
  ProductOpening o;
  o.index = r.u32();
  o.value = FieldElement::read(r);
  o.blinding = read_blinding(r);
  o.path = MerklePath::read(r);
  return o;
}

std::vector<FieldElement> inference_products(const ModelWeights& weights, std::span<const FixedPoint> x) {
  if (x.size() != weights.dimension()) throw Error(ErrorCode::kDimensionMismatch, "input/weights dimension");
  std::vector<FieldElement> u;
  u.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) u.push_back(weights.w[j].raw() * x[j].raw());
  return u;
}

namespace {

InferenceProof proof_header(const InferenceRecord& record, InferenceMode mode) {
  InferenceProof p;
  p.mode = mode;
  p.kind = record.kind;
  p.weights_root = record.weights_root;
  p.input = record.input;
  p.input_blinding = record.input_blinding;
  p.z = record.z;
  p.z_blinding = record.z_blinding;
  p.output = record.output;
  p.predicted_class = record.predicted_class;
  p.output_blinding = record.output_blinding;
  return p;
}

}  // namespace

InferenceProof prove_spotcheck(const InferenceRecord& record, const WeightsOpening& weights,
                               std::span<const FieldElement> products, std::size_t challenges,
                               BlindingSource& blindings) {
  const std::size_t d = weights.weights.dimension();
  if (products.size() != d || record.input.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "products do not match the model dimension");
  }
  InferenceProof p = proof_header(record, InferenceMode::kSpotcheck);
  std::vector<Blinding> product_blindings;
  std::vector<Digest> leaves;
  for (std::size_t j = 0; j < d; ++j) {
    product_blindings.push_back(blindings.next());
    leaves.push_back(product_leaf(product_blindings[j], static_cast<std::uint32_t>(j), products[j]));
  }
  const MerkleTree tree = MerkleTree::build(std::span<const Digest>(leaves));
  p.product_root = tree.root();
  p.product_count = prove_leaf_count(tree, leaves.back().view());

  const std::size_t c = std::min(challenges, d);
  for (std::size_t j : inference_challenges(p.weights_root, record.input_commitment(), record.output_commitment(),
                                            record.z_commitment(), p.product_root, d, c)) {
    const auto idx = static_cast<std::uint32_t>(j);
    p.coordinates.push_back(open_coordinate(weights, idx));
    p.products.push_back(ProductOpening{idx, products[j], product_blindings[j], tree.prove(j)});
  }
  if (c == d) p.bias = open_coordinate(weights, static_cast<std::uint32_t>(d));
  return p;
}

InferenceProof prove_inference(const InferenceRecord& record, const WeightsOpening& weights, InferenceMode mode,
                               std::size_t challenges, BlindingSource& blindings) {
  if (mode == InferenceMode::kSpotcheck) {
    return prove_spotcheck(record, weights, inference_products(weights.weights, record.input), challenges,
                           blindings);
  }
  InferenceProof p = proof_header(record, InferenceMode::kAudit);
  p.weights = weights;
  return p;
}

std::string InferenceVerdict::describe() const {
  std::string s = std::string(inference_mode_name(mode)) + ": " + (accepted ? "accepted" : "rejected");
  if (mode == InferenceMode::kSpotcheck) {
    s += ", opened " + std::to_string(opened) + "/" + std::to_string(dimension) + " coordinates";
    s += sum_checked ? ", sum checked" : ", sum not checked";
  }
  return s;
}

InferenceVerdict verify_inference(const InferenceProof& proof, const InferencePublicInputs& inputs) {
  InferenceVerdict v;
  v.mode = proof.mode;
  v.dimension = proof.input.size();
  try {
    const Digest input_c = commit_create(encode_input(proof.input), proof.input_blinding).digest;
    const Digest output_c = commit_create(encode_output(proof.output, proof.predicted_class), proof.output_blinding).digest;
    const Digest z_c = commit_create(encode_value(proof.z), proof.z_blinding).digest;
    if (proof.weights_root != inputs.weights_root || input_c != inputs.input_commitment ||
        output_c != inputs.output_commitment || proof.kind != inputs.kind) {
      return v;
    }
    if (!output_consistent(proof.kind, proof.z, proof.output, proof.predicted_class)) return v;

    if (proof.mode == InferenceMode::kAudit) {
      if (!proof.weights || !proof.coordinates.empty() || !proof.products.empty() || proof.bias) return v;
      if (!verify_weights_opening(proof.weights_root, *proof.weights)) return v;
      const ForwardResult f = forward(proof.kind, proof.weights->weights, proof.input);
      v.opened = v.dimension;
      v.sum_checked = true;
      v.accepted = f.z == proof.z && f.activated == proof.output;
      return v;
    }

    const std::size_t d = v.dimension;
    const std::size_t c = proof.coordinates.size();
    if (proof.weights || d == 0 || proof.products.size() != c || c > d) return v;
    if (c < std::min(inputs.min_challenges, d)) return v;
    if (!verify_leaf_count(proof.product_root, d, proof.product_count)) return v;
    const std::vector<std::size_t> expected =
        inference_challenges(proof.weights_root, input_c, output_c, z_c, proof.product_root, d, c);
    for (std::size_t k = 0; k < c; ++k) {
      const CoordinateOpening& w = proof.coordinates[k];
      const ProductOpening& u = proof.products[k];
      if (w.index != expected[k] || u.index != expected[k]) return v;
      if (!verify_coordinate_opening(proof.weights_root, w)) return v;
      if (u.path.leaf_index != u.index ||
          !merkle_verify(proof.product_root, product_leaf(u.blinding, u.index, u.value), u.path)) {
        return v;
      }
      if (u.value != w.value.raw() * proof.input[u.index].raw()) return v;
    }
    v.opened = c;
    if (c == d) {
      if (!proof.bias || proof.bias->index != d || !verify_coordinate_opening(proof.weights_root, *proof.bias)) {
        return v;
      }
      __int128 acc = 0;
      for (const ProductOpening& u : proof.products) acc += u.value.centered();
      if (fp_add(fp_rescale(acc), proof.bias->value) != proof.z) return v;
      v.sum_checked = true;
    } else if (proof.bias) {
      return v;
    }
    v.accepted = true;
    return v;
  } catch (const Error&) {
    v.accepted = false;
    return v;
  }
}

Bytes InferenceProof::serialize() const {
  ByteWriter w;
  w.u8(mode == InferenceMode::kAudit ? 0 : 1);
  w.u8(kind == ModelKind::kLinearRegression ? 0 : 1);
  weights_root.write(w);
  w.bytes(encode_input(input));
  write_blinding(w, input_blinding);
  z.write(w);
  write_blinding(w, z_blinding);
  output.write(w);
  write_flag(w, predicted_class);
  write_blinding(w, output_blinding);
  write_flag(w, weights.has_value());
  if (weights) weights->write(w);
  product_root.write(w);
  product_count.write(w);
  w.count(coordinates.size());
  for (const CoordinateOpening& c : coordinates) c.write(w);
  w.count(products.size());
  for (const ProductOpening& u : products) u.write(w);
  write_flag(w, bias.has_value());
  if (bias) bias->write(w);
  return std::move(w).take();
}

InferenceProof InferenceProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  InferenceProof p;
  p.mode = read_flag(r) ? InferenceMode::kSpotcheck : InferenceMode::kAudit;
  p.kind = read_flag(r) ? ModelKind::kLogisticRegression : ModelKind::kLinearRegression;
  p.weights_root = Digest::read(r);
  {
    const Bytes in = r.bytes();
    ByteReader ir(in);
    const std::size_t n = ir.count(8);
    for (std::size_t i = 0; i < n; ++i) p.input.push_back(FixedPoint::read(ir));
    ir.expect_done();
  }
  p.input_blinding = read_blinding(r);
  p.z = FixedPoint::read(r);
  p.z_blinding = read_blinding(r);
  p.output = FixedPoint::read(r);
  p.predicted_class = read_flag(r);
  p.output_blinding = read_blinding(r);
  if (read_flag(r)) p.weights = WeightsOpening::read(r);
  p.product_root = Digest::read(r);
  p.product_count = LeafCountProof::read(r);
  const std::size_t nc = r.count();
  for (std::size_t i = 0; i < nc; ++i) p.coordinates.push_back(CoordinateOpening::read(r));
  const std::size_t np = r.count();
  for (std::size_t i = 0; i < np; ++i) p.products.push_back(ProductOpening::read(r));
  if (read_flag(r)) p.bias = CoordinateOpening::read(r);
  r.expect_done();
  return p;
}

Json EvaluationReport::to_json() const {
  Json groups_json = Json::array();
  for (const GroupCount& g : groups) {
    groups_json.push_back(Json{{"value", g.value}, {"correct", g.correct}, {"total", g.total}});
  }
  Json preds = Json::array();
  for (const Digest& d : predictions) preds.push_back(d.hex());
  Json j{{"benchmark_root", benchmark_root.hex()},
         {"n", n},
         {"weights_root", weights_root.hex()},
         {"model_kind", std::string(model_kind_name(kind))},
         {"accuracy_count", accuracy_count},
         {"groups", groups_json},
         {"predictions", preds}};
  if (group_column) j["group_column"] = *group_column;
  return j;
}

EvaluationReport EvaluationReport::from_json(const Json& j) {
  EvaluationReport r;
  r.benchmark_root = json_digest(j, "benchmark_root");
  const std::int64_t n = json_int(j, "n");
  const std::int64_t acc = json_int(j, "accuracy_count");
  if (n < 0 || acc < 0) throw Error(ErrorCode::kSchemaMismatch, "negative count in evaluation report");
  r.n = static_cast<std::uint64_t>(n);
  r.accuracy_count = static_cast<std::uint64_t>(acc);
  r.weights_root = json_digest(j, "weights_root");
  r.kind = parse_model_kind(json_string(j, "model_kind"));
  if (j.contains("group_column")) {
    const std::int64_t c = json_int(j, "group_column");
    if (c < 0 || c > UINT32_MAX) throw Error(ErrorCode::kSchemaMismatch, "bad group_column");
    r.group_column = static_cast<std::uint32_t>(c);
  }
  const Json& groups = json_field(j, "groups");
  if (!groups.is_array()) throw Error(ErrorCode::kSchemaMismatch, "groups must be an array");
  for (const Json& g : groups) {
    const std::int64_t correct = json_int(g, "correct");
    const std::int64_t total = json_int(g, "total");
    if (correct < 0 || total < 0) throw Error(ErrorCode::kSchemaMismatch, "negative group count");
    r.groups.push_back(GroupCount{json_int(g, "value"), static_cast<std::uint64_t>(correct),
                                  static_cast<std::uint64_t>(total)});
  }
  const Json& preds = json_field(j, "predictions");
  if (!preds.is_array()) throw Error(ErrorCode::kSchemaMismatch, "predictions must be an array");
  for (const Json& p : preds) {
    if (!p.is_string()) throw Error(ErrorCode::kSchemaMismatch, "prediction must be a hex string");
    r.predictions.push_back(Digest::from_hex(p.get<std::string>()));
  }
  return r;
}

Bytes EvaluationAudit::serialize() const {
  ByteWriter w;
  weights.write(w);
  w.count(prediction_blindings.size());
  for (const Blinding& b : prediction_blindings) write_blinding(w, b);
  return std::move(w).take();
}

EvaluationAudit EvaluationAudit::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  EvaluationAudit a;
  a.weights = WeightsOpening::read(r);
  const std::size_t n = r.count(32);
  for (std::size_t i = 0; i < n; ++i) a.prediction_blindings.push_back(read_blinding(r));
  r.expect_done();
  return a;
}

Digest prediction_commitment(std::uint64_t index, FixedPoint output, bool predicted_class, const Blinding& blinding) {
  ByteWriter w;
  w.u64(index);
  w.raw(encode_output(output, predicted_class));
  return commit_create(w.data(), blinding).digest;
}

namespace {

// Recomputes predictions and counts; blindings index-aligned with rows.
EvaluationReport compute_report(ModelKind kind, const WeightsOpening& weights, const PublicDataset& benchmark,
                                std::optional<std::uint32_t> group_column, std::span<const Blinding> blindings) {
  const std::size_t d = weights.weights.dimension();
  if (group_column && *group_column >= d) {
    throw Error(ErrorCode::kGroupColumnOutOfRange, "group column " + std::to_string(*group_column) +
                                                       " out of range for dimension " + std::to_string(d));
  }
  EvaluationReport r;
  r.benchmark_root = benchmark.root();
  r.n = benchmark.size();
  r.weights_root = weights.root();
  r.kind = kind;
  r.group_column = group_column;
  std::map<std::int64_t, GroupCount> groups;
  const std::vector<Record>& rows = benchmark.records();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ForwardResult f = forward(kind, weights.weights, rows[i].features);
    const bool predicted = classify(f.activated);
    const bool correct = predicted == classify(rows[i].label);
    r.predictions.push_back(prediction_commitment(i, f.activated, predicted, blindings[i]));
    if (correct) ++r.accuracy_count;
    if (group_column) {
      const std::int64_t value = rows[i].features[*group_column].scaled();
      GroupCount& g = groups[value];
      g.value = value;
      ++g.total;
      if (correct) ++g.correct;
    }
  }
  for (const auto& [value, g] : groups) r.groups.push_back(g);
  return r;
}

}  // namespace

EvaluationResult evaluate(ModelKind kind, const WeightsOpening& weights, const PublicDataset& benchmark,
                          std::optional<std::uint32_t> group_column, BlindingSource& blindings) {
  std::vector<Blinding> prediction_blindings;
  for (std::size_t i = 0; i < benchmark.size(); ++i) prediction_blindings.push_back(blindings.next());
  EvaluationReport report = compute_report(kind, weights, benchmark, group_column, prediction_blindings);
  return EvaluationResult{std::move(report), EvaluationAudit{weights, std::move(prediction_blindings)}};
}

bool verify_evaluation(const EvaluationReport& report, const PublicDataset& benchmark, const EvaluationAudit& audit) {
  if (report.accuracy_count > report.n) return false;
  if (report.group_column) {
    std::uint64_t correct = 0, total = 0;
    for (const GroupCount& g : report.groups) {
      if (g.correct > g.total) return false;
      correct += g.correct;
      total += g.total;
    }
    if (correct != report.accuracy_count || total != report.n) return false;
  } else if (!report.groups.empty()) {
    return false;
  }
  if (report.benchmark_root != benchmark.root() || report.n != benchmark.size()) return false;
  if (audit.prediction_blindings.size() != benchmark.size()) return false;
  if (!verify_weights_opening(report.weights_root, audit.weights)) return false;
  try {
    return compute_report(report.kind, audit.weights, benchmark, report.group_column, audit.prediction_blindings) ==
           report;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace attest
