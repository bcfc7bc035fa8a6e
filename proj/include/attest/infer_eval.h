// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Inference bound to committed weights, and evaluation on public benchmarks.

#ifndef ATTEST_INFER_EVAL_H_
#define ATTEST_INFER_EVAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attest/bytes.h"
#include "attest/canonical_json.h"
#include "attest/commitment.h"
#include "attest/field.h"
#include "attest/merkle.h"
#include "attest/model.h"
#include "attest/record.h"

namespace attest {

struct InferenceRecord {
  ModelKind kind = ModelKind::kLinearRegression;
  std::vector<FixedPoint> input;
  FixedPoint z;
  FixedPoint output;
  bool predicted_class = false;
  Digest weights_root;
  Blinding input_blinding{};
  Blinding z_blinding{};
  Blinding output_blinding{};

  Digest input_commitment() const;
  Digest z_commitment() const;
  Digest output_commitment() const;
};

Bytes encode_input(std::span<const FixedPoint> x);
Bytes encode_output(FixedPoint output, bool predicted_class);

// Uses the shared forward pass; throws DimensionMismatch.
InferenceRecord infer(ModelKind kind, const WeightsOpening& weights, std::span<const FixedPoint> x,
                      BlindingSource& blindings);

enum class InferenceMode { kAudit, kSpotcheck };

std::string_view inference_mode_name(InferenceMode m);
InferenceMode parse_inference_mode(std::string_view s);

// Committed per-coordinate product u_j = w_j * x_j, before rescaling.
struct ProductOpening {
  std::uint32_t index = 0;
  FieldElement value;
  Blinding blinding{};
  MerklePath path;

  void write(ByteWriter& w) const;
  static ProductOpening read(ByteReader& r);
};

Digest product_leaf(const Blinding& blinding, std::uint32_t index, FieldElement value);

struct InferenceProof {
  InferenceMode mode = InferenceMode::kAudit;
  ModelKind kind = ModelKind::kLinearRegression;
  Digest weights_root;
  std::vector<FixedPoint> input;
  Blinding input_blinding{};
  FixedPoint z;
  Blinding z_blinding{};
  FixedPoint output;
  bool predicted_class = false;
  Blinding output_blinding{};

  // Audit mode.
  std::optional<WeightsOpening> weights;

  // Spotcheck mode.
  Digest product_root;
  LeafCountProof product_count;
  std::vector<CoordinateOpening> coordinates;
  std::vector<ProductOpening> products;
  // Present only when every coordinate is challenged.
  std::optional<CoordinateOpening> bias;

  Bytes serialize() const;
  static InferenceProof deserialize(ByteView bytes);
};

std::vector<FieldElement> inference_products(const ModelWeights& weights, std::span<const FixedPoint> x);

// c is clamped to the dimension.
InferenceProof prove_inference(const InferenceRecord& record, const WeightsOpening& weights, InferenceMode mode,
                               std::size_t challenges, BlindingSource& blindings);

// Spotcheck proof over caller-supplied products, honest or not.
InferenceProof prove_spotcheck(const InferenceRecord& record, const WeightsOpening& weights,
                               std::span<const FieldElement> products, std::size_t challenges,
                               BlindingSource& blindings);

struct InferencePublicInputs {
  Digest weights_root;
  Digest input_commitment;
  Digest output_commitment;
  ModelKind kind = ModelKind::kLinearRegression;
  std::size_t min_challenges = 1;
};

struct InferenceVerdict {
  bool accepted = false;
  InferenceMode mode = InferenceMode::kAudit;
  std::size_t opened = 0;
  std::size_t dimension = 0;
  // False in spotcheck mode unless all coordinates were opened.
  bool sum_checked = false;

  std::string describe() const;
  explicit operator bool() const { return accepted; }
};

InferenceVerdict verify_inference(const InferenceProof& proof, const InferencePublicInputs& inputs);

struct GroupCount {
  std::int64_t value = 0;  // scaled group-column value
  std::uint64_t correct = 0;
  std::uint64_t total = 0;

  friend bool operator==(const GroupCount&, const GroupCount&) = default;
};

struct EvaluationReport {
  Digest benchmark_root;
  std::uint64_t n = 0;
  Digest weights_root;
  ModelKind kind = ModelKind::kLinearRegression;
  std::optional<std::uint32_t> group_column;
  std::uint64_t accuracy_count = 0;
  std::vector<GroupCount> groups;  // ascending by value
  std::vector<Digest> predictions;

  Json to_json() const;
  static EvaluationReport from_json(const Json& j);
  Bytes canonical_bytes() const { return attest::canonical_bytes(to_json()); }
  Digest digest() const { return sha256(canonical_bytes()); }

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

// Held by the evaluator; handed to an auditor.
struct EvaluationAudit {
  WeightsOpening weights;
  std::vector<Blinding> prediction_blindings;

  Bytes serialize() const;
  static EvaluationAudit deserialize(ByteView bytes);
};

struct EvaluationResult {
  EvaluationReport report;
  EvaluationAudit audit;
};

Digest prediction_commitment(std::uint64_t index, FixedPoint output, bool predicted_class, const Blinding& blinding);

// A row counts as correct when the thresholded output matches the
// thresholded label. Throws GroupColumnOutOfRange.
EvaluationResult evaluate(ModelKind kind, const WeightsOpening& weights, const PublicDataset& benchmark,
                          std::optional<std::uint32_t> group_column, BlindingSource& blindings);

bool verify_evaluation(const EvaluationReport& report, const PublicDataset& benchmark, const EvaluationAudit& audit);

}  // namespace attest

#endif  // ATTEST_INFER_EVAL_H_
