// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Deterministic down-selection and normalisation of the committed corpus into
// a committed training dataset, with a sampled proof that every challenged
// corpus row was carried through the declared operations.

#ifndef ATTEST_TRANSFORM_H_
#define ATTEST_TRANSFORM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "attest/canonical_json.h"
#include "attest/manifest.h"
#include "attest/record.h"

namespace attest {

enum class Comparison { kGe, kGt, kLe, kLt };

// Keeps a row iff (column value) <cmp> threshold. column == kLabelColumn
// selects the label.
struct FilterOp {
  static constexpr int kLabelColumn = -1;
  int column = kLabelColumn;
  Comparison cmp = Comparison::kGe;
  FixedPoint threshold;
};

// x_j <- (x_j - mean_j) * inv_std_j with the usual rescale rules.
struct NormalizeOp {
  std::vector<FixedPoint> mean;
  std::vector<FixedPoint> inv_std;
};

// Truncates features to `frac_bits` fractional bits (floor), 0..16.
struct QuantizeOp {
  int frac_bits = kFracBits;
};

// Keeps a row iff its position in a seeded Fisher-Yates permutation of the
// input indices falls in the first floor(n * train_permille / 1000) slots.
struct SplitOp {
  std::uint32_t train_permille = 1000;
  std::uint64_t seed = 0;
};

using TransformOp = std::variant<FilterOp, NormalizeOp, QuantizeOp, SplitOp>;

struct TransformSpec {
  std::vector<TransformOp> ops;

  Json to_json() const;
  static TransformSpec from_json(const Json& j);
  Digest hash() const { return sha256(canonical_dump(to_json())); }
};

// Applies a spec row by row. Split decisions depend on the input row count,
// so the plan is built once per (spec, input count).
class RowTransformer {
 public:
  RowTransformer(const TransformSpec& spec, std::size_t input_count);

  // nullopt when a filter or split drops the row. Throws SchemaMismatch when
  // a normalisation does not match the row dimension.
  std::optional<Record> apply(const Record& in, std::size_t input_index) const;

 private:
  TransformSpec spec_;
  // One keep-mask per SplitOp, in op order.
  std::vector<std::vector<bool>> split_keep_;
};

// Opening of one corpus leaf: the raw payload, its hash and blinding.
struct CorpusOpening {
  Bytes payload;
  Digest asset_hash;
  Blinding blinding{};
  MerklePath path;

  void write(ByteWriter& w) const;
  static CorpusOpening read(ByteReader& r);
};

CorpusOpening open_corpus(const CorpusCommitment& corpus, std::size_t index);
bool verify_corpus_opening(const Digest& root, std::size_t index, const CorpusOpening& opening);

struct TransformOutput {
  CommittedDataset dataset;
  // For each corpus row, the sorted index of the record it produced.
  std::vector<std::optional<std::size_t>> output_index;
};

// Throws SchemaMismatch for unparsable rows or inconsistent dimensions and
// EmptyOutput if every row is dropped.
TransformOutput transform_apply(const CorpusCommitment& input, const TransformSpec& spec,
                                BlindingSource& blindings);

struct TransformProof {
  Digest input_root;
  Digest output_root;
  Digest spec_hash;
  std::uint64_t input_count = 0;
  std::uint64_t output_count = 0;
  LeafCountProof input_count_proof;
  LeafCountProof output_count_proof;

  struct Item {
    CorpusOpening input;
    std::optional<RecordOpening> output;
  };
  std::vector<Item> items;

  Bytes serialize() const;
  static TransformProof deserialize(ByteView bytes);
};

// Throws ChallengeCountExceedsRows when c exceeds the corpus row count.
TransformProof transform_prove(const CorpusCommitment& input, const TransformOutput& output,
                               const TransformSpec& spec, std::size_t challenges);

bool transform_verify(const Digest& input_root, const Digest& output_root, const TransformSpec& spec,
                      const TransformProof& proof);

// Per-feature sums, minima and maxima plus label sum, as canonical JSON. The
// digest is published alongside the dataset root without a proof.
Json dataset_statistics(const CommittedDataset& dataset);

}  // namespace attest

#endif  // ATTEST_TRANSFORM_H_
