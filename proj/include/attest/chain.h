// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Append-only, hash-linked log of pipeline stage records.

#ifndef ATTEST_CHAIN_H_
#define ATTEST_CHAIN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attest/bytes.h"
#include "attest/canonical_json.h"
#include "attest/hash.h"
#include "attest/manifest.h"

namespace attest {

enum class StageType { kCorpus, kTransform, kTrain, kFineTune, kEvaluate, kInfer, kUnlearn };

std::string_view stage_type_name(StageType t);
StageType parse_stage_type(std::string_view s);

namespace labels {
inline constexpr std::string_view kCorpusRoot = "corpus_root";
inline constexpr std::string_view kDatasetRoot = "dataset_root";
inline constexpr std::string_view kStatisticsDigest = "statistics_digest";
inline constexpr std::string_view kWeightsRoot = "weights_root";
inline constexpr std::string_view kTraceRoot = "trace_root";
inline constexpr std::string_view kInitCommitment = "init_commitment";
inline constexpr std::string_view kBenchmarkRoot = "benchmark_root";
inline constexpr std::string_view kEvaluationReport = "evaluation_report";
inline constexpr std::string_view kInputCommitment = "input_commitment";
inline constexpr std::string_view kOutputCommitment = "output_commitment";
inline constexpr std::string_view kRemovedLeaf = "removed_leaf";
}  // namespace labels

struct LabeledCommitment {
  std::string label;
  Digest digest;

  friend bool operator==(const LabeledCommitment&, const LabeledCommitment&) = default;
};

struct StageRecord {
  std::uint64_t index = 0;
  StageType type = StageType::kCorpus;
  Digest prev_record_hash;
  std::vector<LabeledCommitment> inputs;
  std::vector<LabeledCommitment> outputs;
  Digest spec_hash;
  Digest proof_digest;
  Digest record_hash;

  // Every field except record_hash.
  Json body_json() const;
  // SHA-256(0x04 || canonical body).
  Digest compute_hash() const;
  Json to_json() const;
  std::string canonical_line() const { return canonical_dump(to_json()); }
  static StageRecord from_json(const Json& j);

  const Digest* output(std::string_view label) const;
  const Digest* input(std::string_view label) const;

  friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

// Content-addressed proof blobs, keyed by SHA-256 of the blob.
class ProofStore {
 public:
  virtual ~ProofStore() = default;
  virtual Digest put(ByteView blob) = 0;
  virtual std::optional<Bytes> get(const Digest& digest) const = 0;
};

class MemoryProofStore : public ProofStore {
 public:
  Digest put(ByteView blob) override;
  std::optional<Bytes> get(const Digest& digest) const override;
  // Test hook: replaces the stored bytes without re-keying.
  void overwrite(const Digest& digest, Bytes blob) { blobs_[digest] = std::move(blob); }

 private:
  std::map<Digest, Bytes> blobs_;
};

// Files named by lowercase hex digest.
class DirectoryProofStore : public ProofStore {
 public:
  explicit DirectoryProofStore(std::filesystem::path dir) : dir_(std::move(dir)) {}
  Digest put(ByteView blob) override;
  std::optional<Bytes> get(const Digest& digest) const override;
  std::filesystem::path path_for(const Digest& digest) const { return dir_ / digest.hex(); }

 private:
  std::filesystem::path dir_;
};

class PipelineChain {
 public:
  const std::vector<StageRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  // All-zero for an empty chain.
  Digest head() const { return records_.empty() ? Digest() : records_.back().record_hash; }

  // Checks index, prev link, record hash and input linkage. Throws
  // NonContiguousIndex or UnlinkedInput.
  void append(StageRecord record);

  // Latest record at or before `before` emitting (label, digest).
  std::optional<std::size_t> producer_of(const LabeledCommitment& c, std::size_t before) const;
  // Latest record emitting `label`.
  std::optional<std::size_t> latest_output(std::string_view label) const;
  std::optional<std::size_t> latest_of_type(StageType t) const;

  std::string to_jsonl() const;
  // Strict parse; throws DecodeError or SchemaMismatch.
  static PipelineChain from_jsonl(std::string_view text);

 private:
  std::vector<StageRecord> records_;
};

StageRecord chain_append(PipelineChain& chain, StageType type, std::vector<LabeledCommitment> inputs,
                         std::vector<LabeledCommitment> outputs, const Digest& spec_hash, ByteView proof_blob,
                         ProofStore& store);

struct VerificationContext {
  TrustedKeys trusted_keys;
  const ProofStore* store = nullptr;
  std::size_t min_transform_challenges = 1;
  std::size_t min_train_challenges = 1;
  std::size_t min_infer_challenges = 1;
};

struct RecordCheck {
  std::uint64_t index = 0;
  std::string stage;
  bool parsed = false;
  bool hash_link = false;
  bool linkage = false;
  bool proof_digest = false;
  bool proof_valid = false;
  // False when the stage proof was not requested.
  bool proof_checked = false;
  std::string detail;

  bool passed() const { return parsed && hash_link && linkage && proof_digest && (proof_valid || !proof_checked); }
};

struct ChainReport {
  std::vector<RecordCheck> records;
  bool passed = false;
  std::optional<std::uint64_t> first_failure;

  Json to_json() const;
  std::string to_text() const;
};

// Verifies every record's hash link and linkage; runs stage proofs for all
// records, or only for `stage` when given. Read-only.
ChainReport chain_verify(const PipelineChain& chain, const VerificationContext& ctx,
                         std::optional<std::uint64_t> stage = std::nullopt);

// Same, over raw log text: a line that does not parse or is not in
// canonical form fails at its index.
ChainReport chain_verify_jsonl(std::string_view text, const VerificationContext& ctx,
                               std::optional<std::uint64_t> stage = std::nullopt);

// `query` is a label (latest emitter wins), "label=<hex>", or a bare hex
// digest. Throws UnknownLabel.
std::string chain_trace(const PipelineChain& chain, std::string_view query);

}  // namespace attest

#endif  // ATTEST_CHAIN_H_
