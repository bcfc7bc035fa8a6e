// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Proof blobs stored alongside stage records, one per stage type.

#ifndef ATTEST_STAGE_PROOFS_H_
#define ATTEST_STAGE_PROOFS_H_

#include <string>
#include <vector>

#include "attest/chain.h"
#include "attest/infer_eval.h"
#include "attest/manifest.h"
#include "attest/model.h"
#include "attest/train.h"
#include "attest/transform.h"

namespace attest {

// Full openings of the admitted assets; verification re-runs admission.
struct CorpusStageProof {
  CorpusPolicy policy;
  std::vector<CorpusEntry> entries;
  std::vector<Manifest> ingredients;

  Digest policy_hash() const { return sha256(canonical_dump(policy.to_json())); }
  Digest root() const;
  // Rebuilds the prover-side commitment (rejections are not kept).
  CorpusCommitment commitment() const;

  Bytes serialize() const;
  static CorpusStageProof deserialize(ByteView bytes);
};

struct TransformStageProof {
  TransformSpec spec;
  TransformProof proof;
  Json statistics;

  Bytes serialize() const;
  static TransformStageProof deserialize(ByteView bytes);
};

// Used by both train and fine_tune records.
struct TrainStageProof {
  ModelSpec spec;
  TrainingProof proof;

  Bytes serialize() const;
  static TrainStageProof deserialize(ByteView bytes);
};

struct EvaluateStageProof {
  ModelSpec spec;
  EvaluationReport report;
  std::string benchmark_jsonl;
  EvaluationAudit audit;

  Bytes serialize() const;
  static EvaluateStageProof deserialize(ByteView bytes);
};

struct InferStageProof {
  ModelSpec spec;
  InferenceProof proof;

  Bytes serialize() const;
  static InferStageProof deserialize(ByteView bytes);
};

struct UnlearnStageProof {
  ModelSpec spec;
  UnlearningProof proof;

  Bytes serialize() const;
  static UnlearnStageProof deserialize(ByteView bytes);
};

// Labelled commitments each stage type emits and consumes.
struct StageCommitments {
  std::vector<LabeledCommitment> inputs;
  std::vector<LabeledCommitment> outputs;
};

StageCommitments corpus_commitments(const CorpusStageProof& p);
StageCommitments transform_commitments(const TransformStageProof& p);
StageCommitments train_commitments(const TrainStageProof& p, bool fine_tune);
StageCommitments evaluate_commitments(const EvaluateStageProof& p);
StageCommitments infer_commitments(const InferStageProof& p);
StageCommitments unlearn_commitments(const UnlearnStageProof& p);

// Empty on success, otherwise a reason. Never throws.
std::string verify_stage_proof(const StageRecord& record, ByteView blob, const VerificationContext& ctx);

}  // namespace attest

#endif  // ATTEST_STAGE_PROOFS_H_
