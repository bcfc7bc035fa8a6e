// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Fixtures shared by the unit tests and the acceptance binary.

#ifndef ATTEST_TESTS_TEST_SUPPORT_H_
#define ATTEST_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "attest/chain.h"
#include "attest/cli/demo.h"
#include "attest/infer_eval.h"
#include "attest/manifest.h"
#include "attest/record.h"
#include "attest/stage_proofs.h"
#include "attest/train.h"
#include "attest/transform.h"

namespace attest::testing {

// Records with features uniform in [-scale, scale] on the fixed-point grid
// and 0/1 labels.
std::vector<Record> random_records(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0);

CommittedDataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed);

ModelSpec make_spec(ModelKind kind, std::size_t d, std::size_t batch, std::uint64_t iterations,
                    double learning_rate = 0.5, std::uint64_t seed = 7);

// Signed raw assets over `records`.
std::vector<RawAsset> sign_rows(const std::vector<Record>& records, const SigningKey& key);

SigningKey test_key(std::uint8_t fill);

struct PipelineOptions {
  SyntheticOptions synth;
  std::size_t c_transform = 8;
  std::size_t c_train = 10;
  std::size_t c_infer = 4;
  InferenceMode inference_mode = InferenceMode::kAudit;
  std::uint64_t blinding_seed = 99;
  // Sorted dataset row removed by the unlearn stage.
  std::size_t unlearn_row = 3;
};

// corpus -> transform -> train -> evaluate -> infer -> unlearn, in memory.
struct PipelineRun {
  SyntheticCorpus corpus;
  CorpusPolicy policy;
  std::optional<CorpusCommitment> committed;
  TransformSpec transform_spec;
  std::optional<TransformOutput> transformed;
  ModelSpec model_spec;
  std::optional<TrainResult> trained;
  std::optional<EvaluationResult> evaluation;
  std::optional<InferenceRecord> inference;
  std::optional<UnlearnResult> unlearned;

  PipelineChain chain;
  MemoryProofStore store;
  std::vector<Bytes> blobs;

  VerificationContext context() const;
};

void run_pipeline(PipelineRun& run, const PipelineOptions& options);

}  // namespace attest::testing

#endif  // ATTEST_TESTS_TEST_SUPPORT_H_
