// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Synthetic, manifest-signed corpora and a ready-to-run workspace.

#ifndef ATTEST_CLI_DEMO_H_
#define ATTEST_CLI_DEMO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "attest/manifest.h"
#include "attest/model.h"
#include "attest/record.h"
#include "attest/transform.h"

namespace attest {

struct SyntheticOptions {
  std::size_t rows = 256;
  std::size_t dimension = 8;
  std::size_t benchmark_rows = 64;
  std::uint64_t seed = 1;
  // Every k-th asset carries ai_training=deny; 0 disables.
  std::size_t deny_every = 0;
};

struct SyntheticCorpus {
  SigningKey key;
  std::vector<RawAsset> assets;
  std::vector<double> true_weights;
  double true_bias = 0.0;
  std::vector<Record> benchmark;
};

// Labels follow a noisy linear separator. Deterministic in `seed`.
SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options);

// Logistic, learning rate 1/2, B = 32, T = 50.
ModelSpec demo_model_spec(std::size_t dimension, std::uint64_t seed);
TransformSpec demo_transform_spec();
CorpusPolicy demo_policy(const SyntheticCorpus& corpus);

// Writes corpus/, keys/, config.json, transform.json, model.json,
// benchmark.jsonl and input.json under `dir`.
void write_demo_workspace(const std::filesystem::path& dir, const SyntheticOptions& options);

}  // namespace attest

#endif  // ATTEST_CLI_DEMO_H_
