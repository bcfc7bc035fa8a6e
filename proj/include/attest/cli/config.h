// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#ifndef ATTEST_CLI_CONFIG_H_
#define ATTEST_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "attest/canonical_json.h"
#include "attest/infer_eval.h"
#include "attest/manifest.h"
#include "attest/train.h"

namespace attest {

inline constexpr std::string_view kHomeEnv = "PIPELINE_ATTEST_HOME";

struct PipelineConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path work_dir;
  std::filesystem::path chain_log;
  std::filesystem::path proof_store;
  std::filesystem::path secrets_dir;
  std::filesystem::path trusted_keys;
  std::filesystem::path transform_spec;
  std::filesystem::path model_spec;
  std::optional<std::filesystem::path> benchmark;
  std::map<std::string, AssertionValue> required;
  std::size_t c_transform = 8;
  std::size_t c_train = 10;
  std::size_t c_infer = 4;
  InferenceMode inference_mode = InferenceMode::kAudit;
  ProofMode training_mode = ProofMode::kPublic;
  // Seeds every blinding source; absent means fresh randomness.
  std::optional<std::uint64_t> blinding_seed;
  std::optional<std::uint32_t> group_column;

  // Relative input paths resolve against the config file's directory;
  // chain_log, proof_store and secrets_dir against work_dir. The home
  // environment variable, when set, replaces work_dir. Throws ConfigInvalid.
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig from_json(const Json& j, const std::filesystem::path& base_dir);
};

}  // namespace attest

#endif  // ATTEST_CLI_CONFIG_H_
