// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#ifndef ATTEST_CLI_COMMANDS_H_
#define ATTEST_CLI_COMMANDS_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "attest/canonical_json.h"
#include "attest/cli/config.h"

namespace attest {

struct CommandOptions {
  bool force_new = false;
  bool fine_tune = false;
  std::optional<std::uint64_t> stage;
  std::optional<InferenceMode> mode;
  std::optional<std::size_t> challenges;
  std::optional<std::filesystem::path> benchmark;
  std::filesystem::path input;
  // Leaf hex or sorted row index.
  std::string record;
  std::string label;
};

struct CommandResult {
  bool ok = true;
  Json report = Json::object();
  std::string text;
};

CommandResult cmd_ingest(const PipelineConfig& config, const CommandOptions& options);
CommandResult cmd_transform(const PipelineConfig& config, const CommandOptions& options);
CommandResult cmd_train(const PipelineConfig& config, const CommandOptions& options);
CommandResult cmd_evaluate(const PipelineConfig& config, const CommandOptions& options);
CommandResult cmd_infer(const PipelineConfig& config, const CommandOptions& options);
CommandResult cmd_unlearn(const PipelineConfig& config, const CommandOptions& options);
CommandResult cmd_verify(const PipelineConfig& config, const CommandOptions& options);
CommandResult cmd_trace(const PipelineConfig& config, const CommandOptions& options);

// Exit status: 0 success, 1 failed verification, 2 usage or runtime error.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace attest

#endif  // ATTEST_CLI_COMMANDS_H_
