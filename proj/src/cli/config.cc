// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/cli/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "attest/error.h"

namespace attest {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); }

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

std::string get_string(const Json& j, std::string_view key, std::string_view fallback = {}) {
  auto it = j.find(std::string(key));
  if (it == j.end()) {
    if (fallback.empty()) invalid("missing required key '" + std::string(key) + "'");
    return std::string(fallback);
  }
  if (!it->is_string()) invalid("'" + std::string(key) + "' must be a string");
  return it->get<std::string>();
}

std::size_t get_count(const Json& j, std::string_view key, std::size_t fallback) {
  auto it = j.find(std::string(key));
  if (it == j.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
    invalid("challenge count '" + std::string(key) + "' must be an integer >= 1");
  }
  return it->get<std::size_t>();
}

void require_exists(const fs::path& p, std::string_view what) {
  if (!fs::exists(p)) invalid(std::string(what) + " not found: " + p.string());
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) invalid("config must be a JSON object");
  PipelineConfig c;
  c.corpus_dir = resolve(base_dir, get_string(j, "corpus_dir"));
  c.trusted_keys = resolve(base_dir, get_string(j, "trusted_keys"));
  c.transform_spec = resolve(base_dir, get_string(j, "transform_spec"));
  c.model_spec = resolve(base_dir, get_string(j, "model_spec"));
  if (j.contains("benchmark")) c.benchmark = resolve(base_dir, get_string(j, "benchmark"));

  if (const char* home = std::getenv(std::string(kHomeEnv).c_str()); home != nullptr && *home != '\0') {
    c.work_dir = home;
  } else {
    c.work_dir = resolve(base_dir, get_string(j, "work_dir", "work"));
  }
  c.chain_log = resolve(c.work_dir, get_string(j, "chain_log", "chain.jsonl"));
  c.proof_store = resolve(c.work_dir, get_string(j, "proof_store", "proofs"));
  c.secrets_dir = resolve(c.work_dir, get_string(j, "secrets_dir", "secrets"));

  if (j.contains("policy")) {
    const Json& policy = j["policy"];
    if (!policy.is_object()) invalid("'policy' must be an object");
    if (policy.contains("required")) {
      if (!policy["required"].is_object()) invalid("'policy.required' must be an object");
      for (const auto& [name, value] : policy["required"].items()) {
        if (!value.is_string()) invalid("assertion '" + name + "' must be \"allow\" or \"deny\"");
        try {
          c.required[name] = parse_assertion_value(value.get<std::string>());
        } catch (const Error& e) {
          invalid(e.what());
        }
      }
    }
  }
  if (j.contains("challenges")) {
    const Json& ch = j["challenges"];
    if (!ch.is_object()) invalid("'challenges' must be an object");
    c.c_transform = get_count(ch, "transform", c.c_transform);
    c.c_train = get_count(ch, "train", c.c_train);
    c.c_infer = get_count(ch, "infer", c.c_infer);
  }
  if (j.contains("mode")) {
    const Json& mode = j["mode"];
    if (!mode.is_object()) invalid("'mode' must be an object");
    const std::string inference = get_string(mode, "inference", "audit");
    if (inference != "audit" && inference != "spotcheck") invalid("mode.inference must be audit or spotcheck");
    c.inference_mode = parse_inference_mode(inference);
    const std::string training = get_string(mode, "training", "public");
    if (training != "public" && training != "audit") invalid("mode.training must be public or audit");
    c.training_mode = training == "audit" ? ProofMode::kAudit : ProofMode::kPublic;
  }
  if (j.contains("blinding_seed")) {
    if (!j["blinding_seed"].is_number_unsigned()) invalid("blinding_seed must be a non-negative integer");
    c.blinding_seed = j["blinding_seed"].get<std::uint64_t>();
  }
  if (j.contains("group_column")) {
    if (!j["group_column"].is_number_unsigned()) invalid("group_column must be a non-negative integer");
    c.group_column = j["group_column"].get<std::uint32_t>();
  }

  require_exists(c.corpus_dir, "corpus_dir");
  require_exists(c.trusted_keys, "trusted_keys");
  require_exists(c.transform_spec, "transform_spec");
  require_exists(c.model_spec, "model_spec");
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j, fs::absolute(path).parent_path());
}

}  // namespace attest
