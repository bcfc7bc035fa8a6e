// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/cli/demo.h"

#include <cstdio>
#include <fstream>
#include <random>

#include "attest/error.h"

namespace attest {
namespace {

// Exactly specified by the standard, so corpora match across toolchains.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Bytes row_payload(const std::vector<FixedPoint>& features, FixedPoint label) {
  Json f = Json::array();
  for (FixedPoint v : features) f.push_back(v.scaled());
  return canonical_bytes(Json{{"features", f}, {"label", label.scaled()}});
}

struct Row {
  std::vector<FixedPoint> features;
  FixedPoint label;
};

Row draw_row(std::mt19937_64& rng, const std::vector<double>& w, double b) {
  const std::size_t d = w.size();
  Row r;
  double z = b;
  for (std::size_t j = 0; j < d; ++j) {
    // The last column is a binary group attribute.
    const double x = j + 1 == d ? (uniform01(rng) < 0.5 ? 0.0 : 1.0) : 2.0 * uniform01(rng) - 1.0;
    r.features.push_back(fp_encode(x));
    z += w[j] * r.features.back().to_double();
  }
  const double noise = 0.25 * (uniform01(rng) + uniform01(rng) - 1.0);
  r.label = fp_encode(z + noise > 0.0 ? 1.0 : 0.0);
  return r;
}

void write_file(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options) {
  if (options.dimension < 2 || options.rows == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "synthetic corpus needs at least two columns and one row");
  }
  std::mt19937_64 rng(options.seed);
  SyntheticCorpus c;
  const Digest key_seed = Sha256().update("attest/demo-key").update_u64(options.seed).finish();
  c.key = SigningKey::from_seed(key_seed.bytes);
  for (std::size_t j = 0; j < options.dimension; ++j) c.true_weights.push_back(4.0 * uniform01(rng) - 2.0);
  c.true_bias = uniform01(rng) - 0.5;

  for (std::size_t i = 0; i < options.rows; ++i) {
    const Row r = draw_row(rng, c.true_weights, c.true_bias);
    const bool deny = options.deny_every != 0 && (i + 1) % options.deny_every == 0;
    std::map<std::string, AssertionValue> assertions{
        {"ai_training", deny ? AssertionValue::kDeny : AssertionValue::kAllow},
        {"ai_inference", AssertionValue::kAllow},
        {"data_mining", AssertionValue::kAllow}};
    char id[32];
    std::snprintf(id, sizeof id, "row-%04zu", i);
    Bytes payload = row_payload(r.features, r.label);
    Manifest m = manifest_sign(id, payload, std::move(assertions), {}, c.key);
    c.assets.push_back(RawAsset{std::move(payload), std::move(m)});
  }
  for (std::size_t i = 0; i < options.benchmark_rows; ++i) {
    const Row r = draw_row(rng, c.true_weights, c.true_bias);
    c.benchmark.push_back(Record{r.features, r.label, sha256(row_payload(r.features, r.label))});
  }
  return c;
}

ModelSpec demo_model_spec(std::size_t dimension, std::uint64_t seed) {
  ModelSpec s;
  s.kind = ModelKind::kLogisticRegression;
  s.dimension = dimension;
  s.learning_rate = fp_encode(0.5);
  s.batch_size = 32;
  s.iterations = 50;
  s.seed = seed;
  return s;
}

TransformSpec demo_transform_spec() { return TransformSpec{{QuantizeOp{12}}}; }

CorpusPolicy demo_policy(const SyntheticCorpus& corpus) {
  return CorpusPolicy{{{"ai_training", AssertionValue::kAllow}}, {corpus.key.public_key()}};
}

void write_demo_workspace(const std::filesystem::path& dir, const SyntheticOptions& options) {
  namespace fs = std::filesystem;
  const SyntheticCorpus c = make_synthetic_corpus(options);
  fs::create_directories(dir / "corpus");
  fs::create_directories(dir / "keys");
  for (const RawAsset& a : c.assets) {
    write_file(dir / "corpus" / (a.manifest.asset_id + ".payload"), to_string(a.payload));
    write_file(dir / "corpus" / (a.manifest.asset_id + ".manifest.json"), a.manifest.canonical_json() + "\n");
  }
  write_file(dir / "keys" / "signer.seed", hex_encode(c.key.seed()) + "\n");
  fs::permissions(dir / "keys" / "signer.seed", fs::perms::owner_read | fs::perms::owner_write,
                  fs::perm_options::replace);
  write_file(dir / "keys" / "trusted.txt", hex_encode(c.key.public_key()) + "\n");
  write_file(dir / "transform.json", demo_transform_spec().to_json().dump(2) + "\n");
  write_file(dir / "model.json", demo_model_spec(options.dimension, options.seed).to_json().dump(2) + "\n");
  write_file(dir / "benchmark.jsonl", PublicDataset::from_records(c.benchmark).records_jsonl());

  Json input = Json::array();
  for (FixedPoint v : c.benchmark.front().features) input.push_back(v.to_double());
  write_file(dir / "input.json", Json{{"features", input}}.dump() + "\n");

  const Json config{{"corpus_dir", "corpus"},
                    {"work_dir", "work"},
                    {"trusted_keys", "keys/trusted.txt"},
                    {"transform_spec", "transform.json"},
                    {"model_spec", "model.json"},
                    {"benchmark", "benchmark.jsonl"},
                    {"policy", {{"required", {{"ai_training", "allow"}}}}},
                    {"challenges", {{"transform", 8}, {"train", 10}, {"infer", 4}}},
                    {"mode", {{"inference", "audit"}, {"training", "public"}}},
                    {"blinding_seed", options.seed},
                    {"group_column", options.dimension - 1}};
  write_file(dir / "config.json", config.dump(2) + "\n");
}

}  // namespace attest
