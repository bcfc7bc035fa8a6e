// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include <gtest/gtest.h>

#include <sstream>

#include "attest/error.h"
#include "test_support.h"

namespace attest {
namespace {

using testing::PipelineOptions;
using testing::PipelineRun;

PipelineOptions small_options() {
  PipelineOptions o;
  o.synth.rows = 64;
  o.synth.dimension = 4;
  o.synth.benchmark_rows = 16;
  o.c_train = 4;
  return o;
}

const PipelineRun& shared_run() {
  static const PipelineRun* run = [] {
    auto* r = new PipelineRun;
    testing::run_pipeline(*r, small_options());
    return r;
  }();
  return *run;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

TEST(Chain, HonestPipelinePasses) {
  const PipelineRun& run = shared_run();
  ASSERT_EQ(run.chain.size(), 6u);
  const ChainReport report = chain_verify(run.chain, run.context());
  EXPECT_TRUE(report.passed) << report.to_text();
  for (const RecordCheck& c : report.records) EXPECT_TRUE(c.proof_checked);
  EXPECT_FALSE(report.first_failure);
  EXPECT_TRUE(chain_verify_jsonl(run.chain.to_jsonl(), run.context()).passed);
  EXPECT_EQ(report.to_json()["passed"], true);
}

TEST(Chain, FirstRecordShape) {
  const StageRecord& r = shared_run().chain.records()[0];
  EXPECT_EQ(r.index, 0u);
  EXPECT_TRUE(r.prev_record_hash.is_zero());
  EXPECT_TRUE(r.inputs.empty());
  EXPECT_EQ(r.record_hash, r.compute_hash());
  EXPECT_EQ(StageRecord::from_json(r.to_json()), r);
}

TEST(Chain, TransformLinksToCorpus) {
  const PipelineChain& chain = shared_run().chain;
  const StageRecord& t = chain.records()[1];
  ASSERT_NE(t.input(labels::kCorpusRoot), nullptr);
  EXPECT_EQ(*t.input(labels::kCorpusRoot), *chain.records()[0].output(labels::kCorpusRoot));
  EXPECT_EQ(chain.producer_of({std::string(labels::kCorpusRoot), *t.input(labels::kCorpusRoot)}, 1), 0u);
}

TEST(Chain, UnlinkedInputRejected) {
  PipelineRun run = shared_run();
  try {
    chain_append(run.chain, StageType::kTrain, {{std::string(labels::kDatasetRoot), sha256("nowhere")}},
                 {{std::string(labels::kWeightsRoot), sha256("w")}}, sha256("spec"), as_bytes("blob"), run.store);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnlinkedInput);
  }
  EXPECT_EQ(run.chain.size(), 6u);
}

TEST(Chain, NonContiguousIndexRejected) {
  PipelineRun run = shared_run();
  StageRecord r = run.chain.records()[0];
  r.index = 9;
  r.prev_record_hash = run.chain.head();
  r.record_hash = r.compute_hash();
  EXPECT_THROW(run.chain.append(r), Error);
}

TEST(Chain, DeletedMiddleRecordFailsAtSuccessor) {
  const PipelineRun& run = shared_run();
  std::vector<std::string> lines = lines_of(run.chain.to_jsonl());
  lines.erase(lines.begin() + 2);
  const ChainReport report = chain_verify_jsonl(join(lines), run.context());
  EXPECT_FALSE(report.passed);
  ASSERT_TRUE(report.first_failure);
  EXPECT_EQ(*report.first_failure, 2u);
}

TEST(Chain, ReorderedRecordsFail) {
  const PipelineRun& run = shared_run();
  std::vector<std::string> lines = lines_of(run.chain.to_jsonl());
  std::swap(lines[3], lines[4]);
  EXPECT_FALSE(chain_verify_jsonl(join(lines), run.context()).passed);
}

TEST(Chain, ByteFlipInLogFails) {
  const PipelineRun& run = shared_run();
  std::string text = run.chain.to_jsonl();
  const std::size_t pos = text.find("\"spec_hash\":\"", text.find('\n') + 1) + 14;
  text[pos] = text[pos] == '0' ? '1' : '0';
  const ChainReport report = chain_verify_jsonl(text, run.context());
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.first_failure, 1u);
}

TEST(Chain, SubstitutedTrainingBlobFailsDigest) {
  PipelineRun run = shared_run();
  PipelineOptions o = small_options();
  o.blinding_seed = 7;
  PipelineRun other;
  testing::run_pipeline(other, o);
  run.store.overwrite(run.chain.records()[2].proof_digest, other.blobs[2]);
  const ChainReport report = chain_verify(run.chain, run.context());
  EXPECT_FALSE(report.passed);
  EXPECT_FALSE(report.records[2].proof_digest);
  EXPECT_EQ(report.first_failure, 2u);
}

TEST(Chain, MissingBlobFails) {
  PipelineRun run = shared_run();
  MemoryProofStore empty;
  VerificationContext ctx = run.context();
  ctx.store = &empty;
  EXPECT_FALSE(chain_verify(run.chain, ctx).passed);
}

TEST(Chain, UntrustedKeyFailsCorpusStage) {
  const PipelineRun& run = shared_run();
  VerificationContext ctx = run.context();
  ctx.trusted_keys = {testing::test_key(42).public_key()};
  const ChainReport report = chain_verify(run.chain, ctx);
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.first_failure, 0u);
}

TEST(Chain, SingleStageVerification) {
  const PipelineRun& run = shared_run();
  const ChainReport report = chain_verify(run.chain, run.context(), 4);
  EXPECT_TRUE(report.passed);
  std::size_t checked = 0;
  for (const RecordCheck& c : report.records) checked += c.proof_checked;
  EXPECT_EQ(checked, 1u);
}

TEST(Chain, JsonlRoundTripIsCanonical) {
  const PipelineRun& run = shared_run();
  const std::string text = run.chain.to_jsonl();
  EXPECT_EQ(PipelineChain::from_jsonl(text).to_jsonl(), text);
  EXPECT_THROW(PipelineChain::from_jsonl("{not json}\n"), Error);
}

TEST(Chain, DirectoryStoreRoundTrip) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "attest-store-test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  DirectoryProofStore store(dir);
  const Digest d = store.put(as_bytes("blob"));
  EXPECT_EQ(d, sha256("blob"));
  EXPECT_TRUE(std::filesystem::exists(store.path_for(d)));
  EXPECT_EQ(store.get(d), to_bytes("blob"));
  EXPECT_FALSE(store.get(sha256("absent")));
  std::filesystem::remove_all(dir);
}

TEST(Trace, InferenceReachesTrainTransformCorpus) {
  const std::string t = chain_trace(shared_run().chain, labels::kOutputCommitment);
  EXPECT_NE(t.find("#4 infer"), std::string::npos);
  EXPECT_NE(t.find("#2 train"), std::string::npos);
  EXPECT_NE(t.find("#1 transform"), std::string::npos);
  EXPECT_NE(t.find("#0 corpus"), std::string::npos);
}

TEST(Trace, CorpusRootIsSingleNode) {
  const std::string t = chain_trace(shared_run().chain, labels::kCorpusRoot);
  EXPECT_NE(t.find("#0 corpus"), std::string::npos);
  EXPECT_EQ(t.find("<-"), std::string::npos);
}

TEST(Trace, UnlearnShowsOldAndNewDatasetRoots) {
  const PipelineRun& run = shared_run();
  const StageRecord& u = run.chain.records()[5];
  const std::string t = chain_trace(run.chain, std::string(labels::kWeightsRoot) + "=" + u.output(labels::kWeightsRoot)->hex());
  EXPECT_NE(t.find("#5 unlearn"), std::string::npos);
  EXPECT_NE(t.find("#1 transform"), std::string::npos);
  const std::string old_root = run.transformed->dataset.root().hex().substr(0, 12);
  const std::string new_root = run.unlearned->dataset.root().hex().substr(0, 12);
  EXPECT_NE(t.find(old_root), std::string::npos);
  EXPECT_NE(t.find(new_root), std::string::npos);
  EXPECT_THROW(chain_trace(run.chain, "no_such_label"), Error);
}

}  // namespace
}  // namespace attest
