// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/stage_proofs.h"

#include <algorithm>

#include "attest/error.h"

namespace attest {
namespace {

constexpr std::string_view kBlobMagic = "attest-stage/v1";

ByteWriter blob_writer(StageType t) {
  ByteWriter w;
  w.str(kBlobMagic);
  w.u8(static_cast<std::uint8_t>(t));
  return w;
}

void expect_header(ByteReader& r, std::initializer_list<StageType> allowed) {
  if (r.str() != kBlobMagic) throw Error(ErrorCode::kDecodeError, "not a stage proof blob");
  const std::uint8_t t = r.u8();
  for (StageType a : allowed) {
    if (static_cast<std::uint8_t>(a) == t) return;
  }
  throw Error(ErrorCode::kDecodeError, "proof blob is for another stage type");
}

void write_json(ByteWriter& w, const Json& j) { w.str(canonical_dump(j)); }
Json read_json(ByteReader& r) { return parse_json(r.str()); }

LabeledCommitment lc(std::string_view label, const Digest& d) { return {std::string(label), d}; }

}  // namespace

Digest CorpusStageProof::root() const { return commitment().root(); }

CorpusCommitment CorpusStageProof::commitment() const {
  std::vector<CorpusEntry> accepted = entries;
  std::vector<Digest> leaves;
  for (CorpusEntry& e : accepted) {
    e.leaf = corpus_leaf(e.blinding, e.manifest.asset_hash, e.payload);
    leaves.push_back(e.leaf);
  }
  if (leaves.empty()) throw Error(ErrorCode::kEmptyAcceptedSet, "corpus proof has no entries");
  MerkleTree tree = MerkleTree::build(std::span<const Digest>(leaves));
  return CorpusCommitment{std::move(accepted), {}, std::move(leaves), std::move(tree)};
}

Bytes CorpusStageProof::serialize() const {
  ByteWriter w = blob_writer(StageType::kCorpus);
  write_json(w, policy.to_json());
  w.count(entries.size());
  for (const CorpusEntry& e : entries) {
    w.bytes(e.payload);
    w.str(e.manifest.canonical_json());
    write_blinding(w, e.blinding);
  }
  w.count(ingredients.size());
  for (const Manifest& m : ingredients) w.str(m.canonical_json());
  return std::move(w).take();
}

CorpusStageProof CorpusStageProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  expect_header(r, {StageType::kCorpus});
  CorpusStageProof p;
  p.policy = CorpusPolicy::from_json(read_json(r));
  const std::size_t n = r.count();
  for (std::size_t i = 0; i < n; ++i) {
    CorpusEntry e;
    e.payload = r.bytes();
    e.manifest = Manifest::from_json(read_json(r));
    e.blinding = read_blinding(r);
    e.leaf = corpus_leaf(e.blinding, e.manifest.asset_hash, e.payload);
    p.entries.push_back(std::move(e));
  }
  const std::size_t m = r.count();
  for (std::size_t i = 0; i < m; ++i) p.ingredients.push_back(Manifest::from_json(read_json(r)));
  r.expect_done();
  return p;
}

Bytes TransformStageProof::serialize() const {
  ByteWriter w = blob_writer(StageType::kTransform);
  write_json(w, spec.to_json());
  w.bytes(proof.serialize());
  write_json(w, statistics);
  return std::move(w).take();
}

TransformStageProof TransformStageProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  expect_header(r, {StageType::kTransform});
  TransformStageProof p;
  p.spec = TransformSpec::from_json(read_json(r));
  p.proof = TransformProof::deserialize(r.bytes());
  p.statistics = read_json(r);
  r.expect_done();
  return p;
}

Bytes TrainStageProof::serialize() const {
  ByteWriter w = blob_writer(StageType::kTrain);
  write_json(w, spec.to_json());
  w.bytes(proof.serialize());
  return std::move(w).take();
}

TrainStageProof TrainStageProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  expect_header(r, {StageType::kTrain});
  TrainStageProof p;
  p.spec = ModelSpec::from_json(read_json(r));
  p.proof = TrainingProof::deserialize(r.bytes());
  r.expect_done();
  return p;
}

Bytes EvaluateStageProof::serialize() const {
  ByteWriter w = blob_writer(StageType::kEvaluate);
  write_json(w, spec.to_json());
  write_json(w, report.to_json());
  w.str(benchmark_jsonl);
  w.bytes(audit.serialize());
  return std::move(w).take();
}

EvaluateStageProof EvaluateStageProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  expect_header(r, {StageType::kEvaluate});
  EvaluateStageProof p;
  p.spec = ModelSpec::from_json(read_json(r));
  p.report = EvaluationReport::from_json(read_json(r));
  p.benchmark_jsonl = r.str();
  p.audit = EvaluationAudit::deserialize(r.bytes());
  r.expect_done();
  return p;
}

Bytes InferStageProof::serialize() const {
  ByteWriter w = blob_writer(StageType::kInfer);
  write_json(w, spec.to_json());
  w.bytes(proof.serialize());
  return std::move(w).take();
}

InferStageProof InferStageProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  expect_header(r, {StageType::kInfer});
  InferStageProof p;
  p.spec = ModelSpec::from_json(read_json(r));
  p.proof = InferenceProof::deserialize(r.bytes());
  r.expect_done();
  return p;
}

Bytes UnlearnStageProof::serialize() const {
  ByteWriter w = blob_writer(StageType::kUnlearn);
  write_json(w, spec.to_json());
  w.bytes(proof.serialize());
  return std::move(w).take();
}

UnlearnStageProof UnlearnStageProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  expect_header(r, {StageType::kUnlearn});
  UnlearnStageProof p;
  p.spec = ModelSpec::from_json(read_json(r));
  p.proof = UnlearningProof::deserialize(r.bytes());
  r.expect_done();
  return p;
}

StageCommitments corpus_commitments(const CorpusStageProof& p) {
  return {{}, {lc(labels::kCorpusRoot, p.root())}};
}

StageCommitments transform_commitments(const TransformStageProof& p) {
  return {{lc(labels::kCorpusRoot, p.proof.input_root)},
          {lc(labels::kDatasetRoot, p.proof.output_root),
           lc(labels::kStatisticsDigest, sha256(canonical_dump(p.statistics)))}};
}

StageCommitments train_commitments(const TrainStageProof& p, bool fine_tune) {
  StageCommitments c;
  c.inputs.push_back(lc(labels::kDatasetRoot, p.proof.dataset_root));
  if (fine_tune) c.inputs.push_back(lc(labels::kWeightsRoot, p.proof.init_commitment));
  c.outputs = {lc(labels::kWeightsRoot, p.proof.weights_root), lc(labels::kTraceRoot, p.proof.trace_root),
               lc(labels::kInitCommitment, p.proof.init_commitment)};
  return c;
}

StageCommitments evaluate_commitments(const EvaluateStageProof& p) {
  return {{lc(labels::kWeightsRoot, p.report.weights_root)},
          {lc(labels::kBenchmarkRoot, p.report.benchmark_root),
           lc(labels::kEvaluationReport, p.report.digest())}};
}

StageCommitments infer_commitments(const InferStageProof& p) {
  const InferenceProof& q = p.proof;
  return {{lc(labels::kWeightsRoot, q.weights_root)},
          {lc(labels::kInputCommitment, commit_create(encode_input(q.input), q.input_blinding).digest),
           lc(labels::kOutputCommitment,
              commit_create(encode_output(q.output, q.predicted_class), q.output_blinding).digest)}};
}

StageCommitments unlearn_commitments(const UnlearnStageProof& p) {
  const UnlearningProof& q = p.proof;
  return {{lc(labels::kDatasetRoot, q.old_root), lc(labels::kInitCommitment, q.retraining.init_commitment)},
          {lc(labels::kDatasetRoot, q.new_root), lc(labels::kWeightsRoot, q.retraining.weights_root),
           lc(labels::kTraceRoot, q.retraining.trace_root), lc(labels::kRemovedLeaf, q.deleted_leaf)}};
}

namespace {

std::string check_commitments(const StageRecord& record, const StageCommitments& expected) {
  if (record.inputs != expected.inputs) return "input commitments do not match the proof";
  if (record.outputs != expected.outputs) return "output commitments do not match the proof";
  return {};
}

std::string verify_corpus(const StageRecord& record, ByteView blob, const VerificationContext& ctx) {
  const CorpusStageProof p = CorpusStageProof::deserialize(blob);
  if (p.policy_hash() != record.spec_hash) return "policy hash does not match spec_hash";
  if (p.entries.empty()) return "corpus proof has no entries";
  ManifestStore store;
  for (const Manifest& m : p.ingredients) store.add(m);
  const CorpusPolicy effective{p.policy.required, ctx.trusted_keys};
  for (std::size_t i = 0; i < p.entries.size(); ++i) {
    const std::string reason = admission_failure(p.entries[i].payload, p.entries[i].manifest, effective, &store);
    if (!reason.empty()) return "asset " + std::to_string(i) + " (" + p.entries[i].manifest.asset_id + "): " + reason;
  }
  return check_commitments(record, corpus_commitments(p));
}

std::string verify_transform(const StageRecord& record, ByteView blob, const VerificationContext& ctx) {
  const TransformStageProof p = TransformStageProof::deserialize(blob);
  if (p.spec.hash() != record.spec_hash) return "transform spec hash does not match spec_hash";
  if (std::string e = check_commitments(record, transform_commitments(p)); !e.empty()) return e;
  if (p.proof.items.size() < std::min<std::uint64_t>(ctx.min_transform_challenges, p.proof.input_count)) {
    return "too few transform challenges";
  }
  if (!transform_verify(p.proof.input_root, p.proof.output_root, p.spec, p.proof)) return "transform proof rejected";
  return {};
}

std::string verify_train(const StageRecord& record, ByteView blob, const VerificationContext& ctx) {
  const TrainStageProof p = TrainStageProof::deserialize(blob);
  const bool fine_tune = record.type == StageType::kFineTune;
  if (p.spec.hash() != record.spec_hash) return "model spec hash does not match spec_hash";
  if (std::string e = check_commitments(record, train_commitments(p, fine_tune)); !e.empty()) return e;
  TrainingPublicInputs in{p.proof.dataset_root, p.proof.weights_root, std::nullopt, ctx.min_train_challenges};
  if (fine_tune) in.init_commitment = *record.input(labels::kWeightsRoot);
  if (!verify_training(p.proof, p.spec, in)) return "training proof rejected";
  return {};
}

std::string verify_evaluate(const StageRecord& record, ByteView blob, const VerificationContext&) {
  const EvaluateStageProof p = EvaluateStageProof::deserialize(blob);
  if (p.spec.hash() != record.spec_hash) return "model spec hash does not match spec_hash";
  if (p.spec.kind != p.report.kind) return "report model kind differs from spec";
  if (std::string e = check_commitments(record, evaluate_commitments(p)); !e.empty()) return e;
  const PublicDataset benchmark = PublicDataset::load(p.benchmark_jsonl);
  if (!verify_evaluation(p.report, benchmark, p.audit)) return "evaluation recount failed";
  return {};
}

std::string verify_infer(const StageRecord& record, ByteView blob, const VerificationContext& ctx) {
  const InferStageProof p = InferStageProof::deserialize(blob);
  if (p.spec.hash() != record.spec_hash) return "model spec hash does not match spec_hash";
  const StageCommitments c = infer_commitments(p);
  if (std::string e = check_commitments(record, c); !e.empty()) return e;
  const InferencePublicInputs in{p.proof.weights_root, c.outputs[0].digest, c.outputs[1].digest, p.spec.kind,
                                 ctx.min_infer_challenges};
  const InferenceVerdict v = verify_inference(p.proof, in);
  if (!v.accepted) return "inference proof rejected (" + v.describe() + ")";
  return {};
}

std::string verify_unlearn(const StageRecord& record, ByteView blob, const VerificationContext& ctx) {
  const UnlearnStageProof p = UnlearnStageProof::deserialize(blob);
  if (p.spec.hash() != record.spec_hash) return "model spec hash does not match spec_hash";
  if (std::string e = check_commitments(record, unlearn_commitments(p)); !e.empty()) return e;
  if (!verify_unlearning(p.proof, p.proof.old_root, p.proof.new_root, p.spec, ctx.min_train_challenges,
                         p.proof.retraining.init_commitment)) {
    return "unlearning proof rejected";
  }
  return {};
}

}  // namespace

std::string verify_stage_proof(const StageRecord& record, ByteView blob, const VerificationContext& ctx) {
  try {
    switch (record.type) {
      case StageType::kCorpus:
        return verify_corpus(record, blob, ctx);
      case StageType::kTransform:
        return verify_transform(record, blob, ctx);
      case StageType::kTrain:
      case StageType::kFineTune:
        return verify_train(record, blob, ctx);
      case StageType::kEvaluate:
        return verify_evaluate(record, blob, ctx);
      case StageType::kInfer:
        return verify_infer(record, blob, ctx);
      case StageType::kUnlearn:
        return verify_unlearn(record, blob, ctx);
    }
    return "unknown stage type";
  } catch (const Error& e) {
    return std::string("malformed proof blob: ") + e.what();
  } catch (const Json::exception& e) {
    return std::string("malformed proof blob: ") + e.what();
  }
}

}  // namespace attest
