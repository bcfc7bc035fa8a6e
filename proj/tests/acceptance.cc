// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "attest/cli/commands.h"
#include "attest/cli/config.h"
#include "attest/error.h"
#include "attest/sumcheck.h"
#include "oracles.h"
#include "test_support.h"

namespace attest {
namespace {

namespace fs = std::filesystem;
using testing::PipelineOptions;
using testing::PipelineRun;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

// ---------------------------------------------------------------------------
// Helpers

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "pipeline_attest");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Runs the scripted CLI pipeline in `dir`; returns the first failing step or "".
std::string cli_pipeline(const fs::path& dir) {
  fs::remove_all(dir);
  if (cli({"demo", "--out", dir.string()}) != 0) return "demo";
  const std::string config = (dir / "config.json").string();
  const std::vector<std::vector<std::string>> steps = {
      {"ingest"}, {"transform"}, {"train"}, {"evaluate"},
      {"infer", "--input", (dir / "input.json").string()}, {"unlearn", "--record", "3"}, {"verify", "--all"}};
  for (std::vector<std::string> s : steps) {
    const std::string name = s.front();
    s.insert(s.begin(), {"--config", config});
    std::string text;
    if (cli(s, &text) != 0) return name + ": " + text;
  }
  return {};
}

PipelineOptions full_options(std::uint64_t seed) {
  PipelineOptions o;
  o.blinding_seed = seed;
  return o;
}

// Rewrites record `index` (edit, optional replacement blob), re-links and
// re-hashes every record, and verifies the result with a store that holds
// the replacement blob. Returns the index of the first failing record.
std::optional<std::uint64_t> verify_rewritten(const PipelineRun& run, std::size_t index, const Bytes* blob,
                                              const std::function<void(StageRecord&)>& edit) {
  MemoryProofStore store = run.store;
  std::string text;
  Digest prev;
  for (std::size_t i = 0; i < run.chain.size(); ++i) {
    StageRecord r = run.chain.records()[i];
    if (i == index) {
      if (blob) r.proof_digest = store.put(*blob);
      if (edit) edit(r);
    }
    r.prev_record_hash = prev;
    r.record_hash = r.compute_hash();
    prev = r.record_hash;
    text += r.canonical_line() + "\n";
  }
  VerificationContext ctx = run.context();
  ctx.store = &store;
  return chain_verify_jsonl(text, ctx).first_failure;
}

TransformOutput tamper_row(const TransformOutput& out, std::size_t corpus_row) {
  std::vector<DatasetEntry> entries = out.dataset.entries();
  std::vector<Digest> old_leaves;
  for (const DatasetEntry& e : entries) old_leaves.push_back(e.leaf);
  DatasetEntry& e = entries[*out.output_index[corpus_row]];
  e.record.label = fp_add(e.record.label, FixedPoint::from_scaled(1));
  e.record_bytes = e.record.canonical_bytes();
  e.leaf = record_leaf(e.blinding, e.record_bytes);
  const Digest changed = e.leaf;
  const std::size_t changed_at = *out.output_index[corpus_row];
  CommittedDataset ds = CommittedDataset::from_entries(std::move(entries));
  std::vector<std::optional<std::size_t>> index(out.output_index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (!out.output_index[i]) continue;
    const std::size_t k = *out.output_index[i];
    index[i] = ds.index_of(k == changed_at ? changed : old_leaves[k]);
  }
  return TransformOutput{std::move(ds), std::move(index)};
}

// A training run whose iteration `forged` adds one unit to the bias.
TrainResult forged_training(const CommittedDataset& ds, const ModelSpec& spec, std::uint64_t forged,
                            BlindingSource& bs) {
  const Trainer trainer(ds, spec);
  const WeightsOpening init = WeightsOpening::fresh(ModelWeights::zeros(spec.dimension), bs);
  TrainingTrace trace(spec.hash(), TrainingState{0, init.weights, {}}, bs.next());
  ModelWeights w = init.weights;
  for (std::uint64_t t = 1; t <= spec.iterations; ++t) {
    w = trainer.step(w, t).weights;
    if (t == forged) w.bias = fp_add(w.bias, FixedPoint::from_scaled(1));
    trace.append(TrainingState{t, w, trainer.schedule().batch(t)}, bs.next());
  }
  WeightsOpening final = WeightsOpening::fresh(w, bs);
  return TrainResult{init, std::move(final), std::move(trace)};
}

std::vector<oracle::Row> oracle_rows(const CommittedDataset& ds) {
  std::vector<oracle::Row> rows;
  for (const DatasetEntry& e : ds.entries()) {
    oracle::Row r;
    for (FixedPoint v : e.record.features) r.x.push_back(v.scaled());
    r.y = e.record.label.scaled();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. End-to-end honest pipeline through the CLI.

Outcome criterion_end_to_end() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "attest-acceptance-e2e";
  const auto start = std::chrono::steady_clock::now();
  const std::string failed = cli_pipeline(dir);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(failed.empty(), "step failed: " + failed);
  if (o.pass) {
    const PipelineConfig config = PipelineConfig::load(dir / "config.json");
    const ModelSpec spec = ModelSpec::from_json(parse_json(read_file(config.model_spec)));
    o.require(spec.kind == ModelKind::kLogisticRegression && spec.dimension == 8 && spec.iterations == 50 &&
                  spec.batch_size == 32 && config.c_train == 10,
              "workspace parameters differ from 256 rows, d=8, T=50, B=32, c=10");
    const PipelineChain chain = PipelineChain::from_jsonl(read_file(config.chain_log));
    o.require(chain.size() == 6, "expected 6 records");
  }
  o.require(secs < 60.0, "took " + fmt(secs) + " s");
  if (o.pass) o.detail = "6 stages + verify --all in " + fmt(secs) + " s";
  fs::remove_all(dir);
  return o;
}

// ---------------------------------------------------------------------------
// 2. Tamper matrix.

Outcome criterion_tamper_matrix() {
  Outcome o;
  std::size_t cases = 0;
  for (std::uint64_t seed : {11, 12, 13}) {
    PipelineRun run;
    testing::run_pipeline(run, full_options(seed));
    const VerificationContext ctx = run.context();
    if (!chain_verify(run.chain, ctx).passed) {
      o.require(false, "honest chain rejected");
      return o;
    }
    auto expect_fail_at = [&](std::optional<std::uint64_t> failure, std::uint64_t at, const std::string& name) {
      ++cases;
      o.require(failure.has_value() && *failure == at, name + " not caught at record " + std::to_string(at));
    };

    // Flip one asset byte inside the corpus stage.
    {
      CorpusStageProof p = CorpusStageProof::deserialize(run.blobs[0]);
      p.entries[seed % p.entries.size()].payload[5] ^= 0x01;
      const Bytes blob = p.serialize();
      expect_fail_at(verify_rewritten(run, 0, &blob, nullptr), 0, "asset byte flip");
      std::vector<RawAsset> assets = run.corpus.assets;
      assets[0].payload[5] ^= 0x01;
      BlindingSource bs = BlindingSource::seeded(seed);
      o.require(corpus_verify(assets, run.policy, bs).rejected.size() == 1, "flipped asset admitted");
    }
    // Forge a manifest signature.
    {
      CorpusStageProof p = CorpusStageProof::deserialize(run.blobs[0]);
      p.entries[1].manifest.signature[7] ^= 0x20;
      const Bytes blob = p.serialize();
      expect_fail_at(verify_rewritten(run, 0, &blob, nullptr), 0, "forged signature");
    }
    // Alter one transform output row that is challenged (full reveal).
    {
      BlindingSource bs = BlindingSource::seeded(seed + 100);
      const CorpusCommitment corpus = CorpusStageProof::deserialize(run.blobs[0]).commitment();
      const TransformOutput bad = tamper_row(*run.transformed, seed % corpus.accepted.size());
      TransformStageProof p{run.transform_spec,
                            transform_prove(corpus, bad, run.transform_spec, corpus.accepted.size()),
                            dataset_statistics(bad.dataset)};
      const Bytes blob = p.serialize();
      const StageCommitments c = transform_commitments(p);
      expect_fail_at(verify_rewritten(run, 1, &blob, [&](StageRecord& r) { r.outputs = c.outputs; }), 1,
                     "altered transform row");
      // Or the honest proof with one opened output row edited.
      TransformStageProof q = TransformStageProof::deserialize(run.blobs[1]);
      for (auto& item : q.proof.items) {
        if (item.output) {
          item.output->record_bytes[item.output->record_bytes.size() / 2] ^= 0x01;
          break;
        }
      }
      const Bytes qblob = q.serialize();
      expect_fail_at(verify_rewritten(run, 1, &qblob, nullptr), 1, "edited transform opening");
    }
    // Forge one challenged SGD iteration.
    {
      BlindingSource bs = BlindingSource::seeded(seed + 200);
      const TrainResult forged = forged_training(run.transformed->dataset, run.model_spec, 1 + seed % 50, bs);
      TrainStageProof p{run.model_spec, prove_training(forged, run.transformed->dataset, run.model_spec,
                                                      run.model_spec.iterations)};
      const Bytes blob = p.serialize();
      const StageCommitments c = train_commitments(p, false);
      expect_fail_at(verify_rewritten(run, 2, &blob, [&](StageRecord& r) { r.outputs = c.outputs; }), 2,
                     "forged SGD iteration");
    }
    // Swap the weights root emitted by training.
    {
      const Digest other = run.trained->init.root();
      expect_fail_at(verify_rewritten(run, 2, nullptr,
                                      [&](StageRecord& r) {
                                        for (auto& out : r.outputs) {
                                          if (out.label == labels::kWeightsRoot) out.digest = other;
                                        }
                                      }),
                     2, "swapped weights root");
      // And the inference proof presented against other weights.
      InferStageProof p = InferStageProof::deserialize(run.blobs[4]);
      p.proof.weights_root = other;
      const Bytes blob = p.serialize();
      const StageCommitments c = infer_commitments(p);
      expect_fail_at(verify_rewritten(run, 4, &blob, [&](StageRecord& r) { r.inputs = c.inputs; }), 4,
                     "inference with swapped weights root");
    }
    // Corrupt a stored proof blob in place.
    for (std::size_t i = 0; i < run.chain.size(); ++i) {
      MemoryProofStore store = run.store;
      Bytes blob = run.blobs[i];
      blob[blob.size() / 3] ^= 0x04;
      store.overwrite(run.chain.records()[i].proof_digest, blob);
      VerificationContext c2 = ctx;
      c2.store = &store;
      ++cases;
      const ChainReport rep = chain_verify(run.chain, c2);
      o.require(!rep.passed && rep.first_failure == i, "corrupt blob " + std::to_string(i) + " not caught");
    }
    // Delete or reorder chain records.
    {
      std::vector<std::string> lines;
      std::istringstream in(run.chain.to_jsonl());
      for (std::string l; std::getline(in, l);) lines.push_back(l);
      // Dropping the tail leaves a valid prefix, so only interior deletions count.
      for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
        std::vector<std::string> cut = lines;
        cut.erase(cut.begin() + static_cast<std::ptrdiff_t>(i));
        std::string text;
        for (const auto& l : cut) text += l + "\n";
        ++cases;
        o.require(!chain_verify_jsonl(text, ctx).passed, "deleted record " + std::to_string(i) + " not caught");
      }
      for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
        std::vector<std::string> swapped = lines;
        std::swap(swapped[i], swapped[i + 1]);
        std::string text;
        for (const auto& l : swapped) text += l + "\n";
        ++cases;
        o.require(!chain_verify_jsonl(text, ctx).passed, "reordered records " + std::to_string(i) + " not caught");
      }
    }
    // Fake non-membership.
    {
      const UnlearnStageProof honest = UnlearnStageProof::deserialize(run.blobs[5]);
      const SortedMerkleTree& new_tree = run.unlearned->dataset.tree();
      const SortedMerkleTree& old_tree = run.transformed->dataset.tree();
      std::vector<UnlearningProof> fakes;
      {
        UnlearningProof f = honest.proof;
        f.non_membership = new_tree.prove_non_membership(sha256("unrelated" + std::to_string(seed)));
        fakes.push_back(f);
      }
      {
        UnlearningProof f = honest.proof;
        const std::size_t i = *old_tree.index_of(f.deleted_leaf);
        if (i > 0) f.non_membership.left = NeighborOpening{old_tree.leaves()[i - 1], old_tree.prove(i - 1)};
        if (i + 1 < old_tree.size()) f.non_membership.right = NeighborOpening{old_tree.leaves()[i + 1], old_tree.prove(i + 1)};
        fakes.push_back(f);
      }
      {
        UnlearningProof f = honest.proof;
        if (f.non_membership.left) {
          const std::size_t l = *new_tree.index_of(f.non_membership.left->leaf);
          if (l > 0) f.non_membership.left = NeighborOpening{new_tree.leaves()[l - 1], new_tree.prove(l - 1)};
        } else {
          f.non_membership.right.reset();
        }
        fakes.push_back(f);
      }
      for (const UnlearningProof& f : fakes) {
        ++cases;
        o.require(!verify_unlearning(f, f.old_root, f.new_root, run.model_spec), "fake non-membership accepted");
        const Bytes blob = UnlearnStageProof{run.model_spec, f}.serialize();
        expect_fail_at(verify_rewritten(run, 5, &blob, nullptr), 5, "fake non-membership in chain");
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " tamper cases over 3 pipelines, all rejected";
  return o;
}

// ---------------------------------------------------------------------------
// 3. Statistical soundness of sampled checks.

constexpr int kTrials = 400;

double training_detection_rate() {
  const CommittedDataset ds = testing::random_dataset(64, 4, 301);
  const ModelSpec spec = testing::make_spec(ModelKind::kLogisticRegression, 4, 8, 20);
  std::mt19937_64 rng(302);
  int detected = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    BlindingSource bs = BlindingSource::seeded(rng());
    const TrainResult forged = forged_training(ds, spec, 1 + rng() % 20, bs);
    const TrainingProof proof = prove_training(forged, ds, spec, 10);
    detected += !verify_training(proof, spec, {ds.root(), forged.final.root(), std::nullopt, 10});
  }
  return static_cast<double>(detected) / kTrials;
}

double transform_detection_rate() {
  const SigningKey key = testing::test_key(9);
  const std::vector<RawAsset> assets = testing::sign_rows(testing::random_records(16, 3, 303), key);
  const CorpusPolicy policy{{}, {key.public_key()}};
  BlindingSource cbs = BlindingSource::seeded(304);
  const CorpusCommitment corpus = corpus_verify(assets, policy, cbs);
  const TransformSpec spec{{QuantizeOp{12}}};
  std::mt19937_64 rng(305);
  int detected = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    BlindingSource bs = BlindingSource::seeded(rng());
    const TransformOutput honest = transform_apply(corpus, spec, bs);
    const TransformOutput bad = tamper_row(honest, rng() % 16);
    const TransformProof proof = transform_prove(corpus, bad, spec, 8);
    detected += !transform_verify(corpus.root(), bad.dataset.root(), spec, proof);
  }
  return static_cast<double>(detected) / kTrials;
}

double spotcheck_detection_rate() {
  std::mt19937_64 rng(306);
  ModelWeights w;
  std::vector<FixedPoint> x;
  for (int j = 0; j < 16; ++j) {
    w.w.push_back(FixedPoint::from_scaled(static_cast<std::int64_t>(rng() % 200000) - 100000));
    x.push_back(FixedPoint::from_scaled(static_cast<std::int64_t>(rng() % 200000) - 100000));
  }
  int detected = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    BlindingSource bs = BlindingSource::seeded(rng());
    const WeightsOpening weights = WeightsOpening::fresh(w, bs);
    const InferenceRecord record = infer(ModelKind::kLinearRegression, weights, x, bs);
    std::vector<FieldElement> u = inference_products(weights.weights, x);
    u[rng() % 16] += FieldElement(1 + rng() % 1000);
    const InferenceProof proof = prove_spotcheck(record, weights, u, 8, bs);
    const InferencePublicInputs in{weights.root(), record.input_commitment(), record.output_commitment(),
                                   ModelKind::kLinearRegression, 8};
    detected += !verify_inference(proof, in).accepted;
  }
  return static_cast<double>(detected) / kTrials;
}

Outcome criterion_statistical() {
  Outcome o;
  const double train = training_detection_rate();
  const double transform = transform_detection_rate();
  const double spot = spotcheck_detection_rate();
  auto in_band = [](double r) { return r >= 0.4 && r <= 0.6; };
  o.require(in_band(train), "training rate " + fmt(train));
  o.require(in_band(transform), "transform rate " + fmt(transform));
  o.require(in_band(spot), "spotcheck rate " + fmt(spot));
  o.detail = "detection over " + std::to_string(kTrials) + " trials: training " + fmt(train) + ", transform " +
             fmt(transform) + ", spotcheck " + fmt(spot) + (o.pass ? "" : " (" + o.detail + ")");
  return o;
}

// ---------------------------------------------------------------------------
// 4. Sum-check and matmul.

FieldElement rand_field(std::mt19937_64& rng) { return FieldElement(rng() % kModulus); }

MultilinearPoly rand_poly(std::size_t m, std::mt19937_64& rng) {
  std::vector<FieldElement> e(std::size_t{1} << m);
  for (auto& v : e) v = rand_field(rng);
  return MultilinearPoly(m, std::move(e));
}

Outcome criterion_sumcheck() {
  Outcome o;
  std::mt19937_64 rng(401);
  int honest = 0;
  for (std::size_t m = 1; m <= 10; ++m) {
    for (int i = 0; i < 100; ++i) {
      const MultilinearPoly g = rand_poly(m, rng), h = rand_poly(m, rng);
      Transcript pt("acceptance/sumcheck");
      const SumcheckProof proof = sumcheck_prove(g, h, pt);
      std::uint64_t brute = 0;
      for (std::size_t x = 0; x < g.evaluations().size(); ++x) {
        brute = oracle::add(brute, oracle::mul(g.evaluations()[x].value(), h.evaluations()[x].value()));
      }
      Transcript vt("acceptance/sumcheck");
      const bool ok = proof.claimed_sum.value() == brute &&
                      sumcheck_verify(proof.claimed_sum, m, proof,
                                      [&](std::span<const FieldElement> r) {
                                        return std::pair{mle_eval(g, r), mle_eval(h, r)};
                                      },
                                      vt);
      honest += ok;
      o.require(ok, "honest m=" + std::to_string(m) + " rejected");
    }
  }
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + i % 10;
    const MultilinearPoly g = rand_poly(m, rng), h = rand_poly(m, rng);
    Transcript pt("acceptance/sumcheck");
    SumcheckProof proof = sumcheck_prove(g, h, pt);
    FieldElement claim = proof.claimed_sum;
    const FieldElement delta(1 + rng() % (kModulus - 1));
    switch (i % 4) {
      case 0:
        claim += delta;
        proof.claimed_sum = claim;
        break;
      case 1:
        proof.rounds[rng() % m].c0 += delta;
        break;
      case 2:
        proof.rounds[rng() % m].c2 += delta;
        break;
      default:
        proof.final_point[rng() % m] += delta;
        break;
    }
    Transcript vt("acceptance/sumcheck");
    rejected += !sumcheck_verify(claim, m, proof,
                                 [&](std::span<const FieldElement> r) {
                                   return std::pair{mle_eval(g, r), mle_eval(h, r)};
                                 },
                                 vt);
  }
  o.require(rejected == 1000, std::to_string(1000 - rejected) + " tampered transcripts accepted");

  int mm_honest = 0, mm_rejected = 0;
  for (int i = 0; i < 100; ++i) {
    FieldMatrix a(16, 16), b(16, 16);
    for (auto& v : a.data) v = rand_field(rng);
    for (auto& v : b.data) v = rand_field(rng);
    FieldMatrix c(16, 16);
    for (std::size_t r = 0; r < 16; ++r) {
      for (std::size_t col = 0; col < 16; ++col) {
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < 16; ++k) acc = oracle::add(acc, oracle::mul(a.at(r, k).value(), b.at(k, col).value()));
        c.at(r, col) = FieldElement(acc);
      }
    }
    Transcript t1("acceptance/matmul");
    mm_honest += verify_matmul(a, b, c, t1);
    c.data[rng() % c.data.size()] += FieldElement(1 + rng() % (kModulus - 1));
    Transcript t2("acceptance/matmul");
    mm_rejected += !verify_matmul(a, b, c, t2);
  }
  o.require(mm_honest == 100, "matmul honest " + std::to_string(mm_honest) + "/100");
  o.require(mm_rejected == 100, "matmul corrupt rejected " + std::to_string(mm_rejected) + "/100");
  if (o.pass) {
    o.detail = std::to_string(honest) + "/1000 honest (m=1..10), " + std::to_string(rejected) +
               "/1000 tampered rejected, matmul 16x16 " + std::to_string(mm_honest) + "/100 honest, " +
               std::to_string(mm_rejected) + "/100 corrupt rejected";
  }
  return o;
}

// ---------------------------------------------------------------------------
// 5. Numerical fidelity on the end-to-end dataset.

Outcome criterion_fidelity() {
  Outcome o;
  const SyntheticOptions synth;
  const SyntheticCorpus corpus = make_synthetic_corpus(synth);
  BlindingSource bs = BlindingSource::seeded(501);
  const CorpusCommitment committed = corpus_verify(corpus.assets, demo_policy(corpus), bs);
  const TransformOutput transformed = transform_apply(committed, demo_transform_spec(), bs);
  const CommittedDataset& ds = transformed.dataset;
  const ModelSpec spec = demo_model_spec(synth.dimension, synth.seed);
  const TrainResult result = train(ds, spec, WeightsOpening::fresh(ModelWeights::zeros(spec.dimension), bs), bs);

  oracle::Weights init;
  init.w.assign(spec.dimension, 0);
  const std::vector<oracle::Row> rows = oracle_rows(ds);
  const bool logistic = spec.kind == ModelKind::kLogisticRegression;
  const std::vector<oracle::Weights> steps =
      oracle::sgd(rows, logistic, spec.learning_rate.scaled(), spec.batch_size, spec.iterations, spec.seed, init);
  std::size_t mismatches = 0;
  for (std::size_t t = 1; t <= spec.iterations; ++t) {
    const ModelWeights& w = result.trace.states()[t].weights;
    for (std::size_t j = 0; j < spec.dimension; ++j) mismatches += w.w[j].scaled() != steps[t - 1].w[j];
    mismatches += w.bias.scaled() != steps[t - 1].b;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " coordinates differ from the integer oracle");

  const auto [dw, db] = oracle::sgd_double(rows, logistic, spec.learning_rate.to_double(), spec.batch_size,
                                           spec.iterations, spec.seed, spec.dimension);
  double linf = std::fabs(result.final.weights.bias.to_double() - db);
  for (std::size_t j = 0; j < spec.dimension; ++j) {
    linf = std::max(linf, std::fabs(result.final.weights.w[j].to_double() - dw[j]));
  }
  o.require(linf <= 1e-2, "L-inf " + fmt(linf));
  if (o.pass) {
    o.detail = "bit-exact over " + std::to_string(spec.iterations) + " iterations; L-inf vs double = " + fmt(linf);
  }
  return o;
}

// ---------------------------------------------------------------------------
// 6. Unlearning exactness.

Outcome criterion_unlearning() {
  Outcome o;
  std::size_t checked = 0;
  for (std::size_t row : {0, 3, 100, 255}) {
    PipelineRun run;
    PipelineOptions opts = full_options(600 + row);
    opts.unlearn_row = row;
    testing::run_pipeline(run, opts);
    const CommittedDataset& old_ds = run.transformed->dataset;
    const UnlearnResult& u = *run.unlearned;
    const Digest leaf = old_ds.entries()[row].leaf;

    // D minus x keeps the surviving commitments, hence their order and the
    // batch schedule over them.
    BlindingSource fresh_bs = BlindingSource::seeded(9000 + row);
    const CommittedDataset rest = old_ds.without(leaf);
    const TrainResult fresh =
        train(rest, run.model_spec, WeightsOpening::fresh(run.trained->init.weights, fresh_bs), fresh_bs);
    o.require(u.retrained.final.weights == fresh.final.weights, "retrained weights differ for row " + std::to_string(row));

    std::vector<oracle::Row> rows = oracle_rows(old_ds);
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(row));
    oracle::Weights init;
    for (FixedPoint v : run.trained->init.weights.w) init.w.push_back(v.scaled());
    init.b = run.trained->init.weights.bias.scaled();
    const oracle::Weights expect =
        oracle::sgd(rows, true, run.model_spec.learning_rate.scaled(), run.model_spec.batch_size,
                    run.model_spec.iterations, run.model_spec.seed, init)
            .back();
    bool same = expect.b == u.retrained.final.weights.bias.scaled();
    for (std::size_t j = 0; j < expect.w.size(); ++j) same = same && expect.w[j] == u.retrained.final.weights.w[j].scaled();
    o.require(same, "retrained weights differ from the integer oracle for row " + std::to_string(row));
    o.require(non_membership_verify(u.dataset.root(), u.proof.non_membership) && u.proof.non_membership.target == leaf,
              "non-membership proof rejected");
    o.require(merkle_verify(old_ds.root(), leaf, u.proof.old_membership), "old membership rejected");
    o.require(!merkle_verify(u.dataset.root(), leaf, u.proof.old_membership), "deleted leaf opens against new root");
    for (std::size_t i = 0; i < u.dataset.size(); ++i) {
      if (merkle_verify(u.dataset.root(), leaf, u.dataset.tree().prove(i))) o.require(false, "deleted leaf opens");
    }
    o.require(verify_unlearning(u.proof, old_ds.root(), u.dataset.root(), run.model_spec, 10, run.trained->init.root()),
              "unlearning proof rejected");
    o.require(chain_verify(run.chain, run.context()).passed, "chain with unlearn record rejected");
    ++checked;
  }
  if (o.pass) o.detail = std::to_string(checked) + " deletions: bit-identical retrain, non-membership holds";
  return o;
}

// ---------------------------------------------------------------------------
// 7. Determinism.

std::map<std::string, std::string> directory_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

Outcome criterion_determinism() {
  Outcome o;
  PipelineRun a, b;
  testing::run_pipeline(a, full_options(701));
  testing::run_pipeline(b, full_options(701));
  o.require(a.chain.to_jsonl() == b.chain.to_jsonl(), "in-memory chain logs differ");
  o.require(a.blobs == b.blobs, "in-memory proof blobs differ");

  const fs::path d1 = fs::temp_directory_path() / "attest-acceptance-det1";
  const fs::path d2 = fs::temp_directory_path() / "attest-acceptance-det2";
  const std::string f1 = cli_pipeline(d1), f2 = cli_pipeline(d2);
  o.require(f1.empty() && f2.empty(), "CLI run failed: " + f1 + f2);
  if (o.pass) {
    const PipelineConfig c1 = PipelineConfig::load(d1 / "config.json");
    const PipelineConfig c2 = PipelineConfig::load(d2 / "config.json");
    o.require(read_file(c1.chain_log) == read_file(c2.chain_log), "CLI chain logs differ");
    const auto s1 = directory_contents(c1.proof_store), s2 = directory_contents(c2.proof_store);
    o.require(!s1.empty() && s1 == s2, "CLI proof stores differ");
    if (o.pass) {
      o.detail = "two in-memory and two CLI runs byte-identical (" + std::to_string(s1.size()) +
                 " blobs); single implementation";
    }
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
  return o;
}

// ---------------------------------------------------------------------------
// 8. Field, commitment and Merkle property suites.

Outcome criterion_properties() {
  Outcome o;
  std::mt19937_64 rng(801);
  const std::uint64_t p = kModulus;
  auto draw = [&]() -> std::uint64_t {
    switch (rng() % 8) {
      case 0: return rng() % 4;
      case 1: return p - 1 - rng() % 4;
      case 2: return (1ULL << 32) + rng() % 3 - 1;
      default: return rng() % p;
    }
  };
  int field_checks = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t a = draw(), b = draw(), c = draw();
    const FieldElement fa(a), fb(b), fc(c);
    bool ok = (fa + fb).value() == oracle::add(a, b) && (fa * fb).value() == oracle::mul(a, b) &&
              (fa - fb).value() == oracle::sub(a, b) && fa + fb == fb + fa && fa * fb == fb * fa &&
              (fa * fb) * fc == fa * (fb * fc) && fa * (fb + fc) == fa * fb + fa * fc && fa + (-fa) == FieldElement();
    if (i % 10 == 0 && a != 0) ok = ok && fa * fa.inverse() == FieldElement::one();
    field_checks += ok;
  }
  o.require(field_checks == 100000, std::to_string(100000 - field_checks) + " field checks failed");

  // 10^4 mutations across signatures, commitment openings and Merkle paths.
  const SigningKey key = testing::test_key(0x42);
  std::vector<Bytes> leaves;
  for (int i = 0; i < 13; ++i) leaves.push_back(to_bytes("leaf-" + std::to_string(i)));
  const MerkleTree tree = MerkleTree::build(leaves);
  int rejected = 0;
  for (int i = 0; i < 10000; ++i) {
    Bytes msg(1 + rng() % 64);
    for (auto& x : msg) x = static_cast<std::uint8_t>(rng());
    bool accepted = false;
    switch (i % 4) {
      case 0: {
        Signature sig = key.sign(msg);
        sig[rng() % 64] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        accepted = ed25519_verify(key.public_key(), msg, sig);
        break;
      }
      case 1: {
        const Signature sig = key.sign(msg);
        msg[rng() % msg.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        accepted = ed25519_verify(key.public_key(), msg, sig);
        break;
      }
      case 2: {
        Blinding b;
        for (auto& x : b) x = static_cast<std::uint8_t>(rng());
        const Commitment c = commit_create(msg, b);
        if (rng() & 1) {
          msg[rng() % msg.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        } else {
          b[rng() % 32] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        }
        accepted = commit_verify_opening(c, msg, b);
        break;
      }
      default: {
        const std::size_t idx = rng() % leaves.size();
        MerklePath path = tree.prove(idx);
        Bytes payload = leaves[idx];
        switch (rng() % 3) {
          case 0:
            path.siblings[rng() % path.siblings.size()].sibling.bytes[rng() % 32] ^= 1;
            break;
          case 1:
            payload[rng() % payload.size()] ^= 1;
            break;
          default:
            path.leaf_index ^= 1 + rng() % 7;
            break;
        }
        accepted = merkle_verify(tree.root(), payload, path);
        break;
      }
    }
    rejected += !accepted;
  }
  o.require(rejected == 10000, std::to_string(10000 - rejected) + " mutations accepted");

  // Exhaustive Merkle membership and non-membership up to 16 leaves.
  std::size_t merkle_checks = 0;
  for (std::size_t n = 1; n <= 16; ++n) {
    std::vector<oracle::H> ohashes;
    std::vector<Bytes> payloads;
    std::vector<Digest> sorted_leaves;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string s = "m" + std::to_string(n) + "-" + std::to_string(i);
      payloads.push_back(to_bytes(s));
      ohashes.push_back(oracle::leaf(s));
      sorted_leaves.push_back(sha256(s));
    }
    const MerkleTree t = MerkleTree::build(payloads);
    o.require(t.root() == Digest::from_bytes(oracle::merkle_root(ohashes)), "root differs from oracle");
    for (std::size_t i = 0; i < n; ++i) {
      const MerklePath path = t.prove(i);
      for (std::size_t j = 0; j < n; ++j) {
        o.require(merkle_verify(t.root(), payloads[j], path) == (i == j), "membership wrong");
        ++merkle_checks;
      }
    }
    const SortedMerkleTree st = SortedMerkleTree::build(sorted_leaves);
    for (std::size_t k = 0; k < 2 * n + 2; ++k) {
      const Digest target = sha256("absent-" + std::to_string(n) + "-" + std::to_string(k));
      const NonMembershipProof proof = st.prove_non_membership(target);
      o.require(non_membership_verify(st.root(), proof), "non-membership rejected");
      NonMembershipProof lie = proof;
      lie.target = st.leaves()[k % n];
      o.require(!non_membership_verify(st.root(), lie), "non-membership of a present leaf accepted");
      merkle_checks += 2;
    }
    for (const Digest& present : st.leaves()) {
      bool threw = false;
      try {
        st.prove_non_membership(present);
      } catch (const Error&) {
        threw = true;
      }
      o.require(threw, "present leaf yielded a non-membership proof");
      ++merkle_checks;
    }
  }
  if (o.pass) {
    o.detail = std::to_string(field_checks) + " field checks, " + std::to_string(rejected) +
               " mutations rejected, " + std::to_string(merkle_checks) + " Merkle checks (n <= 16)";
  }
  return o;
}

}  // namespace
}  // namespace attest

int main() {
  using attest::Outcome;
  unsetenv(std::string(attest::kHomeEnv).c_str());
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"end-to-end pipeline", attest::criterion_end_to_end},
      {"tamper matrix", attest::criterion_tamper_matrix},
      {"statistical soundness", attest::criterion_statistical},
      {"sum-check and matmul", attest::criterion_sumcheck},
      {"numerical fidelity", attest::criterion_fidelity},
      {"unlearning exactness", attest::criterion_unlearning},
      {"determinism", attest::criterion_determinism},
      {"field/commitment properties", attest::criterion_properties},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
