// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include <gtest/gtest.h>

#include <random>

#include "attest/error.h"
#include "attest/infer_eval.h"
#include "oracles.h"
#include "test_support.h"

namespace attest {
namespace {

WeightsOpening weights_of(std::vector<double> w, double b, std::uint64_t seed = 1) {
  ModelWeights m;
  for (double v : w) m.w.push_back(fp_encode(v));
  m.bias = fp_encode(b);
  BlindingSource bs = BlindingSource::seeded(seed);
  return WeightsOpening::fresh(m, bs);
}

WeightsOpening random_weights(std::size_t d, std::mt19937_64& rng) {
  ModelWeights m;
  for (std::size_t j = 0; j < d; ++j) m.w.push_back(FixedPoint::from_scaled(static_cast<std::int64_t>(rng() % 400000) - 200000));
  m.bias = FixedPoint::from_scaled(static_cast<std::int64_t>(rng() % 100000) - 50000);
  BlindingSource bs = BlindingSource::seeded(rng());
  return WeightsOpening::fresh(m, bs);
}

std::vector<FixedPoint> random_x(std::size_t d, std::mt19937_64& rng) {
  std::vector<FixedPoint> x;
  for (std::size_t j = 0; j < d; ++j) x.push_back(FixedPoint::from_scaled(static_cast<std::int64_t>(rng() % 200000) - 100000));
  return x;
}

InferencePublicInputs public_of(const InferenceRecord& r, std::size_t min_c = 1) {
  return {r.weights_root, r.input_commitment(), r.output_commitment(), r.kind, min_c};
}

TEST(Infer, ZeroWeightsGiveBias) {
  const WeightsOpening w = weights_of({0, 0, 0}, 1.25);
  BlindingSource bs = BlindingSource::seeded(2);
  const InferenceRecord r = infer(ModelKind::kLinearRegression, w, {{fp_encode(3), fp_encode(-4), fp_encode(9)}}, bs);
  EXPECT_EQ(r.z, fp_encode(1.25));
  EXPECT_TRUE(r.predicted_class);
}

TEST(Infer, UnitWeight) {
  const WeightsOpening w = weights_of({1, 0}, 0);
  BlindingSource bs = BlindingSource::seeded(2);
  const InferenceRecord r = infer(ModelKind::kLinearRegression, w, {{fp_encode(2.5), fp_encode(7)}}, bs);
  EXPECT_EQ(r.z, fp_encode(2.5));
  EXPECT_EQ(r.weights_root, w.root());
}

TEST(Infer, MatchesIntegerDotOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const WeightsOpening w = random_weights(6, rng);
    const std::vector<FixedPoint> x = random_x(6, rng);
    __int128 acc = 0;
    for (std::size_t j = 0; j < 6; ++j) acc += static_cast<__int128>(w.weights.w[j].scaled()) * x[j].scaled();
    BlindingSource bs = BlindingSource::seeded(i);
    const InferenceRecord r = infer(ModelKind::kLogisticRegression, w, x, bs);
    const std::int64_t z = oracle::floor16(acc) + w.weights.bias.scaled();
    ASSERT_EQ(r.z.scaled(), z);
    ASSERT_EQ(r.output.scaled(), oracle::sigmoid(z));
    ASSERT_EQ(r.predicted_class, oracle::sigmoid(z) >= 32768);
  }
}

TEST(Infer, WrongDimensionThrows) {
  const WeightsOpening w = weights_of({1, 0}, 0);
  BlindingSource bs = BlindingSource::seeded(2);
  EXPECT_THROW(infer(ModelKind::kLinearRegression, w, {{fp_encode(1)}}, bs), Error);
}

TEST(InferenceProof, AuditHonestAndSubstitutedWeight) {
  std::mt19937_64 rng(4);
  const WeightsOpening w = random_weights(5, rng);
  BlindingSource bs = BlindingSource::seeded(5);
  const InferenceRecord r = infer(ModelKind::kLogisticRegression, w, random_x(5, rng), bs);
  const InferenceProof proof = prove_inference(r, w, InferenceMode::kAudit, 0, bs);
  const InferenceVerdict v = verify_inference(proof, public_of(r));
  EXPECT_TRUE(v);
  EXPECT_TRUE(v.sum_checked);
  EXPECT_TRUE(verify_inference(InferenceProof::deserialize(proof.serialize()), public_of(r)));

  InferenceProof bad = proof;
  bad.weights->weights.w[2] = fp_add(bad.weights->weights.w[2], FixedPoint::from_scaled(1));
  EXPECT_FALSE(verify_inference(bad, public_of(r)));

  InferenceProof wrong_z = proof;
  wrong_z.z = fp_add(wrong_z.z, FixedPoint::from_scaled(1));
  EXPECT_FALSE(verify_inference(wrong_z, public_of(r)));

  InferencePublicInputs other = public_of(r);
  other.kind = ModelKind::kLinearRegression;
  EXPECT_FALSE(verify_inference(proof, other));
}

TEST(InferenceProof, SpotcheckHonestPartialAndFull) {
  std::mt19937_64 rng(6);
  const WeightsOpening w = random_weights(16, rng);
  BlindingSource bs = BlindingSource::seeded(7);
  const InferenceRecord r = infer(ModelKind::kLinearRegression, w, random_x(16, rng), bs);
  const InferenceProof partial = prove_inference(r, w, InferenceMode::kSpotcheck, 8, bs);
  const InferenceVerdict v = verify_inference(partial, public_of(r));
  EXPECT_TRUE(v);
  EXPECT_EQ(v.opened, 8u);
  EXPECT_FALSE(v.sum_checked);
  EXPECT_FALSE(verify_inference(partial, public_of(r, 9)));
  EXPECT_TRUE(verify_inference(InferenceProof::deserialize(partial.serialize()), public_of(r)));

  const InferenceProof full = prove_inference(r, w, InferenceMode::kSpotcheck, 16, bs);
  const InferenceVerdict vf = verify_inference(full, public_of(r));
  EXPECT_TRUE(vf);
  EXPECT_TRUE(vf.sum_checked);
  EXPECT_FALSE(vf.describe().empty());
}

TEST(InferenceProof, SpotcheckCorruptedProductCaughtWhenOpened) {
  std::mt19937_64 rng(8);
  const WeightsOpening w = random_weights(16, rng);
  BlindingSource bs = BlindingSource::seeded(9);
  const InferenceRecord r = infer(ModelKind::kLinearRegression, w, random_x(16, rng), bs);
  std::vector<FieldElement> u = inference_products(w.weights, r.input);
  u[11] += FieldElement::one();
  // All coordinates opened: always caught.
  EXPECT_FALSE(verify_inference(prove_spotcheck(r, w, u, 16, bs), public_of(r)));
}

TEST(InferenceProof, CommitmentMismatchRejected) {
  std::mt19937_64 rng(10);
  const WeightsOpening w = random_weights(4, rng);
  BlindingSource bs = BlindingSource::seeded(11);
  const InferenceRecord r = infer(ModelKind::kLinearRegression, w, random_x(4, rng), bs);
  const InferenceProof proof = prove_inference(r, w, InferenceMode::kSpotcheck, 2, bs);
  InferencePublicInputs in = public_of(r);
  in.output_commitment = r.input_commitment();
  EXPECT_FALSE(verify_inference(proof, in));
  in = public_of(r);
  in.weights_root = sha256("other");
  EXPECT_FALSE(verify_inference(proof, in));
}

Record bench_row(std::vector<double> x, double y, double group) {
  Record r;
  for (double v : x) r.features.push_back(fp_encode(v));
  r.features.push_back(fp_encode(group));
  r.label = fp_encode(y);
  return r;
}

TEST(Evaluate, ExactModelScoresAll) {
  const WeightsOpening w = weights_of({1, 0}, 0);
  std::vector<Record> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(bench_row({i % 2 ? 1.0 : 0.0}, i % 2, 0));
  BlindingSource bs = BlindingSource::seeded(1);
  const EvaluationResult e = evaluate(ModelKind::kLinearRegression, w, PublicDataset::from_records(rows), std::nullopt, bs);
  EXPECT_EQ(e.report.accuracy_count, 10u);
  EXPECT_EQ(e.report.n, 10u);
}

TEST(Evaluate, HandBuiltBenchmarkMatchesRecount) {
  const WeightsOpening w = weights_of({2.0, -1.0, 0.0}, -0.25);
  const std::vector<Record> rows = {
      bench_row({1, 0}, 1, 0),  bench_row({0, 1}, 0, 1),   bench_row({0.5, 0.5}, 1, 0), bench_row({-1, 0}, 1, 1),
      bench_row({0.2, 0}, 0, 0), bench_row({3, 2}, 1, 1), bench_row({0, 0}, 0, 0),     bench_row({0.1, -2}, 0, 1)};
  const PublicDataset bench = PublicDataset::from_records(rows);
  BlindingSource bs = BlindingSource::seeded(1);
  const EvaluationResult e = evaluate(ModelKind::kLogisticRegression, w, bench, 2, bs);
  std::uint64_t correct = 0, g_correct[2] = {0, 0}, g_total[2] = {0, 0};
  for (const Record& r : rows) {
    __int128 acc = 0;
    for (std::size_t j = 0; j < 3; ++j) acc += static_cast<__int128>(w.weights.w[j].scaled()) * r.features[j].scaled();
    const bool pred = oracle::sigmoid(oracle::floor16(acc) + w.weights.bias.scaled()) >= 32768;
    const bool ok = pred == (r.label.scaled() >= 32768);
    const int g = r.features[2].scaled() ? 1 : 0;
    correct += ok;
    g_correct[g] += ok;
    ++g_total[g];
  }
  EXPECT_EQ(e.report.accuracy_count, correct);
  ASSERT_EQ(e.report.groups.size(), 2u);
  EXPECT_EQ(e.report.groups[0].value, 0);
  EXPECT_EQ(e.report.groups[0].correct, g_correct[0]);
  EXPECT_EQ(e.report.groups[1].total, g_total[1]);
  EXPECT_TRUE(verify_evaluation(e.report, bench, e.audit));
  EXPECT_EQ(EvaluationReport::from_json(e.report.to_json()), e.report);
  EXPECT_TRUE(verify_evaluation(e.report, bench, EvaluationAudit::deserialize(e.audit.serialize())));

  EvaluationReport inflated = e.report;
  inflated.accuracy_count = inflated.n + 1;
  EXPECT_FALSE(verify_evaluation(inflated, bench, e.audit));
  EvaluationReport shifted = e.report;
  shifted.groups[0].correct += 1;
  EXPECT_FALSE(verify_evaluation(shifted, bench, e.audit));
  EvaluationReport moved = e.report;
  std::swap(moved.predictions[0], moved.predictions[1]);
  EXPECT_FALSE(verify_evaluation(moved, bench, e.audit));

  BlindingSource bs2 = BlindingSource::seeded(1);
  EXPECT_THROW(evaluate(ModelKind::kLogisticRegression, w, bench, 3, bs2), Error);
}

}  // namespace
}  // namespace attest
