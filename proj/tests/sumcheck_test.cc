// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include <gtest/gtest.h>

#include <random>

#include "attest/error.h"
#include "attest/sumcheck.h"
#include "oracles.h"

namespace attest {
namespace {

FieldElement rand_field(std::mt19937_64& rng) { return FieldElement(rng() % kModulus); }

MultilinearPoly rand_poly(std::size_t m, std::mt19937_64& rng) {
  std::vector<FieldElement> e(std::size_t{1} << m);
  for (auto& x : e) x = rand_field(rng);
  return MultilinearPoly(m, e);
}

// Sum over the hypercube of table[x] times the Lagrange basis at `point`;
// variable i is bit i of x.
std::uint64_t lagrange_oracle(const std::vector<FieldElement>& table, const std::vector<FieldElement>& point) {
  std::uint64_t acc = 0;
  for (std::size_t x = 0; x < table.size(); ++x) {
    std::uint64_t w = 1;
    for (std::size_t i = 0; i < point.size(); ++i) {
      const std::uint64_t r = point[i].value();
      w = oracle::mul(w, (x >> i) & 1 ? r : oracle::sub(1, r));
    }
    acc = oracle::add(acc, oracle::mul(w, table[x].value()));
  }
  return acc;
}

std::pair<FieldElement, FieldElement> eval_pair(const MultilinearPoly& g, const MultilinearPoly& h,
                                                std::span<const FieldElement> r) {
  return {mle_eval(g, r), mle_eval(h, r)};
}

TEST(Mle, BooleanPointsReturnTableEntries) {
  std::mt19937_64 rng(1);
  const MultilinearPoly p = rand_poly(3, rng);
  for (std::size_t x = 0; x < 8; ++x) {
    std::vector<FieldElement> pt;
    for (int i = 0; i < 3; ++i) pt.push_back(FieldElement((x >> i) & 1));
    EXPECT_EQ(mle_eval(p, pt), p.evaluations()[x]);
  }
}

TEST(Mle, LinearInterpolation) {
  const FieldElement a(10), b(3), t(1234567);
  const MultilinearPoly p(1, {a, b});
  const FieldElement pt[] = {t};
  EXPECT_EQ(mle_eval(p, pt), a + t * (b - a));
}

TEST(Mle, MatchesLagrangeOracle) {
  std::mt19937_64 rng(2);
  for (std::size_t m = 0; m <= 5; ++m) {
    const MultilinearPoly p = rand_poly(m, rng);
    std::vector<FieldElement> pt;
    for (std::size_t i = 0; i < m; ++i) pt.push_back(rand_field(rng));
    EXPECT_EQ(mle_eval(p, pt).value(), lagrange_oracle(p.evaluations(), pt));
    const std::vector<FieldElement> eq = eq_table(pt);
    FieldElement via_eq;
    for (std::size_t x = 0; x < eq.size(); ++x) via_eq += eq[x] * p.evaluations()[x];
    EXPECT_EQ(via_eq, mle_eval(p, pt));
  }
}

TEST(Mle, ShapeChecks) {
  EXPECT_THROW(MultilinearPoly(2, {FieldElement(1)}), Error);
  const MultilinearPoly p(1, {FieldElement(1), FieldElement(2)});
  EXPECT_THROW(mle_eval(p, {}), Error);
}

TEST(Sumcheck, AllOnesSumIsFour) {
  const MultilinearPoly ones(2, std::vector<FieldElement>(4, FieldElement::one()));
  Transcript t("test");
  EXPECT_EQ(sumcheck_prove(ones, ones, t).claimed_sum, FieldElement(4));
}

TEST(Sumcheck, ProductOfCoordinates) {
  // x1 is bit 0, x2 is bit 1.
  const MultilinearPoly g(2, {FieldElement(0), FieldElement(1), FieldElement(0), FieldElement(1)});
  const MultilinearPoly h(2, {FieldElement(0), FieldElement(0), FieldElement(1), FieldElement(1)});
  Transcript t("test");
  const SumcheckProof proof = sumcheck_prove(g, h, t);
  EXPECT_EQ(proof.claimed_sum, FieldElement(1));
  Transcript v("test");
  EXPECT_TRUE(sumcheck_verify(FieldElement(1), 2, proof, [&](auto r) { return eval_pair(g, h, r); }, v));
}

TEST(Sumcheck, HonestAcceptedAndMatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (std::size_t m = 0; m <= 6; ++m) {
    const MultilinearPoly g = rand_poly(m, rng), h = rand_poly(m, rng);
    std::uint64_t brute = 0;
    for (std::size_t x = 0; x < g.evaluations().size(); ++x) {
      brute = oracle::add(brute, oracle::mul(g.evaluations()[x].value(), h.evaluations()[x].value()));
    }
    Transcript t("test");
    const SumcheckProof proof = sumcheck_prove(g, h, t);
    ASSERT_EQ(proof.claimed_sum.value(), brute);
    Transcript v("test");
    ASSERT_TRUE(sumcheck_verify(proof.claimed_sum, m, proof, [&](auto r) { return eval_pair(g, h, r); }, v));
    const SumcheckProof back = SumcheckProof::deserialize(proof.serialize());
    Transcript v2("test");
    ASSERT_TRUE(sumcheck_verify(proof.claimed_sum, m, back, [&](auto r) { return eval_pair(g, h, r); }, v2));
  }
}

TEST(Sumcheck, WrongClaimRejected) {
  std::mt19937_64 rng(4);
  const MultilinearPoly g = rand_poly(4, rng), h = rand_poly(4, rng);
  Transcript t("test");
  SumcheckProof proof = sumcheck_prove(g, h, t);
  const FieldElement wrong = proof.claimed_sum + FieldElement::one();
  Transcript v("test");
  EXPECT_FALSE(sumcheck_verify(wrong, 4, proof, [&](auto r) { return eval_pair(g, h, r); }, v));
  proof.claimed_sum = wrong;
  Transcript v2("test");
  EXPECT_FALSE(sumcheck_verify(wrong, 4, proof, [&](auto r) { return eval_pair(g, h, r); }, v2));
}

TEST(Sumcheck, PerturbedCoefficientRejected) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + trial % 6;
    const MultilinearPoly g = rand_poly(m, rng), h = rand_poly(m, rng);
    Transcript t("test");
    SumcheckProof proof = sumcheck_prove(g, h, t);
    RoundPoly& p = proof.rounds[rng() % m];
    FieldElement* c[] = {&p.c0, &p.c1, &p.c2};
    *c[rng() % 3] += FieldElement(1 + rng() % 1000);
    Transcript v("test");
    ASSERT_FALSE(sumcheck_verify(proof.claimed_sum, m, proof, [&](auto r) { return eval_pair(g, h, r); }, v));
  }
}

FieldMatrix rand_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  FieldMatrix m(r, c);
  for (auto& x : m.data) x = rand_field(rng);
  return m;
}

FieldMatrix oracle_matmul(const FieldMatrix& a, const FieldMatrix& b) {
  FieldMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < a.cols; ++k) acc = oracle::add(acc, oracle::mul(a.at(i, k).value(), b.at(k, j).value()));
      c.at(i, j) = FieldElement(acc);
    }
  }
  return c;
}

TEST(Matmul, IdentityTimesM) {
  std::mt19937_64 rng(6);
  const FieldMatrix m = rand_matrix(4, 4, rng);
  Transcript t("mm");
  EXPECT_TRUE(verify_matmul(FieldMatrix::identity(4), m, m, t));
}

TEST(Matmul, HonestAndCorrupted) {
  std::mt19937_64 rng(7);
  const std::pair<std::size_t, std::size_t> shapes[] = {{4, 4}, {3, 5}, {16, 16}, {8, 1}, {5, 7}};
  for (auto [n, k] : shapes) {
    const FieldMatrix a = rand_matrix(n, k, rng), b = rand_matrix(k, n == 8 ? 1 : n, rng);
    const FieldMatrix c = oracle_matmul(a, b);
    ASSERT_EQ(matmul(a, b).data, c.data);
    Transcript t("mm");
    EXPECT_TRUE(verify_matmul(a, b, c, t));
    FieldMatrix bad = c;
    bad.data[rng() % bad.data.size()] += FieldElement::one();
    Transcript t2("mm");
    EXPECT_FALSE(verify_matmul(a, b, bad, t2));
  }
  FieldMatrix a(2, 3), b(2, 2), c(2, 2);
  Transcript t("mm");
  EXPECT_THROW(verify_matmul(a, b, c, t), Error);
}

}  // namespace
}  // namespace attest
