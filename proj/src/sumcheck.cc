// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/sumcheck.h"

#include <bit>
#include <string>

#include "attest/error.h"

namespace attest {
namespace {

// Fixes the lowest variable to r: out[j] = e[2j] + r (e[2j+1] - e[2j]).
void fold_in_place(std::vector<FieldElement>& e, FieldElement r) {
  const std::size_t half = e.size() / 2;
  for (std::size_t j = 0; j < half; ++j) {
    e[j] = e[2 * j] + r * (e[2 * j + 1] - e[2 * j]);
  }
  e.resize(half);
}

std::string round_label(std::size_t i) { return "sumcheck/round/" + std::to_string(i); }

void absorb_round(Transcript& t, std::size_t i, const RoundPoly& p) {
  ByteWriter w;
  p.c0.write(w);
  p.c1.write(w);
  p.c2.write(w);
  t.absorb(round_label(i), w.data());
}

std::size_t log2_exact(std::size_t n) { return static_cast<std::size_t>(std::countr_zero(n)); }

}  // namespace

MultilinearPoly::MultilinearPoly(std::size_t num_vars, std::vector<FieldElement> evaluations)
    : num_vars_(num_vars), evals_(std::move(evaluations)) {
  if (num_vars_ >= 63 || evals_.size() != (std::size_t{1} << num_vars_)) {
    throw Error(ErrorCode::kDimensionMismatch, "evaluation table length must be 2^num_vars");
  }
}

FieldElement mle_eval(const MultilinearPoly& poly, std::span<const FieldElement> point) {
  if (point.size() != poly.num_vars()) {
    throw Error(ErrorCode::kDimensionMismatch, "point has " + std::to_string(point.size()) +
                                                   " coordinates, polynomial has " +
                                                   std::to_string(poly.num_vars()) + " variables");
  }
  std::vector<FieldElement> e = poly.evaluations();
  for (FieldElement r : point) fold_in_place(e, r);
  return e.front();
}

std::vector<FieldElement> eq_table(std::span<const FieldElement> point) {
  std::vector<FieldElement> table{FieldElement::one()};
  table.reserve(std::size_t{1} << point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const FieldElement r = point[i];
    const std::size_t n = table.size();
    table.resize(2 * n);
    // Variable i is bit i: entries with the bit set live in the upper half.
    for (std::size_t j = 0; j < n; ++j) {
      table[n + j] = table[j] * r;
      table[j] = table[j] - table[n + j];
    }
  }
  return table;
}

Bytes SumcheckProof::serialize() const {
  ByteWriter w;
  claimed_sum.write(w);
  w.count(rounds.size());
  for (const RoundPoly& p : rounds) {
    p.c0.write(w);
    p.c1.write(w);
    p.c2.write(w);
  }
  for (FieldElement r : final_point) r.write(w);
  return std::move(w).take();
}

SumcheckProof SumcheckProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  SumcheckProof p;
  p.claimed_sum = FieldElement::read(r);
  const std::size_t m = r.count(32);
  for (std::size_t i = 0; i < m; ++i) {
    RoundPoly rp;
    rp.c0 = FieldElement::read(r);
    rp.c1 = FieldElement::read(r);
    rp.c2 = FieldElement::read(r);
    p.rounds.push_back(rp);
  }
  for (std::size_t i = 0; i < m; ++i) p.final_point.push_back(FieldElement::read(r));
  r.expect_done();
  return p;
}

SumcheckProof sumcheck_prove(const MultilinearPoly& g, const MultilinearPoly& h, Transcript& transcript) {
  if (g.num_vars() != h.num_vars()) {
    throw Error(ErrorCode::kDimensionMismatch, "sum-check factors have different variable counts");
  }
  std::vector<FieldElement> ge = g.evaluations();
  std::vector<FieldElement> he = h.evaluations();

  SumcheckProof proof;
  for (std::size_t x = 0; x < ge.size(); ++x) proof.claimed_sum += ge[x] * he[x];
  transcript.absorb_field("sumcheck/claim", proof.claimed_sum);
  transcript.absorb_u64("sumcheck/num_vars", g.num_vars());

  for (std::size_t i = 0; i < g.num_vars(); ++i) {
    // With a(t) = a0 + t da and b(t) = b0 + t db, a b = a0 b0 + t (a0 db + b0 da) + t^2 da db.
    RoundPoly p;
    for (std::size_t j = 0; j < ge.size() / 2; ++j) {
      const FieldElement a0 = ge[2 * j], da = ge[2 * j + 1] - a0;
      const FieldElement b0 = he[2 * j], db = he[2 * j + 1] - b0;
      p.c0 += a0 * b0;
      p.c1 += a0 * db + b0 * da;
      p.c2 += da * db;
    }
    absorb_round(transcript, i, p);
    const FieldElement r = transcript.challenge_field();
    proof.rounds.push_back(p);
    proof.final_point.push_back(r);
    fold_in_place(ge, r);
    fold_in_place(he, r);
  }
  return proof;
}

bool sumcheck_verify(FieldElement claimed_sum, std::size_t num_vars, const SumcheckProof& proof,
                     const FinalEvaluator& final_eval, Transcript& transcript) {
  if (proof.claimed_sum != claimed_sum) return false;
  if (proof.rounds.size() != num_vars || proof.final_point.size() != num_vars) return false;
  transcript.absorb_field("sumcheck/claim", claimed_sum);
  transcript.absorb_u64("sumcheck/num_vars", num_vars);

  FieldElement expected = claimed_sum;
  for (std::size_t i = 0; i < num_vars; ++i) {
    const RoundPoly& p = proof.rounds[i];
    // s(0) + s(1) = 2 c0 + c1 + c2.
    if (p.c0 + p.c0 + p.c1 + p.c2 != expected) return false;
    absorb_round(transcript, i, p);
    const FieldElement r = transcript.challenge_field();
    if (r != proof.final_point[i]) return false;
    expected = p.eval(r);
  }
  const auto [gv, hv] = final_eval(proof.final_point);
  return expected == gv * hv;
}

FieldMatrix FieldMatrix::identity(std::size_t n) {
  FieldMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = FieldElement::one();
  return m;
}

FieldMatrix matmul(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.cols != b.rows) throw Error(ErrorCode::kDimensionMismatch, "inner dimensions differ");
  FieldMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const FieldElement aik = a.at(i, k);
      for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  return c;
}

bool verify_matmul(const FieldMatrix& a, const FieldMatrix& b, const FieldMatrix& c, Transcript& transcript) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols || a.rows == 0 || a.cols == 0 || b.cols == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix shapes do not compose");
  }
  const std::size_t n = std::bit_ceil(a.rows);
  const std::size_t k = std::bit_ceil(a.cols);
  const std::size_t m = std::bit_ceil(b.cols);

  ByteWriter w;
  w.u64(a.rows);
  w.u64(a.cols);
  w.u64(b.cols);
  for (FieldElement x : c.data) x.write(w);
  transcript.absorb("matmul/claim", w.data());

  std::vector<FieldElement> r1(log2_exact(n)), r2(log2_exact(m));
  for (FieldElement& r : r1) r = transcript.challenge_field();
  for (FieldElement& r : r2) r = transcript.challenge_field();
  const std::vector<FieldElement> eq1 = eq_table(r1);
  const std::vector<FieldElement> eq2 = eq_table(r2);

  FieldElement c_eval;
  for (std::size_t i = 0; i < c.rows; ++i) {
    for (std::size_t j = 0; j < c.cols; ++j) c_eval += eq1[i] * eq2[j] * c.at(i, j);
  }

  // g(y) = A~(r1, y), h(y) = B~(y, r2), both over log2(k) variables.
  std::vector<FieldElement> g(k), h(k);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t y = 0; y < a.cols; ++y) g[y] += eq1[i] * a.at(i, y);
  }
  for (std::size_t y = 0; y < b.rows; ++y) {
    for (std::size_t j = 0; j < b.cols; ++j) h[y] += b.at(y, j) * eq2[j];
  }
  const MultilinearPoly gp(log2_exact(k), std::move(g));
  const MultilinearPoly hp(log2_exact(k), std::move(h));

  Transcript prover_view = transcript;
  const SumcheckProof proof = sumcheck_prove(gp, hp, prover_view);
  return sumcheck_verify(
      c_eval, gp.num_vars(), proof,
      [&](std::span<const FieldElement> r) { return std::make_pair(mle_eval(gp, r), mle_eval(hp, r)); },
      transcript);
}

}  // namespace attest
