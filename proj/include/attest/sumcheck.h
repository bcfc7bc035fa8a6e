// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Sum-check for the product of two multilinear polynomials, and a
// matrix-product check built on it.

#ifndef ATTEST_SUMCHECK_H_
#define ATTEST_SUMCHECK_H_

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "attest/bytes.h"
#include "attest/field.h"
#include "attest/transcript.h"

namespace attest {

// Values on the boolean hypercube {0,1}^m; bit i of the table index is the
// value of variable i.
class MultilinearPoly {
 public:
  // Throws DimensionMismatch unless evaluations.size() == 2^num_vars.
  MultilinearPoly(std::size_t num_vars, std::vector<FieldElement> evaluations);

  std::size_t num_vars() const { return num_vars_; }
  const std::vector<FieldElement>& evaluations() const { return evals_; }

 private:
  std::size_t num_vars_;
  std::vector<FieldElement> evals_;
};

// Throws DimensionMismatch when point.size() != num_vars.
FieldElement mle_eval(const MultilinearPoly& poly, std::span<const FieldElement> point);

// eq(point, x) for every x in {0,1}^m, indexed like MultilinearPoly.
std::vector<FieldElement> eq_table(std::span<const FieldElement> point);

// s(t) = c0 + c1 t + c2 t^2.
struct RoundPoly {
  FieldElement c0, c1, c2;
  FieldElement eval(FieldElement t) const { return c0 + t * (c1 + t * c2); }
  friend bool operator==(const RoundPoly&, const RoundPoly&) = default;
};

struct SumcheckProof {
  FieldElement claimed_sum;
  std::vector<RoundPoly> rounds;
  std::vector<FieldElement> final_point;

  // claimed_sum, then m x 3 coefficients, then m final-point elements, with
  // the round count as a 4-byte prefix.
  Bytes serialize() const;
  static SumcheckProof deserialize(ByteView bytes);
};

// Proves sum over x in {0,1}^m of g(x) * h(x). Round i absorbs its
// coefficients under "sumcheck/round/i" before drawing its challenge.
SumcheckProof sumcheck_prove(const MultilinearPoly& g, const MultilinearPoly& h, Transcript& transcript);

// Returns (g(r), h(r)) at the final point.
using FinalEvaluator = std::function<std::pair<FieldElement, FieldElement>(std::span<const FieldElement>)>;

bool sumcheck_verify(FieldElement claimed_sum, std::size_t num_vars, const SumcheckProof& proof,
                     const FinalEvaluator& final_eval, Transcript& transcript);

struct FieldMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<FieldElement> data;  // row-major

  FieldMatrix() = default;
  FieldMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  FieldElement& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  FieldElement at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  static FieldMatrix identity(std::size_t n);
};

FieldMatrix matmul(const FieldMatrix& a, const FieldMatrix& b);

// Checks C = A * B for A (n x k), B (k x m), C (n x m) by drawing r1, r2 from
// the transcript and running sum-check on A~(r1, y) * B~(y, r2) against
// C~(r1, r2). Dimensions are zero-padded to powers of two. Throws
// DimensionMismatch on inconsistent shapes.
bool verify_matmul(const FieldMatrix& a, const FieldMatrix& b, const FieldMatrix& c, Transcript& transcript);

}  // namespace attest

#endif  // ATTEST_SUMCHECK_H_
