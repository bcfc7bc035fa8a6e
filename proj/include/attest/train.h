// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Deterministic fixed-point SGD with a committed per-iteration trace, and a
// challenge-response proof that sampled iterations were executed honestly.

#ifndef ATTEST_TRAIN_H_
#define ATTEST_TRAIN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "attest/bytes.h"
#include "attest/model.h"
#include "attest/record.h"

namespace attest {

// Minibatch order: epoch e is a Fisher-Yates permutation of the dataset
// indices driven by SHA-256(seed || e); batches are consecutive slices of B
// indices and a trailing partial batch is skipped.
class BatchSchedule {
 public:
  // Throws DimensionMismatch when the dataset is smaller than one batch.
  BatchSchedule(std::size_t dataset_size, std::size_t batch_size, std::uint64_t seed);

  std::size_t steps_per_epoch() const { return steps_per_epoch_; }
  // Indices used by iteration t (t >= 1).
  std::vector<std::uint64_t> batch(std::uint64_t iteration) const;

 private:
  const std::vector<std::size_t>& epoch(std::uint64_t e) const;

  std::size_t dataset_size_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::size_t steps_per_epoch_;
  mutable std::map<std::uint64_t, std::vector<std::size_t>> epochs_;
};

// Intermediate values of one step; gradient_acc are the exact sums
// sum_b x_bj * r_b before rescaling, which the verifier may check with
// verify_matmul.
struct StepResult {
  ModelWeights weights;
  std::vector<FixedPoint> residuals;
  std::vector<__int128> gradient_acc;
};

// One SGD update on `batch`:
//   r_b = activation(w . x_b + b) - y_b
//   w_j <- w_j - eta * rescale(sum_b x_bj r_b) * (1/B)
//   b   <- b   - eta * (sum_b r_b) * (1/B)
// Throws DimensionMismatch or Overflow.
StepResult sgd_step(const ModelSpec& spec, const ModelWeights& weights, std::span<const Record* const> batch);

// Finishes a step from residuals and (possibly externally supplied)
// gradient accumulators.
ModelWeights apply_update(const ModelSpec& spec, const ModelWeights& weights, std::span<const FixedPoint> residuals,
                          std::span<const __int128> gradient_acc);

struct TrainingState {
  std::uint64_t iteration = 0;
  ModelWeights weights;
  std::vector<std::uint64_t> batch;

  Bytes canonical_bytes() const;
  static TrainingState parse(ByteView bytes);
  friend bool operator==(const TrainingState&, const TrainingState&) = default;
};

// Leaf SHA-256(0x00 || blinding || canonical state).
Digest state_leaf(const Blinding& blinding, const TrainingState& state);

// States s_0..s_T, their blinded leaves, and the hash chain
// h_i = SHA-256(h_{i-1} || leaf_i) seeded with h_{-1} = spec hash.
class TrainingTrace {
 public:
  TrainingTrace(const Digest& spec_hash, TrainingState initial, const Blinding& blinding);

  void append(TrainingState state, const Blinding& blinding);

  std::size_t size() const { return states_.size(); }
  const std::vector<TrainingState>& states() const { return states_; }
  const std::vector<Blinding>& blindings() const { return blindings_; }
  const std::vector<Digest>& leaves() const { return leaves_; }
  const Digest& chain_head() const { return chain_.back(); }
  Digest root() const;

 private:
  std::vector<TrainingState> states_;
  std::vector<Blinding> blindings_;
  std::vector<Digest> leaves_;
  std::vector<Digest> chain_;
};

Digest recompute_chain(const Digest& spec_hash, std::span<const Digest> leaves);

struct TrainResult {
  WeightsOpening init;   // s_0 and its commitment
  WeightsOpening final;  // s_T with fresh blindings
  TrainingTrace trace;
};

// Replays the schedule over a committed dataset.
class Trainer {
 public:
  // Throws DimensionMismatch if the dataset or spec disagree on dimension.
  Trainer(const CommittedDataset& dataset, const ModelSpec& spec);

  const BatchSchedule& schedule() const { return schedule_; }
  StepResult step(const ModelWeights& weights, std::uint64_t iteration) const;

 private:
  const CommittedDataset& dataset_;
  ModelSpec spec_;
  BatchSchedule schedule_;
};

TrainResult train(const CommittedDataset& dataset, const ModelSpec& spec, const WeightsOpening& init,
                  BlindingSource& blindings);

// Trains from weights that must open against `prior_root`. Throws
// InvalidPriorOpening otherwise.
TrainResult fine_tune(const CommittedDataset& dataset, const ModelSpec& spec, const Digest& prior_root,
                      const WeightsOpening& prior, BlindingSource& blindings);

enum class ProofMode { kPublic, kAudit };

struct StateOpening {
  Bytes state_bytes;
  Blinding blinding{};

  void write(ByteWriter& w) const;
  static StateOpening read(ByteReader& r);
};

struct IterationProof {
  std::uint64_t iteration = 0;
  StateOpening before;
  StateOpening after;
  std::vector<RecordOpening> batch;
  // Present iff B * d >= kMatmulCheckThreshold.
  std::vector<FieldElement> gradient_acc;
};

// Batch gradient products at least this large (B * d) are checked with
// verify_matmul instead of plain recomputation.
inline constexpr std::size_t kMatmulCheckThreshold = 64;

struct TrainingProof {
  ProofMode mode = ProofMode::kPublic;
  Digest dataset_root;
  Digest spec_hash;
  Digest init_commitment;
  Digest trace_root;
  Digest chain_head;
  Digest weights_root;
  std::uint64_t dataset_size = 0;
  LeafCountProof dataset_count_proof;
  std::vector<Digest> trace_leaves;
  WeightsOpening init_opening;
  StateOpening initial_state;
  std::vector<IterationProof> iterations;
  // Audit mode only: the final weights and s_T opened in full.
  std::optional<WeightsOpening> final_opening;
  std::optional<StateOpening> final_state;

  Bytes serialize() const;
  static TrainingProof deserialize(ByteView bytes);
};

// Challenges min(c, T) iterations. Audit mode additionally opens s_T and
// the final weights.
TrainingProof prove_training(const TrainResult& result, const CommittedDataset& dataset, const ModelSpec& spec,
                             std::size_t challenges, ProofMode mode = ProofMode::kPublic);

struct TrainingPublicInputs {
  Digest dataset_root;
  Digest weights_root;
  // Required for fine-tuning: s_0 must open against this root.
  std::optional<Digest> init_commitment;
  std::size_t min_challenges = 1;
};

bool verify_training(const TrainingProof& proof, const ModelSpec& spec, const TrainingPublicInputs& inputs);

// Removes one record and retrains from the declared initialisation.
struct UnlearningProof {
  Digest old_root;
  Digest deleted_leaf;
  Digest new_root;
  MerklePath old_membership;
  NonMembershipProof non_membership;
  TrainingProof retraining;
  // Audit mode: every leaf of the old tree, so the verifier can rebuild both
  // roots and confirm exactly one leaf was removed.
  std::optional<std::vector<Digest>> old_leaves;

  Bytes serialize() const;
  static UnlearningProof deserialize(ByteView bytes);
};

struct UnlearnResult {
  CommittedDataset dataset;
  TrainResult retrained;
  UnlearningProof proof;
};

// Throws RecordNotFound when `leaf` is not in the dataset.
UnlearnResult unlearn(const CommittedDataset& dataset, const Digest& leaf, const ModelSpec& spec,
                      const WeightsOpening& init, BlindingSource& blindings, std::size_t challenges,
                      ProofMode mode = ProofMode::kPublic);

// When `init_commitment` is given, the retraining must start from it.
bool verify_unlearning(const UnlearningProof& proof, const Digest& old_root, const Digest& new_root,
                       const ModelSpec& spec, std::size_t min_challenges = 1,
                       const std::optional<Digest>& init_commitment = std::nullopt);

}  // namespace attest

#endif  // ATTEST_TRAIN_H_
