// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/train.h"

#include <algorithm>

#include "attest/error.h"
#include "attest/sumcheck.h"
#include "attest/transcript.h"

namespace attest {

BatchSchedule::BatchSchedule(std::size_t dataset_size, std::size_t batch_size, std::uint64_t seed)
    : dataset_size_(dataset_size), batch_size_(batch_size), seed_(seed) {
  if (batch_size_ == 0 || dataset_size_ < batch_size_) {
    throw Error(ErrorCode::kDimensionMismatch, "dataset of " + std::to_string(dataset_size_) +
                                                   " records cannot fill a batch of " +
                                                   std::to_string(batch_size_));
  }
  steps_per_epoch_ = dataset_size_ / batch_size_;
}

const std::vector<std::size_t>& BatchSchedule::epoch(std::uint64_t e) const {
  auto it = epochs_.find(e);
  if (it != epochs_.end()) return it->second;
  HashStream stream(Sha256().update("attest/epoch").update_u64(seed_).update_u64(e).finish());
  return epochs_.emplace(e, fisher_yates(dataset_size_, stream)).first->second;
}

std::vector<std::uint64_t> BatchSchedule::batch(std::uint64_t iteration) const {
  if (iteration == 0) throw Error(ErrorCode::kIndexOutOfRange, "iterations are numbered from 1");
  const std::uint64_t e = (iteration - 1) / steps_per_epoch_;
  const std::uint64_t k = (iteration - 1) % steps_per_epoch_;
  const std::vector<std::size_t>& perm = epoch(e);
  std::vector<std::uint64_t> out(perm.begin() + static_cast<std::ptrdiff_t>(k * batch_size_),
                                 perm.begin() + static_cast<std::ptrdiff_t>((k + 1) * batch_size_));
  return out;
}

ModelWeights apply_update(const ModelSpec& spec, const ModelWeights& weights, std::span<const FixedPoint> residuals,
                          std::span<const __int128> gradient_acc) {
  if (gradient_acc.size() != weights.dimension() || residuals.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "gradient does not match weights");
  }
  const FixedPoint inv_batch = fp_encode(1.0 / static_cast<double>(residuals.size()));
  ModelWeights next = weights;
  for (std::size_t j = 0; j < weights.dimension(); ++j) {
    const FixedPoint grad = fp_mul_rescale(fp_rescale(gradient_acc[j]), inv_batch);
    next.w[j] = fp_sub(weights.w[j], fp_mul_rescale(spec.learning_rate, grad));
  }
  FixedPoint residual_sum;
  for (FixedPoint r : residuals) residual_sum = fp_add(residual_sum, r);
  const FixedPoint grad_bias = fp_mul_rescale(residual_sum, inv_batch);
  next.bias = fp_sub(weights.bias, fp_mul_rescale(spec.learning_rate, grad_bias));
  return next;
}

StepResult sgd_step(const ModelSpec& spec, const ModelWeights& weights, std::span<const Record* const> batch) {
  if (batch.size() != spec.batch_size) {
    throw Error(ErrorCode::kDimensionMismatch, "batch has " + std::to_string(batch.size()) + " records, spec says " +
                                                   std::to_string(spec.batch_size));
  }
  StepResult out;
  out.residuals.reserve(batch.size());
  for (const Record* r : batch) {
    const ForwardResult f = forward(spec.kind, weights, r->features);
    out.residuals.push_back(fp_sub(f.activated, r->label));
  }
  const std::size_t d = weights.dimension();
  out.gradient_acc.assign(d, 0);
  std::vector<FixedPoint> column(batch.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t b = 0; b < batch.size(); ++b) column[b] = batch[b]->features[j];
    out.gradient_acc[j] = fp_dot_accumulate(column, out.residuals);
  }
  out.weights = apply_update(spec, weights, out.residuals, out.gradient_acc);
  return out;
}

Bytes TrainingState::canonical_bytes() const {
  ByteWriter w;
  w.u64(iteration);
  weights.write(w);
  w.count(batch.size());
  for (std::uint64_t i : batch) w.u64(i);
  return std::move(w).take();
}

TrainingState TrainingState::parse(ByteView bytes) {
  ByteReader r(bytes);
  TrainingState s;
  s.iteration = r.u64();
  s.weights = ModelWeights::read(r);
  const std::size_t n = r.count(8);
  for (std::size_t i = 0; i < n; ++i) s.batch.push_back(r.u64());
  r.expect_done();
  return s;
}

Digest state_leaf(const Blinding& blinding, const TrainingState& state) {
  return record_leaf(blinding, state.canonical_bytes());
}

TrainingTrace::TrainingTrace(const Digest& spec_hash, TrainingState initial, const Blinding& blinding) {
  chain_.push_back(spec_hash);
  append(std::move(initial), blinding);
}

void TrainingTrace::append(TrainingState state, const Blinding& blinding) {
  const Digest leaf = state_leaf(blinding, state);
  chain_.push_back(Sha256().update(chain_.back()).update(leaf).finish());
  states_.push_back(std::move(state));
  blindings_.push_back(blinding);
  leaves_.push_back(leaf);
}

Digest TrainingTrace::root() const { return MerkleTree::build(std::span<const Digest>(leaves_)).root(); }

Digest recompute_chain(const Digest& spec_hash, std::span<const Digest> leaves) {
  Digest h = spec_hash;
  for (const Digest& l : leaves) h = Sha256().update(h).update(l).finish();
  return h;
}

Trainer::Trainer(const CommittedDataset& dataset, const ModelSpec& spec)
    : dataset_(dataset), spec_(spec), schedule_(dataset.size(), spec.batch_size, spec.seed) {
  if (dataset.dimension() != spec.dimension) {
    throw Error(ErrorCode::kDimensionMismatch, "dataset has " + std::to_string(dataset.dimension()) +
                                                   " features, spec declares " + std::to_string(spec.dimension));
  }
}

StepResult Trainer::step(const ModelWeights& weights, std::uint64_t iteration) const {
  std::vector<const Record*> batch;
  for (std::uint64_t idx : schedule_.batch(iteration)) batch.push_back(&dataset_.entries()[idx].record);
  return sgd_step(spec_, weights, batch);
}

TrainResult train(const CommittedDataset& dataset, const ModelSpec& spec, const WeightsOpening& init,
                  BlindingSource& blindings) {
  if (init.weights.dimension() != spec.dimension) {
    throw Error(ErrorCode::kDimensionMismatch, "initial weights do not match the spec dimension");
  }
  Trainer trainer(dataset, spec);
  TrainingTrace trace(spec.hash(), TrainingState{0, init.weights, {}}, blindings.next());
  ModelWeights w = init.weights;
  for (std::uint64_t t = 1; t <= spec.iterations; ++t) {
    w = trainer.step(w, t).weights;
    trace.append(TrainingState{t, w, trainer.schedule().batch(t)}, blindings.next());
  }
  WeightsOpening final = WeightsOpening::fresh(std::move(w), blindings);
  return TrainResult{init, std::move(final), std::move(trace)};
}

TrainResult fine_tune(const CommittedDataset& dataset, const ModelSpec& spec, const Digest& prior_root,
                      const WeightsOpening& prior, BlindingSource& blindings) {
  if (!verify_weights_opening(prior_root, prior)) {
    throw Error(ErrorCode::kInvalidPriorOpening, "prior weights do not open against " + prior_root.hex());
  }
  return train(dataset, spec, prior, blindings);
}

void StateOpening::write(ByteWriter& w) const {
  w.bytes(state_bytes);
  write_blinding(w, blinding);
}

StateOpening StateOpening::read(ByteReader& r) {
  StateOpening o;
  o.state_bytes = r.bytes();
  o.blinding = read_blinding(r);
  return o;
}

namespace {

StateOpening open_state(const TrainingTrace& trace, std::size_t i) {
  return StateOpening{trace.states()[i].canonical_bytes(), trace.blindings()[i]};
}

std::vector<std::uint64_t> derive_iterations(const TrainingProof& p, std::uint64_t iterations, std::size_t c) {
  Transcript t("attest/training/v1");
  t.absorb("dataset_root", p.dataset_root);
  t.absorb("spec_hash", p.spec_hash);
  t.absorb("init_commitment", p.init_commitment);
  t.absorb("trace_root", p.trace_root);
  t.absorb("chain_head", p.chain_head);
  t.absorb("weights_root", p.weights_root);
  t.absorb_u64("dataset_size", p.dataset_size);
  t.absorb_u64("iterations", iterations);
  t.absorb_u64("challenges", c);
  std::vector<std::uint64_t> out;
  for (std::size_t i : t.challenge_indices(c, iterations)) out.push_back(i + 1);
  return out;
}

Transcript matmul_transcript(const TrainingProof& p, std::uint64_t iteration) {
  Transcript t("attest/training/matmul/v1");
  t.absorb("trace_root", p.trace_root);
  t.absorb_u64("iteration", iteration);
  return t;
}

bool uses_matmul_check(const ModelSpec& spec) { return spec.batch_size * spec.dimension >= kMatmulCheckThreshold; }

std::optional<TrainingState> open_checked(const StateOpening& o, const Digest& leaf) {
  if (record_leaf(o.blinding, o.state_bytes) != leaf) return std::nullopt;
  return TrainingState::parse(o.state_bytes);
}

bool verify_iteration(const TrainingProof& proof, const ModelSpec& spec, const BatchSchedule& schedule,
                      const IterationProof& it) {
  const std::uint64_t i = it.iteration;
  const auto before = open_checked(it.before, proof.trace_leaves[i - 1]);
  const auto after = open_checked(it.after, proof.trace_leaves[i]);
  if (!before || !after) return false;
  if (before->iteration != i - 1 || after->iteration != i) return false;
  if (before->weights.dimension() != spec.dimension) return false;
  if (after->batch != schedule.batch(i)) return false;
  if (it.batch.size() != after->batch.size()) return false;

  std::vector<Record> records;
  records.reserve(it.batch.size());
  for (std::size_t b = 0; b < it.batch.size(); ++b) {
    if (!verify_record_opening(proof.dataset_root, after->batch[b], it.batch[b])) return false;
    Record r = Record::from_json(parse_json(it.batch[b].record_bytes));
    if (r.canonical_bytes() != it.batch[b].record_bytes || r.dimension() != spec.dimension) return false;
    records.push_back(std::move(r));
  }
  std::vector<const Record*> batch;
  for (const Record& r : records) batch.push_back(&r);

  ModelWeights expected;
  if (uses_matmul_check(spec)) {
    if (it.gradient_acc.size() != spec.dimension) return false;
    std::vector<FixedPoint> residuals;
    for (const Record* r : batch) {
      residuals.push_back(fp_sub(forward(spec.kind, before->weights, r->features).activated, r->label));
    }
    FieldMatrix xt(spec.dimension, batch.size()), res(batch.size(), 1), acc(spec.dimension, 1);
    for (std::size_t j = 0; j < spec.dimension; ++j) {
      for (std::size_t b = 0; b < batch.size(); ++b) xt.at(j, b) = batch[b]->features[j].raw();
      acc.at(j, 0) = it.gradient_acc[j];
    }
    for (std::size_t b = 0; b < batch.size(); ++b) res.at(b, 0) = residuals[b].raw();
    Transcript t = matmul_transcript(proof, i);
    if (!verify_matmul(xt, res, acc, t)) return false;
    std::vector<__int128> lifted;
    for (FieldElement g : it.gradient_acc) lifted.push_back(g.centered());
    expected = apply_update(spec, before->weights, residuals, lifted);
  } else {
    if (!it.gradient_acc.empty()) return false;
    expected = sgd_step(spec, before->weights, batch).weights;
  }
  return expected == after->weights;
}

void write_optional_state(ByteWriter& w, const std::optional<StateOpening>& s) {
  w.u8(s ? 1 : 0);
  if (s) s->write(w);
}

std::uint8_t read_flag(ByteReader& r) {
  const std::uint8_t f = r.u8();
  if (f > 1) throw Error(ErrorCode::kDecodeError, "bad presence flag");
  return f;
}

}  // namespace

TrainingProof prove_training(const TrainResult& result, const CommittedDataset& dataset, const ModelSpec& spec,
                             std::size_t challenges, ProofMode mode) {
  const TrainingTrace& trace = result.trace;
  TrainingProof p;
  p.mode = mode;
  p.dataset_root = dataset.root();
  p.spec_hash = spec.hash();
  p.init_commitment = result.init.root();
  p.trace_root = trace.root();
  p.chain_head = trace.chain_head();
  p.weights_root = result.final.root();
  p.dataset_size = dataset.size();
  p.dataset_count_proof = dataset.prove_count();
  p.trace_leaves = trace.leaves();
  p.init_opening = result.init;
  p.initial_state = open_state(trace, 0);

  const std::uint64_t iterations = trace.size() - 1;
  const std::size_t c = static_cast<std::size_t>(std::min<std::uint64_t>(challenges, iterations));
  const Trainer trainer(dataset, spec);
  for (std::uint64_t i : derive_iterations(p, iterations, c)) {
    IterationProof it;
    it.iteration = i;
    it.before = open_state(trace, i - 1);
    it.after = open_state(trace, i);
    for (std::uint64_t idx : trace.states()[i].batch) it.batch.push_back(dataset.open(idx));
    if (uses_matmul_check(spec)) {
      const StepResult step = trainer.step(trace.states()[i - 1].weights, i);
      for (__int128 g : step.gradient_acc) it.gradient_acc.push_back(reduce_i128(g));
    }
    p.iterations.push_back(std::move(it));
  }
  if (mode == ProofMode::kAudit) {
    p.final_opening = result.final;
    p.final_state = open_state(trace, iterations);
  }
  return p;
}

bool verify_training(const TrainingProof& proof, const ModelSpec& spec, const TrainingPublicInputs& inputs) {
  try {
    if (proof.dataset_root != inputs.dataset_root || proof.weights_root != inputs.weights_root) return false;
    if (inputs.init_commitment && *inputs.init_commitment != proof.init_commitment) return false;
    if (proof.spec_hash != spec.hash()) return false;

    const std::uint64_t iterations = spec.iterations;
    if (proof.trace_leaves.size() != iterations + 1) return false;
    if (MerkleTree::build(std::span<const Digest>(proof.trace_leaves)).root() != proof.trace_root) return false;
    if (recompute_chain(proof.spec_hash, proof.trace_leaves) != proof.chain_head) return false;
    if (!verify_leaf_count(proof.dataset_root, proof.dataset_size, proof.dataset_count_proof)) return false;

    if (proof.init_opening.weights.dimension() != spec.dimension) return false;
    if (!verify_weights_opening(proof.init_commitment, proof.init_opening)) return false;
    const auto s0 = open_checked(proof.initial_state, proof.trace_leaves[0]);
    if (!s0 || s0->iteration != 0 || !s0->batch.empty() || s0->weights != proof.init_opening.weights) return false;

    const std::size_t c = proof.iterations.size();
    if (c > iterations || c < std::min<std::uint64_t>(inputs.min_challenges, iterations)) return false;
    const std::vector<std::uint64_t> expected = derive_iterations(proof, iterations, c);
    if (c > 0) {
      const BatchSchedule schedule(proof.dataset_size, spec.batch_size, spec.seed);
      for (std::size_t k = 0; k < c; ++k) {
        if (proof.iterations[k].iteration != expected[k]) return false;
        if (!verify_iteration(proof, spec, schedule, proof.iterations[k])) return false;
      }
    }

    if (proof.mode == ProofMode::kAudit) {
      if (!proof.final_opening || !proof.final_state) return false;
      const auto last = open_checked(*proof.final_state, proof.trace_leaves[iterations]);
      if (!last || last->iteration != iterations || last->weights != proof.final_opening->weights) return false;
      if (!verify_weights_opening(proof.weights_root, *proof.final_opening)) return false;
    } else if (proof.final_opening || proof.final_state) {
      return false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

Bytes TrainingProof::serialize() const {
  ByteWriter w;
  w.u8(mode == ProofMode::kAudit ? 1 : 0);
  dataset_root.write(w);
  spec_hash.write(w);
  init_commitment.write(w);
  trace_root.write(w);
  chain_head.write(w);
  weights_root.write(w);
  w.u64(dataset_size);
  dataset_count_proof.write(w);
  w.count(trace_leaves.size());
  for (const Digest& d : trace_leaves) d.write(w);
  init_opening.write(w);
  initial_state.write(w);
  w.count(iterations.size());
  for (const IterationProof& it : iterations) {
    w.u64(it.iteration);
    it.before.write(w);
    it.after.write(w);
    w.count(it.batch.size());
    for (const RecordOpening& o : it.batch) o.write(w);
    w.count(it.gradient_acc.size());
    for (FieldElement g : it.gradient_acc) g.write(w);
  }
  w.u8(final_opening ? 1 : 0);
  if (final_opening) final_opening->write(w);
  write_optional_state(w, final_state);
  return std::move(w).take();
}

TrainingProof TrainingProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  TrainingProof p;
  p.mode = read_flag(r) == 1 ? ProofMode::kAudit : ProofMode::kPublic;
  p.dataset_root = Digest::read(r);
  p.spec_hash = Digest::read(r);
  p.init_commitment = Digest::read(r);
  p.trace_root = Digest::read(r);
  p.chain_head = Digest::read(r);
  p.weights_root = Digest::read(r);
  p.dataset_size = r.u64();
  p.dataset_count_proof = LeafCountProof::read(r);
  const std::size_t leaves = r.count(32);
  for (std::size_t i = 0; i < leaves; ++i) p.trace_leaves.push_back(Digest::read(r));
  p.init_opening = WeightsOpening::read(r);
  p.initial_state = StateOpening::read(r);
  const std::size_t n = r.count();
  for (std::size_t k = 0; k < n; ++k) {
    IterationProof it;
    it.iteration = r.u64();
    it.before = StateOpening::read(r);
    it.after = StateOpening::read(r);
    const std::size_t b = r.count();
    for (std::size_t i = 0; i < b; ++i) it.batch.push_back(RecordOpening::read(r));
    const std::size_t g = r.count(8);
    for (std::size_t i = 0; i < g; ++i) it.gradient_acc.push_back(FieldElement::read(r));
    p.iterations.push_back(std::move(it));
  }
  if (read_flag(r)) p.final_opening = WeightsOpening::read(r);
  if (read_flag(r)) p.final_state = StateOpening::read(r);
  r.expect_done();
  return p;
}

}  // namespace attest
