// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include <algorithm>

#include "attest/error.h"
#include "attest/train.h"

namespace attest {

UnlearnResult unlearn(const CommittedDataset& dataset, const Digest& leaf, const ModelSpec& spec,
                      const WeightsOpening& init, BlindingSource& blindings, std::size_t challenges,
                      ProofMode mode) {
  const auto index = dataset.index_of(leaf);
  if (!index) throw Error(ErrorCode::kRecordNotFound, "no record with leaf " + leaf.hex());
  CommittedDataset reduced = dataset.without(leaf);
  TrainResult retrained = train(reduced, spec, init, blindings);

  UnlearningProof proof{
      .old_root = dataset.root(),
      .deleted_leaf = leaf,
      .new_root = reduced.root(),
      .old_membership = dataset.tree().prove(*index),
      .non_membership = reduced.tree().prove_non_membership(leaf),
      .retraining = prove_training(retrained, reduced, spec, challenges, mode),
      .old_leaves = std::nullopt,
  };
  if (mode == ProofMode::kAudit) proof.old_leaves = dataset.tree().leaves();
  return UnlearnResult{std::move(reduced), std::move(retrained), std::move(proof)};
}

bool verify_unlearning(const UnlearningProof& proof, const Digest& old_root, const Digest& new_root,
                       const ModelSpec& spec, std::size_t min_challenges,
                       const std::optional<Digest>& init_commitment) {
  try {
    if (proof.old_root != old_root || proof.new_root != new_root) return false;
    if (!merkle_verify(old_root, proof.deleted_leaf, proof.old_membership)) return false;
    if (proof.non_membership.target != proof.deleted_leaf) return false;
    if (!non_membership_verify(new_root, proof.non_membership)) return false;
    if (proof.retraining.dataset_root != new_root) return false;
    TrainingPublicInputs inputs{new_root, proof.retraining.weights_root, init_commitment, min_challenges};
    if (!verify_training(proof.retraining, spec, inputs)) return false;

    if (proof.retraining.mode == ProofMode::kAudit) {
      if (!proof.old_leaves) return false;
      const std::vector<Digest>& old = *proof.old_leaves;
      if (old.empty() || !std::is_sorted(old.begin(), old.end())) return false;
      if (std::adjacent_find(old.begin(), old.end()) != old.end()) return false;
      if (MerkleTree::build(std::span<const Digest>(old)).root() != old_root) return false;
      std::vector<Digest> remaining;
      for (const Digest& d : old) {
        if (d != proof.deleted_leaf) remaining.push_back(d);
      }
      if (remaining.size() + 1 != old.size() || remaining.empty()) return false;
      if (SortedMerkleTree::build(std::move(remaining)).root() != new_root) return false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

Bytes UnlearningProof::serialize() const {
  ByteWriter w;
  old_root.write(w);
  deleted_leaf.write(w);
  new_root.write(w);
  old_membership.write(w);
  non_membership.write(w);
  w.bytes(retraining.serialize());
  w.u8(old_leaves ? 1 : 0);
  if (old_leaves) {
    w.count(old_leaves->size());
    for (const Digest& d : *old_leaves) d.write(w);
  }
  return std::move(w).take();
}

UnlearningProof UnlearningProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  UnlearningProof p;
  p.old_root = Digest::read(r);
  p.deleted_leaf = Digest::read(r);
  p.new_root = Digest::read(r);
  p.old_membership = MerklePath::read(r);
  p.non_membership = NonMembershipProof::read(r);
  p.retraining = TrainingProof::deserialize(r.bytes());
  const std::uint8_t flag = r.u8();
  if (flag > 1) throw Error(ErrorCode::kDecodeError, "bad presence flag");
  if (flag) {
    std::vector<Digest> leaves;
    const std::size_t n = r.count(32);
    for (std::size_t i = 0; i < n; ++i) leaves.push_back(Digest::read(r));
    p.old_leaves = std::move(leaves);
  }
  r.expect_done();
  return p;
}

}  // namespace attest
