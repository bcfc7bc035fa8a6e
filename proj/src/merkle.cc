// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/merkle.h"

#include <algorithm>

#include "attest/error.h"

namespace attest {

Digest merkle_leaf_hash(ByteView payload) {
  return Sha256().update(Tag::kLeaf).update(payload).finish();
}

Digest merkle_node_hash(const Digest& left, const Digest& right) {
  return Sha256().update(Tag::kInternal).update(left).update(right).finish();
}

void MerklePath::write(ByteWriter& w) const {
  w.u64(leaf_index);
  w.count(siblings.size());
  for (const Step& s : siblings) {
    s.sibling.write(w);
    w.u8(s.sibling_on_left ? 1 : 0);
  }
}

MerklePath MerklePath::read(ByteReader& r) {
  MerklePath p;
  p.leaf_index = r.u64();
  std::size_t n = r.count(33);
  p.siblings.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Step s;
    s.sibling = Digest::read(r);
    std::uint8_t side = r.u8();
    if (side > 1) throw Error(ErrorCode::kDecodeError, "bad sibling side flag");
    s.sibling_on_left = side == 1;
    p.siblings.push_back(s);
  }
  return p;
}

MerkleTree::MerkleTree(std::vector<Digest> leaf_hashes) {
  levels_.push_back(std::move(leaf_hashes));
  while (levels_.back().size() > 1) {
    const std::vector<Digest>& below = levels_.back();
    std::vector<Digest> above;
    above.reserve((below.size() + 1) / 2);
    for (std::size_t i = 0; i < below.size(); i += 2) {
      const Digest& right = i + 1 < below.size() ? below[i + 1] : below[i];
      above.push_back(merkle_node_hash(below[i], right));
    }
    levels_.push_back(std::move(above));
  }
}

MerkleTree MerkleTree::build(std::span<const Bytes> payloads) {
  if (payloads.empty()) throw Error(ErrorCode::kEmptyLeafSet, "merkle tree needs at least one leaf");
  std::vector<Digest> hashes;
  hashes.reserve(payloads.size());
  for (const Bytes& p : payloads) hashes.push_back(merkle_leaf_hash(p));
  return MerkleTree(std::move(hashes));
}

MerkleTree MerkleTree::build(std::span<const Digest> payloads) {
  if (payloads.empty()) throw Error(ErrorCode::kEmptyLeafSet, "merkle tree needs at least one leaf");
  std::vector<Digest> hashes;
  hashes.reserve(payloads.size());
  for (const Digest& p : payloads) hashes.push_back(merkle_leaf_hash(p.view()));
  return MerkleTree(std::move(hashes));
}

MerklePath MerkleTree::prove(std::size_t index) const {
  if (index >= leaf_count()) {
    throw Error(ErrorCode::kIndexOutOfRange, "leaf index " + std::to_string(index) + " >= " +
                                                 std::to_string(leaf_count()));
  }
  MerklePath path;
  path.leaf_index = index;
  std::size_t idx = index;
  for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
    const std::vector<Digest>& nodes = levels_[level];
    std::size_t sib = idx ^ 1;
    if (sib >= nodes.size()) sib = idx;
    path.siblings.push_back({nodes[sib], (idx & 1) == 1});
    idx >>= 1;
  }
  return path;
}

namespace {

// Folds `path` over the leaf hash, checking that side flags agree with the
// bits of leaf_index. Returns nullopt on any inconsistency.
std::optional<Digest> fold_path(ByteView leaf_payload, const MerklePath& path) {
  if (path.siblings.size() > 63) return std::nullopt;
  if ((path.leaf_index >> path.siblings.size()) != 0) return std::nullopt;
  Digest h = merkle_leaf_hash(leaf_payload);
  for (std::size_t i = 0; i < path.siblings.size(); ++i) {
    const MerklePath::Step& s = path.siblings[i];
    bool bit = ((path.leaf_index >> i) & 1) == 1;
    if (bit != s.sibling_on_left) return std::nullopt;
    h = s.sibling_on_left ? merkle_node_hash(s.sibling, h) : merkle_node_hash(h, s.sibling);
  }
  return h;
}

}  // namespace

bool merkle_verify(const Digest& root, ByteView leaf_payload, const MerklePath& path) {
  std::optional<Digest> h = fold_path(leaf_payload, path);
  return h && *h == root;
}

bool merkle_verify_last_leaf(const Digest& root, ByteView leaf_payload, const MerklePath& path) {
  if (!merkle_verify(root, leaf_payload, path)) return false;
  Digest h = merkle_leaf_hash(leaf_payload);
  for (const MerklePath::Step& s : path.siblings) {
    if (s.sibling_on_left) {
      if (s.sibling == h) return false;
      h = merkle_node_hash(s.sibling, h);
    } else {
      if (s.sibling != h) return false;
      h = merkle_node_hash(h, s.sibling);
    }
  }
  return true;
}

void LeafCountProof::write(ByteWriter& w) const {
  w.bytes(last_leaf_payload);
  path.write(w);
}

LeafCountProof LeafCountProof::read(ByteReader& r) {
  LeafCountProof p;
  p.last_leaf_payload = r.bytes();
  p.path = MerklePath::read(r);
  return p;
}

LeafCountProof prove_leaf_count(const MerkleTree& tree, ByteView last_leaf_payload) {
  return {Bytes(last_leaf_payload.begin(), last_leaf_payload.end()), tree.prove(tree.leaf_count() - 1)};
}

bool verify_leaf_count(const Digest& root, std::uint64_t count, const LeafCountProof& proof) {
  return count >= 1 && proof.path.leaf_index == count - 1 &&
         merkle_verify_last_leaf(root, proof.last_leaf_payload, proof.path);
}

namespace {

void write_neighbor(ByteWriter& w, const std::optional<NeighborOpening>& n) {
  w.u8(n ? 1 : 0);
  if (n) {
    n->leaf.write(w);
    n->path.write(w);
  }
}

std::optional<NeighborOpening> read_neighbor(ByteReader& r) {
  std::uint8_t present = r.u8();
  if (present > 1) throw Error(ErrorCode::kDecodeError, "bad neighbour flag");
  if (present == 0) return std::nullopt;
  NeighborOpening n;
  n.leaf = Digest::read(r);
  n.path = MerklePath::read(r);
  return n;
}

}  // namespace

void NonMembershipProof::write(ByteWriter& w) const {
  target.write(w);
  write_neighbor(w, left);
  write_neighbor(w, right);
}

NonMembershipProof NonMembershipProof::read(ByteReader& r) {
  NonMembershipProof p;
  p.target = Digest::read(r);
  p.left = read_neighbor(r);
  p.right = read_neighbor(r);
  return p;
}

SortedMerkleTree SortedMerkleTree::build(std::vector<Digest> leaves) {
  if (leaves.empty()) throw Error(ErrorCode::kEmptyLeafSet, "sorted tree needs at least one leaf");
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
  MerkleTree tree = MerkleTree::build(std::span<const Digest>(leaves));
  return SortedMerkleTree(std::move(leaves), std::move(tree));
}

std::optional<std::size_t> SortedMerkleTree::index_of(const Digest& leaf) const {
  auto it = std::lower_bound(leaves_.begin(), leaves_.end(), leaf);
  if (it == leaves_.end() || *it != leaf) return std::nullopt;
  return static_cast<std::size_t>(it - leaves_.begin());
}

NonMembershipProof SortedMerkleTree::prove_non_membership(const Digest& target) const {
  auto it = std::lower_bound(leaves_.begin(), leaves_.end(), target);
  if (it != leaves_.end() && *it == target) {
    throw Error(ErrorCode::kTargetPresent, "target " + target.hex() + " is a leaf");
  }
  NonMembershipProof proof;
  proof.target = target;
  const auto right = static_cast<std::size_t>(it - leaves_.begin());
  if (right > 0) proof.left = NeighborOpening{leaves_[right - 1], prove(right - 1)};
  if (right < leaves_.size()) proof.right = NeighborOpening{leaves_[right], prove(right)};
  return proof;
}

bool non_membership_verify(const Digest& root, const NonMembershipProof& proof) {
  const Digest& t = proof.target;
  if (!proof.left && !proof.right) return false;
  if (proof.left) {
    if (!(proof.left->leaf < t)) return false;
    if (!merkle_verify(root, proof.left->leaf, proof.left->path)) return false;
  } else if (!(Digest::filled(0x00) < t)) {
    return false;
  }
  if (proof.right) {
    if (!(t < proof.right->leaf)) return false;
    if (!merkle_verify(root, proof.right->leaf, proof.right->path)) return false;
  } else if (!(t < Digest::filled(0xFF))) {
    return false;
  }
  if (proof.left && proof.right) {
    return proof.right->path.leaf_index == proof.left->path.leaf_index + 1;
  }
  if (proof.right) return proof.right->path.leaf_index == 0;
  return merkle_verify_last_leaf(root, proof.left->leaf.view(), proof.left->path);
}

}  // namespace attest
