// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Binary Merkle trees: leaf = SHA-256(0x00 || payload), internal =
// SHA-256(0x01 || left || right), and an odd-sized level duplicates its last
// node. SortedMerkleTree keeps strictly ordered 32-byte leaves so absence of a
// value can be shown by opening its two neighbours.

#ifndef ATTEST_MERKLE_H_
#define ATTEST_MERKLE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "attest/bytes.h"
#include "attest/hash.h"

namespace attest {

Digest merkle_leaf_hash(ByteView payload);
Digest merkle_node_hash(const Digest& left, const Digest& right);

struct MerklePath {
  struct Step {
    Digest sibling;
    bool sibling_on_left = false;
    friend bool operator==(const Step&, const Step&) = default;
  };

  std::uint64_t leaf_index = 0;
  std::vector<Step> siblings;

  void write(ByteWriter& w) const;
  static MerklePath read(ByteReader& r);
  friend bool operator==(const MerklePath&, const MerklePath&) = default;
};

class MerkleTree {
 public:
  // Throws EmptyLeafSet when `payloads` is empty.
  static MerkleTree build(std::span<const Bytes> payloads);
  // Leaves whose payload is a 32-byte digest (commitment trees).
  static MerkleTree build(std::span<const Digest> payloads);

  const Digest& root() const { return levels_.back().front(); }
  std::size_t leaf_count() const { return levels_.front().size(); }
  // Leaf node hashes in index order.
  const std::vector<Digest>& leaf_hashes() const { return levels_.front(); }

  // Throws IndexOutOfRange.
  MerklePath prove(std::size_t index) const;

 private:
  explicit MerkleTree(std::vector<Digest> leaf_hashes);

  std::vector<std::vector<Digest>> levels_;
};

bool merkle_verify(const Digest& root, ByteView leaf_payload, const MerklePath& path);
inline bool merkle_verify(const Digest& root, const Digest& leaf_payload, const MerklePath& path) {
  return merkle_verify(root, leaf_payload.view(), path);
}

// True iff `path` opens the last real leaf of a tree with pairwise distinct
// leaves, which pins the leaf count to path.leaf_index + 1. Every step with a
// right-hand sibling must be the duplicated tail of its level; every left-hand
// sibling must differ from the running node.
bool merkle_verify_last_leaf(const Digest& root, ByteView leaf_payload, const MerklePath& path);

// Evidence that the tree committed by `root` has exactly `count` leaves.
struct LeafCountProof {
  Bytes last_leaf_payload;
  MerklePath path;

  void write(ByteWriter& w) const;
  static LeafCountProof read(ByteReader& r);
};

LeafCountProof prove_leaf_count(const MerkleTree& tree, ByteView last_leaf_payload);
bool verify_leaf_count(const Digest& root, std::uint64_t count, const LeafCountProof& proof);

struct NeighborOpening {
  Digest leaf;
  MerklePath path;
};

struct NonMembershipProof {
  Digest target;
  // Absent neighbours stand for the virtual all-0x00 / all-0xFF sentinels.
  std::optional<NeighborOpening> left;
  std::optional<NeighborOpening> right;

  void write(ByteWriter& w) const;
  static NonMembershipProof read(ByteReader& r);
};

class SortedMerkleTree {
 public:
  // Sorts and de-duplicates; throws EmptyLeafSet when `leaves` is empty.
  static SortedMerkleTree build(std::vector<Digest> leaves);

  const Digest& root() const { return tree_.root(); }
  std::size_t size() const { return leaves_.size(); }
  const std::vector<Digest>& leaves() const { return leaves_; }
  const MerkleTree& tree() const { return tree_; }

  std::optional<std::size_t> index_of(const Digest& leaf) const;
  bool contains(const Digest& leaf) const { return index_of(leaf).has_value(); }

  MerklePath prove(std::size_t index) const { return tree_.prove(index); }
  // Throws TargetPresent when `target` is a leaf.
  NonMembershipProof prove_non_membership(const Digest& target) const;
  LeafCountProof prove_count() const { return prove_leaf_count(tree_, leaves_.back().view()); }

 private:
  SortedMerkleTree(std::vector<Digest> leaves, MerkleTree tree)
      : leaves_(std::move(leaves)), tree_(std::move(tree)) {}

  std::vector<Digest> leaves_;
  MerkleTree tree_;
};

bool non_membership_verify(const Digest& root, const NonMembershipProof& proof);

}  // namespace attest

#endif  // ATTEST_MERKLE_H_
