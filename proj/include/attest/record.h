// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Numeric training records and the committed datasets that hold them.

#ifndef ATTEST_RECORD_H_
#define ATTEST_RECORD_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attest/bytes.h"
#include "attest/canonical_json.h"
#include "attest/commitment.h"
#include "attest/field.h"
#include "attest/hash.h"
#include "attest/merkle.h"

namespace attest {

struct Record {
  std::vector<FixedPoint> features;
  FixedPoint label;
  Digest source_asset_hash;

  std::size_t dimension() const { return features.size(); }
  // {"features":[s...],"label":s,"source":"<hex>"} with s the scaled integers.
  Json to_json() const;
  Bytes canonical_bytes() const;
  static Record from_json(const Json& j);

  friend bool operator==(const Record&, const Record&) = default;
};

// Parses a raw asset payload {"features":[s...],"label":s}. Values must lie
// inside the fixed-point guard; throws SchemaMismatch otherwise.
Record parse_raw_row(ByteView payload, const Digest& asset_hash);
Bytes raw_row_bytes(std::span<const FixedPoint> features, FixedPoint label);

// Commitment to one record: SHA-256(0x00 || blinding || record bytes).
Digest record_leaf(const Blinding& blinding, ByteView record_bytes);

struct RecordOpening {
  Bytes record_bytes;
  Blinding blinding{};
  MerklePath path;

  Digest leaf() const { return record_leaf(blinding, record_bytes); }
  void write(ByteWriter& w) const;
  static RecordOpening read(ByteReader& r);
};

// True iff the opening commits to a leaf at `index` under `root`.
bool verify_record_opening(const Digest& root, std::size_t index, const RecordOpening& opening);

struct DatasetEntry {
  Record record;
  Bytes record_bytes;
  Blinding blinding{};
  Digest leaf;
};

// A dataset committed as a sorted-leaf Merkle tree over blinded record
// commitments. Entry order is the sorted leaf order, which is also the index
// space training schedules refer to.
class CommittedDataset {
 public:
  // Throws EmptyOutput for an empty record list and SchemaMismatch when
  // dimensions differ.
  static CommittedDataset commit(std::vector<Record> records, BlindingSource& blindings);
  // Rebuilds from entries that already carry their blindings.
  static CommittedDataset from_entries(std::vector<DatasetEntry> entries);

  const Digest& root() const { return tree_.root(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t dimension() const { return entries_.front().record.dimension(); }
  const std::vector<DatasetEntry>& entries() const { return entries_; }
  const SortedMerkleTree& tree() const { return tree_; }

  std::optional<std::size_t> index_of(const Digest& leaf) const { return tree_.index_of(leaf); }
  RecordOpening open(std::size_t index) const;
  LeafCountProof prove_count() const { return tree_.prove_count(); }

  // Same entries minus the one whose leaf is `leaf`; throws RecordNotFound.
  CommittedDataset without(const Digest& leaf) const;

  // JSON-lines: one canonical record per line, in entry order.
  std::string records_jsonl() const;
  // JSON-lines: {"blinding":"<hex>"} per line, aligned with records_jsonl().
  std::string secrets_jsonl() const;
  static CommittedDataset load(std::string_view records_jsonl, std::string_view secrets_jsonl);

 private:
  CommittedDataset(std::vector<DatasetEntry> entries, SortedMerkleTree tree)
      : entries_(std::move(entries)), tree_(std::move(tree)) {}

  std::vector<DatasetEntry> entries_;
  SortedMerkleTree tree_;
};

// A public benchmark: unblinded leaves (the canonical record bytes), kept in
// file order.
class PublicDataset {
 public:
  static PublicDataset from_records(std::vector<Record> records);
  static PublicDataset load(std::string_view records_jsonl);

  const Digest& root() const { return tree_.root(); }
  std::size_t size() const { return records_.size(); }
  const std::vector<Record>& records() const { return records_; }
  std::string records_jsonl() const;

 private:
  PublicDataset(std::vector<Record> records, MerkleTree tree)
      : records_(std::move(records)), tree_(std::move(tree)) {}

  std::vector<Record> records_;
  MerkleTree tree_;
};

std::vector<Record> parse_records_jsonl(std::string_view text);

// Deterministic byte stream SHA-256(seed || counter) used for shuffles.
class HashStream {
 public:
  explicit HashStream(const Digest& seed) : seed_(seed) {}
  std::uint64_t next_u64();
  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t uniform(std::uint64_t bound);

 private:
  Digest seed_;
  std::uint64_t counter_ = 0;
  Digest block_;
  int used_ = 4;
};

// Fisher-Yates permutation of 0..n-1 driven by `stream`.
std::vector<std::size_t> fisher_yates(std::size_t n, HashStream& stream);

}  // namespace attest

#endif  // ATTEST_RECORD_H_
