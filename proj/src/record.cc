// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/record.h"

#include <algorithm>
#include <sstream>

#include "attest/error.h"

namespace attest {
namespace {

FixedPoint guarded_value(const Json& v) {
  if (!v.is_number_integer()) throw Error(ErrorCode::kSchemaMismatch, "values must be integers");
  const auto s = v.get<std::int64_t>();
  if (s >= kFixedGuard || s <= -kFixedGuard) {
    throw Error(ErrorCode::kSchemaMismatch, "value outside fixed-point guard range");
  }
  return FixedPoint::from_scaled(s);
}

std::vector<FixedPoint> parse_features(const Json& j) {
  const Json& arr = json_field(j, "features");
  if (!arr.is_array()) throw Error(ErrorCode::kSchemaMismatch, "features must be an array");
  std::vector<FixedPoint> out;
  out.reserve(arr.size());
  for (const Json& v : arr) out.push_back(guarded_value(v));
  return out;
}

Json features_json(std::span<const FixedPoint> f) {
  Json arr = Json::array();
  for (FixedPoint v : f) arr.push_back(v.scaled());
  return arr;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

void check_dimensions(const std::vector<DatasetEntry>& entries) {
  for (const DatasetEntry& e : entries) {
    if (e.record.dimension() != entries.front().record.dimension()) {
      throw Error(ErrorCode::kSchemaMismatch, "records differ in feature count");
    }
  }
}

}  // namespace

Json Record::to_json() const {
  return Json{{"features", features_json(features)}, {"label", label.scaled()}, {"source", source_asset_hash.hex()}};
}

Bytes Record::canonical_bytes() const { return attest::canonical_bytes(to_json()); }

Record Record::from_json(const Json& j) {
  Record r;
  r.features = parse_features(j);
  r.label = guarded_value(json_field(j, "label"));
  r.source_asset_hash = json_digest(j, "source");
  return r;
}

Record parse_raw_row(ByteView payload, const Digest& asset_hash) {
  Json j = parse_json(payload);
  Record r;
  r.features = parse_features(j);
  r.label = guarded_value(json_field(j, "label"));
  r.source_asset_hash = asset_hash;
  return r;
}

Bytes raw_row_bytes(std::span<const FixedPoint> features, FixedPoint label) {
  return canonical_bytes(Json{{"features", features_json(features)}, {"label", label.scaled()}});
}

Digest record_leaf(const Blinding& blinding, ByteView record_bytes) {
  return Sha256().update(Tag::kLeaf).update(ByteView(blinding)).update(record_bytes).finish();
}

void RecordOpening::write(ByteWriter& w) const {
  w.bytes(record_bytes);
  write_blinding(w, blinding);
  path.write(w);
}

RecordOpening RecordOpening::read(ByteReader& r) {
  RecordOpening o;
  o.record_bytes = r.bytes();
  o.blinding = read_blinding(r);
  o.path = MerklePath::read(r);
  return o;
}

bool verify_record_opening(const Digest& root, std::size_t index, const RecordOpening& opening) {
  return opening.path.leaf_index == index && merkle_verify(root, opening.leaf(), opening.path);
}

CommittedDataset CommittedDataset::commit(std::vector<Record> records, BlindingSource& blindings) {
  std::vector<DatasetEntry> entries;
  entries.reserve(records.size());
  for (Record& r : records) {
    DatasetEntry e;
    e.record_bytes = r.canonical_bytes();
    e.record = std::move(r);
    e.blinding = blindings.next();
    e.leaf = record_leaf(e.blinding, e.record_bytes);
    entries.push_back(std::move(e));
  }
  return from_entries(std::move(entries));
}

CommittedDataset CommittedDataset::from_entries(std::vector<DatasetEntry> entries) {
  if (entries.empty()) throw Error(ErrorCode::kEmptyOutput, "dataset has no records");
  check_dimensions(entries);
  std::sort(entries.begin(), entries.end(),
            [](const DatasetEntry& a, const DatasetEntry& b) { return a.leaf < b.leaf; });
  std::vector<Digest> leaves;
  leaves.reserve(entries.size());
  for (const DatasetEntry& e : entries) leaves.push_back(e.leaf);
  SortedMerkleTree tree = SortedMerkleTree::build(leaves);
  if (tree.size() != entries.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "duplicate record commitments");
  }
  return CommittedDataset(std::move(entries), std::move(tree));
}

RecordOpening CommittedDataset::open(std::size_t index) const {
  const DatasetEntry& e = entries_.at(index);
  return RecordOpening{e.record_bytes, e.blinding, tree_.prove(index)};
}

CommittedDataset CommittedDataset::without(const Digest& leaf) const {
  auto idx = index_of(leaf);
  if (!idx) throw Error(ErrorCode::kRecordNotFound, "record " + leaf.hex() + " not in dataset");
  std::vector<DatasetEntry> rest;
  rest.reserve(entries_.size() - 1);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i != *idx) rest.push_back(entries_[i]);
  }
  return from_entries(std::move(rest));
}

std::string CommittedDataset::records_jsonl() const {
  std::string out;
  for (const DatasetEntry& e : entries_) {
    out.append(to_string(e.record_bytes));
    out.push_back('\n');
  }
  return out;
}

std::string CommittedDataset::secrets_jsonl() const {
  std::string out;
  for (const DatasetEntry& e : entries_) {
    out.append(canonical_dump(Json{{"blinding", hex_encode(e.blinding)}}));
    out.push_back('\n');
  }
  return out;
}

CommittedDataset CommittedDataset::load(std::string_view records_jsonl, std::string_view secrets_jsonl) {
  auto rec_lines = split_lines(records_jsonl);
  auto sec_lines = split_lines(secrets_jsonl);
  if (rec_lines.size() != sec_lines.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "record and secret files differ in length");
  }
  std::vector<DatasetEntry> entries;
  for (std::size_t i = 0; i < rec_lines.size(); ++i) {
    DatasetEntry e;
    e.record = Record::from_json(parse_json(rec_lines[i]));
    e.record_bytes = e.record.canonical_bytes();
    Bytes b = hex_decode(json_string(parse_json(sec_lines[i]), "blinding"));
    if (b.size() != 32) throw Error(ErrorCode::kSchemaMismatch, "blinding must be 32 bytes");
    std::copy(b.begin(), b.end(), e.blinding.begin());
    e.leaf = record_leaf(e.blinding, e.record_bytes);
    entries.push_back(std::move(e));
  }
  return from_entries(std::move(entries));
}

PublicDataset PublicDataset::from_records(std::vector<Record> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyOutput, "benchmark has no records");
  std::vector<Bytes> payloads;
  payloads.reserve(records.size());
  for (const Record& r : records) {
    if (r.dimension() != records.front().dimension()) {
      throw Error(ErrorCode::kSchemaMismatch, "benchmark records differ in feature count");
    }
    payloads.push_back(r.canonical_bytes());
  }
  MerkleTree tree = MerkleTree::build(std::span<const Bytes>(payloads));
  return PublicDataset(std::move(records), std::move(tree));
}

PublicDataset PublicDataset::load(std::string_view records_jsonl) {
  return from_records(parse_records_jsonl(records_jsonl));
}

std::string PublicDataset::records_jsonl() const {
  std::string out;
  for (const Record& r : records_) {
    out.append(canonical_dump(r.to_json()));
    out.push_back('\n');
  }
  return out;
}

std::vector<Record> parse_records_jsonl(std::string_view text) {
  std::vector<Record> out;
  for (std::string_view line : split_lines(text)) out.push_back(Record::from_json(parse_json(line)));
  return out;
}

std::uint64_t HashStream::next_u64() {
  if (used_ == 4) {
    block_ = Sha256().update(seed_).update_u64(counter_++).finish();
    used_ = 0;
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(block_.bytes[8 * used_ + i]) << (8 * i);
  ++used_;
  return v;
}

std::uint64_t HashStream::uniform(std::uint64_t bound) {
  // Largest multiple of bound representable; values at or above it are redrawn.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

std::vector<std::size_t> fisher_yates(std::size_t n, HashStream& stream) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    auto j = static_cast<std::size_t>(stream.uniform(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace attest
