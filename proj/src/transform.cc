// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/transform.h"

#include <algorithm>

#include "attest/error.h"
#include "attest/transcript.h"

namespace attest {
namespace {

std::string_view comparison_name(Comparison c) {
  switch (c) {
    case Comparison::kGe: return "ge";
    case Comparison::kGt: return "gt";
    case Comparison::kLe: return "le";
    case Comparison::kLt: return "lt";
  }
  return "ge";
}

Comparison parse_comparison(std::string_view s) {
  if (s == "ge") return Comparison::kGe;
  if (s == "gt") return Comparison::kGt;
  if (s == "le") return Comparison::kLe;
  if (s == "lt") return Comparison::kLt;
  throw Error(ErrorCode::kSchemaMismatch, "unknown comparison '" + std::string(s) + "'");
}

Json fixed_array(std::span<const FixedPoint> v) {
  Json arr = Json::array();
  for (FixedPoint x : v) arr.push_back(x.scaled());
  return arr;
}

std::vector<FixedPoint> parse_fixed_array(const Json& j, std::string_view key) {
  const Json& arr = json_field(j, key);
  if (!arr.is_array()) throw Error(ErrorCode::kSchemaMismatch, std::string(key) + " must be an array");
  std::vector<FixedPoint> out;
  for (const Json& v : arr) {
    if (!v.is_number_integer()) throw Error(ErrorCode::kSchemaMismatch, std::string(key) + " entries must be integers");
    out.push_back(FixedPoint::from_scaled(v.get<std::int64_t>()));
  }
  return out;
}

bool compare(std::int64_t lhs, Comparison cmp, std::int64_t rhs) {
  switch (cmp) {
    case Comparison::kGe: return lhs >= rhs;
    case Comparison::kGt: return lhs > rhs;
    case Comparison::kLe: return lhs <= rhs;
    case Comparison::kLt: return lhs < rhs;
  }
  return false;
}

std::vector<bool> split_mask(const SplitOp& op, std::size_t n) {
  HashStream stream(Sha256().update("attest/split").update_u64(op.seed).finish());
  std::vector<std::size_t> perm = fisher_yates(n, stream);
  const std::size_t keep = n * op.train_permille / 1000;
  std::vector<bool> mask(n, false);
  for (std::size_t pos = 0; pos < keep; ++pos) mask[perm[pos]] = true;
  return mask;
}

std::vector<std::size_t> derive_challenges(const Digest& input_root, const Digest& output_root,
                                           const Digest& spec_hash, std::uint64_t input_count,
                                           std::uint64_t output_count, std::size_t c) {
  Transcript t("attest/transform/v1");
  t.absorb("input_root", input_root);
  t.absorb("output_root", output_root);
  t.absorb("spec_hash", spec_hash);
  t.absorb_u64("input_count", input_count);
  t.absorb_u64("output_count", output_count);
  t.absorb_u64("challenges", c);
  return t.challenge_indices(c, input_count);
}

}  // namespace

Json TransformSpec::to_json() const {
  Json arr = Json::array();
  for (const TransformOp& op : ops) {
    std::visit(
        [&arr](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, FilterOp>) {
            arr.push_back(Json{{"op", "filter"},
                               {"column", o.column},
                               {"cmp", std::string(comparison_name(o.cmp))},
                               {"threshold", o.threshold.scaled()}});
          } else if constexpr (std::is_same_v<T, NormalizeOp>) {
            arr.push_back(Json{{"op", "normalize"}, {"mean", fixed_array(o.mean)}, {"inv_std", fixed_array(o.inv_std)}});
          } else if constexpr (std::is_same_v<T, QuantizeOp>) {
            arr.push_back(Json{{"op", "quantize"}, {"frac_bits", o.frac_bits}});
          } else {
            arr.push_back(Json{{"op", "split"}, {"train_permille", o.train_permille}, {"seed", o.seed}});
          }
        },
        op);
  }
  return Json{{"ops", arr}};
}

TransformSpec TransformSpec::from_json(const Json& j) {
  TransformSpec spec;
  const Json& ops = json_field(j, "ops");
  if (!ops.is_array()) throw Error(ErrorCode::kSchemaMismatch, "ops must be an array");
  for (const Json& o : ops) {
    const std::string kind = json_string(o, "op");
    if (kind == "filter") {
      FilterOp f;
      f.column = static_cast<int>(json_int(o, "column"));
      f.cmp = parse_comparison(json_string(o, "cmp"));
      f.threshold = FixedPoint::from_scaled(json_int(o, "threshold"));
      if (f.column < FilterOp::kLabelColumn) throw Error(ErrorCode::kSchemaMismatch, "bad filter column");
      spec.ops.emplace_back(f);
    } else if (kind == "normalize") {
      NormalizeOp n{parse_fixed_array(o, "mean"), parse_fixed_array(o, "inv_std")};
      if (n.mean.size() != n.inv_std.size()) {
        throw Error(ErrorCode::kSchemaMismatch, "normalize mean and inv_std differ in length");
      }
      spec.ops.emplace_back(std::move(n));
    } else if (kind == "quantize") {
      const std::int64_t bits = json_int(o, "frac_bits");
      if (bits < 0 || bits > kFracBits) throw Error(ErrorCode::kSchemaMismatch, "frac_bits must be in 0..16");
      spec.ops.emplace_back(QuantizeOp{static_cast<int>(bits)});
    } else if (kind == "split") {
      const std::int64_t permille = json_int(o, "train_permille");
      const std::int64_t seed = json_int(o, "seed");
      if (permille < 0 || permille > 1000 || seed < 0) {
        throw Error(ErrorCode::kSchemaMismatch, "split needs train_permille in 0..1000 and a non-negative seed");
      }
      spec.ops.emplace_back(SplitOp{static_cast<std::uint32_t>(permille), static_cast<std::uint64_t>(seed)});
    } else {
      throw Error(ErrorCode::kSchemaMismatch, "unknown transform op '" + kind + "'");
    }
  }
  return spec;
}

RowTransformer::RowTransformer(const TransformSpec& spec, std::size_t input_count) : spec_(spec) {
  for (const TransformOp& op : spec_.ops) {
    if (const auto* s = std::get_if<SplitOp>(&op)) split_keep_.push_back(split_mask(*s, input_count));
  }
}

std::optional<Record> RowTransformer::apply(const Record& in, std::size_t input_index) const {
  Record r = in;
  std::size_t split_no = 0;
  for (const TransformOp& op : spec_.ops) {
    if (const auto* f = std::get_if<FilterOp>(&op)) {
      std::int64_t v;
      if (f->column == FilterOp::kLabelColumn) {
        v = r.label.scaled();
      } else if (static_cast<std::size_t>(f->column) < r.dimension()) {
        v = r.features[static_cast<std::size_t>(f->column)].scaled();
      } else {
        throw Error(ErrorCode::kSchemaMismatch, "filter column beyond record dimension");
      }
      if (!compare(v, f->cmp, f->threshold.scaled())) return std::nullopt;
    } else if (const auto* n = std::get_if<NormalizeOp>(&op)) {
      if (n->mean.size() != r.dimension()) {
        throw Error(ErrorCode::kSchemaMismatch, "normalize dimension differs from record");
      }
      for (std::size_t j = 0; j < r.dimension(); ++j) {
        r.features[j] = fp_mul_rescale(fp_sub(r.features[j], n->mean[j]), n->inv_std[j]);
      }
    } else if (const auto* q = std::get_if<QuantizeOp>(&op)) {
      const int shift = kFracBits - q->frac_bits;
      for (FixedPoint& x : r.features) x = FixedPoint::from_scaled((x.scaled() >> shift) << shift);
    } else if (std::holds_alternative<SplitOp>(op)) {
      const std::vector<bool>& keep = split_keep_[split_no++];
      if (input_index >= keep.size() || !keep[input_index]) return std::nullopt;
    }
  }
  return r;
}

void CorpusOpening::write(ByteWriter& w) const {
  w.bytes(payload);
  asset_hash.write(w);
  write_blinding(w, blinding);
  path.write(w);
}

CorpusOpening CorpusOpening::read(ByteReader& r) {
  CorpusOpening o;
  o.payload = r.bytes();
  o.asset_hash = Digest::read(r);
  o.blinding = read_blinding(r);
  o.path = MerklePath::read(r);
  return o;
}

CorpusOpening open_corpus(const CorpusCommitment& corpus, std::size_t index) {
  const CorpusEntry& e = corpus.accepted.at(index);
  return CorpusOpening{e.payload, e.manifest.asset_hash, e.blinding, corpus.tree.prove(index)};
}

bool verify_corpus_opening(const Digest& root, std::size_t index, const CorpusOpening& o) {
  if (o.path.leaf_index != index) return false;
  if (sha256(o.payload) != o.asset_hash) return false;
  return merkle_verify(root, corpus_leaf(o.blinding, o.asset_hash, o.payload), o.path);
}

TransformOutput transform_apply(const CorpusCommitment& input, const TransformSpec& spec,
                                BlindingSource& blindings) {
  const std::size_t n = input.accepted.size();
  RowTransformer rows(spec, n);
  std::vector<Record> out;
  std::vector<std::optional<std::size_t>> produced_by(n);
  std::optional<std::size_t> dim;
  for (std::size_t i = 0; i < n; ++i) {
    const CorpusEntry& e = input.accepted[i];
    Record in = parse_raw_row(e.payload, e.manifest.asset_hash);
    if (dim && *dim != in.dimension()) throw Error(ErrorCode::kSchemaMismatch, "corpus rows differ in feature count");
    dim = in.dimension();
    if (auto r = rows.apply(in, i)) {
      produced_by[i] = out.size();
      out.push_back(std::move(*r));
    }
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyOutput, "transform dropped every row");

  std::vector<Digest> leaf_of_row(out.size());
  std::vector<DatasetEntry> entries;
  entries.reserve(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    DatasetEntry e;
    e.record_bytes = out[k].canonical_bytes();
    e.record = std::move(out[k]);
    e.blinding = blindings.next();
    e.leaf = record_leaf(e.blinding, e.record_bytes);
    leaf_of_row[k] = e.leaf;
    entries.push_back(std::move(e));
  }
  CommittedDataset dataset = CommittedDataset::from_entries(std::move(entries));
  std::vector<std::optional<std::size_t>> output_index(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (produced_by[i]) output_index[i] = dataset.index_of(leaf_of_row[*produced_by[i]]);
  }
  return TransformOutput{std::move(dataset), std::move(output_index)};
}

Bytes TransformProof::serialize() const {
  ByteWriter w;
  input_root.write(w);
  output_root.write(w);
  spec_hash.write(w);
  w.u64(input_count);
  w.u64(output_count);
  input_count_proof.write(w);
  output_count_proof.write(w);
  w.count(items.size());
  for (const Item& it : items) {
    it.input.write(w);
    w.u8(it.output ? 1 : 0);
    if (it.output) it.output->write(w);
  }
  return std::move(w).take();
}

TransformProof TransformProof::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  TransformProof p;
  p.input_root = Digest::read(r);
  p.output_root = Digest::read(r);
  p.spec_hash = Digest::read(r);
  p.input_count = r.u64();
  p.output_count = r.u64();
  p.input_count_proof = LeafCountProof::read(r);
  p.output_count_proof = LeafCountProof::read(r);
  const std::size_t n = r.count();
  for (std::size_t i = 0; i < n; ++i) {
    Item it;
    it.input = CorpusOpening::read(r);
    const std::uint8_t has_output = r.u8();
    if (has_output > 1) throw Error(ErrorCode::kDecodeError, "bad output flag");
    if (has_output) it.output = RecordOpening::read(r);
    p.items.push_back(std::move(it));
  }
  r.expect_done();
  return p;
}

TransformProof transform_prove(const CorpusCommitment& input, const TransformOutput& output,
                               const TransformSpec& spec, std::size_t challenges) {
  const std::size_t n = input.accepted.size();
  if (challenges > n) {
    throw Error(ErrorCode::kChallengeCountExceedsRows,
                std::to_string(challenges) + " challenges for " + std::to_string(n) + " rows");
  }
  TransformProof p;
  p.input_root = input.root();
  p.output_root = output.dataset.root();
  p.spec_hash = spec.hash();
  p.input_count = n;
  p.output_count = output.dataset.size();
  p.input_count_proof = prove_leaf_count(input.tree, input.leaves.back().view());
  p.output_count_proof = output.dataset.prove_count();
  for (std::size_t i : derive_challenges(p.input_root, p.output_root, p.spec_hash, p.input_count,
                                         p.output_count, challenges)) {
    TransformProof::Item it;
    it.input = open_corpus(input, i);
    if (output.output_index[i]) it.output = output.dataset.open(*output.output_index[i]);
    p.items.push_back(std::move(it));
  }
  return p;
}

bool transform_verify(const Digest& input_root, const Digest& output_root, const TransformSpec& spec,
                      const TransformProof& proof) {
  if (proof.input_root != input_root || proof.output_root != output_root) return false;
  if (proof.spec_hash != spec.hash()) return false;
  if (proof.items.empty() || proof.items.size() > proof.input_count) return false;
  if (!verify_leaf_count(input_root, proof.input_count, proof.input_count_proof)) return false;
  if (!verify_leaf_count(output_root, proof.output_count, proof.output_count_proof)) return false;

  const std::vector<std::size_t> challenges = derive_challenges(
      input_root, output_root, proof.spec_hash, proof.input_count, proof.output_count, proof.items.size());
  std::vector<std::uint64_t> output_indices;
  try {
    RowTransformer rows(spec, proof.input_count);
    for (std::size_t k = 0; k < challenges.size(); ++k) {
      const TransformProof::Item& it = proof.items[k];
      if (!verify_corpus_opening(input_root, challenges[k], it.input)) return false;
      Record in = parse_raw_row(it.input.payload, it.input.asset_hash);
      std::optional<Record> expected = rows.apply(in, challenges[k]);
      if (!expected) {
        if (it.output) return false;
        continue;
      }
      if (!it.output) return false;
      const RecordOpening& out = *it.output;
      if (out.path.leaf_index >= proof.output_count) return false;
      if (!verify_record_opening(output_root, out.path.leaf_index, out)) return false;
      if (out.record_bytes != expected->canonical_bytes()) return false;
      output_indices.push_back(out.path.leaf_index);
    }
  } catch (const Error&) {
    return false;
  }

  std::sort(output_indices.begin(), output_indices.end());
  if (std::adjacent_find(output_indices.begin(), output_indices.end()) != output_indices.end()) return false;
  // A full reveal also accounts for every output leaf.
  if (proof.items.size() == proof.input_count && output_indices.size() != proof.output_count) return false;
  return true;
}

Json dataset_statistics(const CommittedDataset& dataset) {
  const std::size_t d = dataset.dimension();
  std::vector<std::int64_t> mins(d, INT64_MAX), maxs(d, INT64_MIN), sums(d, 0);
  std::int64_t label_sum = 0;
  for (const DatasetEntry& e : dataset.entries()) {
    for (std::size_t j = 0; j < d; ++j) {
      const std::int64_t v = e.record.features[j].scaled();
      mins[j] = std::min(mins[j], v);
      maxs[j] = std::max(maxs[j], v);
      sums[j] += v;
    }
    label_sum += e.record.label.scaled();
  }
  return Json{{"count", dataset.size()}, {"feature_min", mins}, {"feature_max", maxs},
              {"feature_sum", sums}, {"label_sum", label_sum}};
}

}  // namespace attest
