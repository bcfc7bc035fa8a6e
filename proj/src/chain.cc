// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/chain.h"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "attest/error.h"
#include "attest/stage_proofs.h"

namespace attest {

namespace {

constexpr std::array<std::string_view, 7> kStageNames = {"corpus",   "transform", "train", "fine_tune",
                                                         "evaluate", "infer",     "unlearn"};

Json commitments_json(const std::vector<LabeledCommitment>& cs) {
  Json a = Json::array();
  for (const LabeledCommitment& c : cs) a.push_back(Json{{"label", c.label}, {"digest", c.digest.hex()}});
  return a;
}

std::vector<LabeledCommitment> commitments_from_json(const Json& a) {
  if (!a.is_array()) throw Error(ErrorCode::kSchemaMismatch, "commitment list must be an array");
  std::vector<LabeledCommitment> out;
  for (const Json& c : a) out.push_back({json_string(c, "label"), json_digest(c, "digest")});
  return out;
}

const Digest* find_label(const std::vector<LabeledCommitment>& cs, std::string_view label) {
  for (const LabeledCommitment& c : cs) {
    if (c.label == label) return &c.digest;
  }
  return nullptr;
}

std::string short_hex(const Digest& d) { return d.hex().substr(0, 16); }

}  // namespace

std::string_view stage_type_name(StageType t) { return kStageNames[static_cast<std::size_t>(t)]; }

StageType parse_stage_type(std::string_view s) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == s) return static_cast<StageType>(i);
  }
  throw Error(ErrorCode::kSchemaMismatch, "unknown stage type '" + std::string(s) + "'");
}

Json StageRecord::body_json() const {
  return Json{{"index", index},
              {"stage_type", std::string(stage_type_name(type))},
              {"prev_record_hash", prev_record_hash.hex()},
              {"inputs", commitments_json(inputs)},
              {"outputs", commitments_json(outputs)},
              {"spec_hash", spec_hash.hex()},
              {"proof_digest", proof_digest.hex()}};
}

Digest StageRecord::compute_hash() const {
  return Sha256().update(Tag::kStageRecord).update(canonical_dump(body_json())).finish();
}

Json StageRecord::to_json() const {
  Json j = body_json();
  j["record_hash"] = record_hash.hex();
  return j;
}

StageRecord StageRecord::from_json(const Json& j) {
  StageRecord r;
  const std::int64_t index = json_int(j, "index");
  if (index < 0) throw Error(ErrorCode::kSchemaMismatch, "negative record index");
  r.index = static_cast<std::uint64_t>(index);
  r.type = parse_stage_type(json_string(j, "stage_type"));
  r.prev_record_hash = json_digest(j, "prev_record_hash");
  r.inputs = commitments_from_json(json_field(j, "inputs"));
  r.outputs = commitments_from_json(json_field(j, "outputs"));
  r.spec_hash = json_digest(j, "spec_hash");
  r.proof_digest = json_digest(j, "proof_digest");
  r.record_hash = json_digest(j, "record_hash");
  if (j.size() != 8) throw Error(ErrorCode::kSchemaMismatch, "unexpected fields in stage record");
  return r;
}

const Digest* StageRecord::output(std::string_view label) const { return find_label(outputs, label); }
const Digest* StageRecord::input(std::string_view label) const { return find_label(inputs, label); }

Digest MemoryProofStore::put(ByteView blob) {
  const Digest d = sha256(blob);
  blobs_[d] = Bytes(blob.begin(), blob.end());
  return d;
}

std::optional<Bytes> MemoryProofStore::get(const Digest& digest) const {
  auto it = blobs_.find(digest);
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

Digest DirectoryProofStore::put(ByteView blob) {
  const Digest d = sha256(blob);
  std::filesystem::create_directories(dir_);
  const std::filesystem::path target = path_for(d);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    if (!out) throw Error(ErrorCode::kIoError, "cannot write proof blob " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
  return d;
}

std::optional<Bytes> DirectoryProofStore::get(const Digest& digest) const {
  std::ifstream in(path_for(digest), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return to_bytes(ss.str());
}

void PipelineChain::append(StageRecord record) {
  if (record.index != records_.size()) {
    throw Error(ErrorCode::kNonContiguousIndex, "record index " + std::to_string(record.index) + ", expected " +
                                                    std::to_string(records_.size()));
  }
  if (record.prev_record_hash != head()) {
    throw Error(ErrorCode::kNonContiguousIndex, "record " + std::to_string(record.index) + " does not link to head");
  }
  if (record.record_hash != record.compute_hash()) {
    throw Error(ErrorCode::kSchemaMismatch, "record hash does not match record contents");
  }
  if (record.type != StageType::kCorpus) {
    for (const LabeledCommitment& c : record.inputs) {
      if (!producer_of(c, records_.size())) {
        throw Error(ErrorCode::kUnlinkedInput, "input '" + c.label + "' = " + c.digest.hex() +
                                                   " was not emitted by any earlier stage");
      }
    }
  }
  records_.push_back(std::move(record));
}

std::optional<std::size_t> PipelineChain::producer_of(const LabeledCommitment& c, std::size_t before) const {
  for (std::size_t i = std::min(before, records_.size()); i-- > 0;) {
    for (const LabeledCommitment& o : records_[i].outputs) {
      if (o == c) return i;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> PipelineChain::latest_output(std::string_view label) const {
  for (std::size_t i = records_.size(); i-- > 0;) {
    if (records_[i].output(label)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> PipelineChain::latest_of_type(StageType t) const {
  for (std::size_t i = records_.size(); i-- > 0;) {
    if (records_[i].type == t) return i;
  }
  return std::nullopt;
}

std::string PipelineChain::to_jsonl() const {
  std::string out;
  for (const StageRecord& r : records_) {
    out += r.canonical_line();
    out += '\n';
  }
  return out;
}

PipelineChain PipelineChain::from_jsonl(std::string_view text) {
  PipelineChain chain;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (!line.empty()) chain.append(StageRecord::from_json(parse_json(line)));
    start = end + 1;
  }
  return chain;
}

StageRecord chain_append(PipelineChain& chain, StageType type, std::vector<LabeledCommitment> inputs,
                         std::vector<LabeledCommitment> outputs, const Digest& spec_hash, ByteView proof_blob,
                         ProofStore& store) {
  StageRecord r;
  r.index = chain.size();
  r.type = type;
  r.prev_record_hash = chain.head();
  r.inputs = std::move(inputs);
  r.outputs = std::move(outputs);
  r.spec_hash = spec_hash;
  r.proof_digest = sha256(proof_blob);
  r.record_hash = r.compute_hash();
  // Validate linkage before touching the store.
  PipelineChain probe = chain;
  probe.append(r);
  store.put(proof_blob);
  chain = std::move(probe);
  return r;
}

namespace {

struct ParsedLine {
  std::optional<StageRecord> record;
  std::string error;
};

// Checks one record against the verified prefix in `seen`.
RecordCheck check_record(const ParsedLine& line, std::uint64_t position, const std::vector<StageRecord>& seen,
                         const VerificationContext& ctx, bool run_proof) {
  RecordCheck c;
  c.index = position;
  if (!line.record) {
    c.detail = line.error;
    return c;
  }
  const StageRecord& r = *line.record;
  c.parsed = true;
  c.stage = std::string(stage_type_name(r.type));
  const Digest expected_prev = seen.empty() ? Digest() : seen.back().record_hash;
  c.hash_link = r.index == position && r.prev_record_hash == expected_prev && r.record_hash == r.compute_hash();
  if (!c.hash_link) {
    c.detail = r.index != position ? "index " + std::to_string(r.index) + " out of sequence"
               : r.prev_record_hash != expected_prev ? "prev_record_hash does not match predecessor"
                                                     : "record_hash does not match contents";
  }

  c.linkage = true;
  if (r.type != StageType::kCorpus) {
    for (const LabeledCommitment& in : r.inputs) {
      bool found = false;
      for (const StageRecord& prev : seen) {
        for (const LabeledCommitment& out : prev.outputs) found = found || out == in;
      }
      if (!found) {
        c.linkage = false;
        if (c.detail.empty()) c.detail = "input '" + in.label + "' not emitted by an earlier stage";
      }
    }
  } else if (!r.inputs.empty()) {
    c.linkage = false;
    if (c.detail.empty()) c.detail = "corpus stage must not have inputs";
  }

  std::optional<Bytes> blob;
  if (ctx.store) blob = ctx.store->get(r.proof_digest);
  if (!blob) {
    if (c.detail.empty()) c.detail = "missing proof blob " + r.proof_digest.hex();
    return c;
  }
  c.proof_digest = sha256(*blob) == r.proof_digest;
  if (!c.proof_digest) {
    if (c.detail.empty()) c.detail = "proof blob does not hash to proof_digest";
    return c;
  }
  if (run_proof) {
    c.proof_checked = true;
    const std::string reason = verify_stage_proof(r, *blob, ctx);
    c.proof_valid = reason.empty();
    if (!c.proof_valid && c.detail.empty()) c.detail = reason;
  }
  return c;
}

ChainReport verify_lines(const std::vector<ParsedLine>& lines, const VerificationContext& ctx,
                         std::optional<std::uint64_t> stage) {
  ChainReport report;
  std::vector<StageRecord> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const bool run_proof = !stage || *stage == i;
    report.records.push_back(check_record(lines[i], i, seen, ctx, run_proof));
    if (lines[i].record) seen.push_back(*lines[i].record);
  }
  if (stage && *stage >= lines.size()) {
    RecordCheck missing;
    missing.index = *stage;
    missing.detail = "no record with index " + std::to_string(*stage);
    report.records.push_back(missing);
  }
  for (const RecordCheck& c : report.records) {
    if (!c.passed() || (stage && c.index == *stage && !c.proof_checked)) {
      report.first_failure = c.index;
      break;
    }
  }
  report.passed = !report.first_failure && !lines.empty();
  if (lines.empty() && !report.first_failure) report.first_failure = 0;
  return report;
}

}  // namespace

ChainReport chain_verify(const PipelineChain& chain, const VerificationContext& ctx,
                         std::optional<std::uint64_t> stage) {
  std::vector<ParsedLine> lines;
  for (const StageRecord& r : chain.records()) lines.push_back({r, {}});
  return verify_lines(lines, ctx, stage);
}

ChainReport chain_verify_jsonl(std::string_view text, const VerificationContext& ctx,
                               std::optional<std::uint64_t> stage) {
  std::vector<ParsedLine> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ParsedLine p;
    try {
      StageRecord r = StageRecord::from_json(parse_json(line));
      if (r.canonical_line() != line) {
        p.error = "record is not in canonical form";
      } else {
        p.record = std::move(r);
      }
    } catch (const Error& e) {
      p.error = std::string("unparseable record: ") + e.what();
    }
    lines.push_back(std::move(p));
  }
  return verify_lines(lines, ctx, stage);
}

Json ChainReport::to_json() const {
  Json recs = Json::array();
  for (const RecordCheck& c : records) {
    recs.push_back(Json{{"index", c.index},
                        {"stage_type", c.stage},
                        {"parsed", c.parsed},
                        {"hash_link", c.hash_link},
                        {"linkage", c.linkage},
                        {"proof_digest", c.proof_digest},
                        {"proof_checked", c.proof_checked},
                        {"proof_valid", c.proof_valid},
                        {"passed", c.passed()},
                        {"detail", c.detail}});
  }
  Json j{{"passed", passed},
         {"records", recs},
         {"composition", "hash-linked records with per-stage proofs; no recursive proof composition"}};
  j["first_failure"] = first_failure ? Json(*first_failure) : Json(nullptr);
  return j;
}

std::string ChainReport::to_text() const {
  std::ostringstream out;
  for (const RecordCheck& c : records) {
    out << "#" << c.index << " " << (c.stage.empty() ? "?" : c.stage) << ": ";
    if (c.passed()) {
      out << (c.proof_checked ? "ok" : "ok (links only)");
    } else {
      out << "FAIL";
    }
    if (!c.detail.empty()) out << " - " << c.detail;
    out << "\n";
  }
  if (passed) {
    out << "chain verified (" << records.size() << " records)\n";
  } else if (first_failure) {
    out << "verification failed at record " << *first_failure << "\n";
  } else {
    out << "verification failed\n";
  }
  return out.str();
}

std::string chain_trace(const PipelineChain& chain, std::string_view query) {
  std::optional<std::size_t> root;
  const std::size_t eq = query.find('=');
  if (eq != std::string_view::npos) {
    const LabeledCommitment c{std::string(query.substr(0, eq)), Digest::from_hex(query.substr(eq + 1))};
    root = chain.producer_of(c, chain.size());
  } else if (query.size() == 64 && query.find_first_not_of("0123456789abcdef") == std::string_view::npos) {
    const Digest d = Digest::from_hex(query);
    for (std::size_t i = chain.size(); i-- > 0 && !root;) {
      for (const LabeledCommitment& o : chain.records()[i].outputs) {
        if (o.digest == d) root = i;
      }
    }
  } else {
    root = chain.latest_output(query);
  }
  if (!root) throw Error(ErrorCode::kUnknownLabel, "no stage emitted '" + std::string(query) + "'");

  std::ostringstream out;
  std::set<std::size_t> expanded;
  const std::function<void(std::size_t, std::size_t, const std::string&)> render =
      [&](std::size_t i, std::size_t depth, const std::string& via) {
        const StageRecord& r = chain.records()[i];
        const std::string indent(depth * 4, ' ');
        out << indent << (depth ? "<- " : "") << "#" << r.index << " " << stage_type_name(r.type);
        if (!via.empty()) out << " (via " << via << ")";
        out << "\n";
        const std::string pad = indent + (depth ? "   " : "") + "  ";
        for (const LabeledCommitment& o : r.outputs) out << pad << "out " << o.label << " " << short_hex(o.digest) << "\n";
        for (const LabeledCommitment& in : r.inputs) out << pad << "in  " << in.label << " " << short_hex(in.digest) << "\n";
        if (!expanded.insert(i).second) return;
        for (const LabeledCommitment& in : r.inputs) {
          if (const auto p = chain.producer_of(in, i)) render(*p, depth + 1, in.label);
        }
      };
  render(*root, 0, "");
  return out.str();
}

}  // namespace attest
