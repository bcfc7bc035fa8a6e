// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#include "attest/cli/commands.h"

#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "attest/chain.h"
#include "attest/cli/demo.h"
#include "attest/error.h"
#include "attest/stage_proofs.h"

namespace attest {
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, std::string_view text, bool secret = false) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
  }
  if (secret) fs::permissions(tmp, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
  fs::rename(tmp, p);
}

[[noreturn]] void missing(const std::string& what) { throw Error(ErrorCode::kMissingPrerequisiteStage, what); }

// Exclusive writer lock beside the chain log.
class ChainLock {
 public:
  explicit ChainLock(const fs::path& log) : path_(log.string() + ".lock") {
    fs::create_directories(path_.parent_path());
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0600);
    if (fd_ < 0) throw Error(ErrorCode::kIoError, "chain log is locked by another writer (" + path_.string() + ")");
  }
  ~ChainLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  ChainLock(const ChainLock&) = delete;
  ChainLock& operator=(const ChainLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

class LayeredStore : public ProofStore {
 public:
  LayeredStore(const ProofStore& top, const ProofStore& bottom) : top_(top), bottom_(bottom) {}
  Digest put(ByteView) override { throw Error(ErrorCode::kIoError, "read-only store"); }
  std::optional<Bytes> get(const Digest& d) const override {
    if (auto b = top_.get(d)) return b;
    return bottom_.get(d);
  }

 private:
  const ProofStore& top_;
  const ProofStore& bottom_;
};

class Workspace {
 public:
  explicit Workspace(const PipelineConfig& config) : config_(config), store_(config.proof_store) {}

  const PipelineConfig& config() const { return config_; }
  const DirectoryProofStore& store() const { return store_; }

  std::string log_text() const { return fs::exists(config_.chain_log) ? read_text(config_.chain_log) : std::string(); }

  PipelineChain chain() const {
    try {
      return PipelineChain::from_jsonl(log_text());
    } catch (const Error& e) {
      throw Error(e.code(), std::string("chain log is damaged, run verify: ") + e.what());
    }
  }

  VerificationContext context() const {
    VerificationContext ctx;
    ctx.trusted_keys = parse_trusted_keys(read_text(config_.trusted_keys));
    ctx.store = &store_;
    return ctx;
  }

  BlindingSource blindings(std::uint64_t stage_index) const {
    if (!config_.blinding_seed) return BlindingSource::random();
    return BlindingSource::seeded(
        Sha256().update("attest/cli").update_u64(*config_.blinding_seed).update_u64(stage_index).finish());
  }

  Bytes blob(const Digest& d) const {
    auto b = store_.get(d);
    if (!b) throw Error(ErrorCode::kMissingProofBlob, "proof blob " + d.hex() + " is not in the store");
    return *b;
  }

  void save_secret(const fs::path& rel, std::string_view text) const {
    fs::create_directories(config_.secrets_dir);
    fs::permissions(config_.secrets_dir, fs::perms::owner_all, fs::perm_options::replace);
    write_text(config_.secrets_dir / rel, text, true);
  }

  std::string load_secret(const fs::path& rel) const {
    const fs::path p = config_.secrets_dir / rel;
    if (!fs::exists(p)) missing("secret material " + rel.string() + " not found in " + config_.secrets_dir.string());
    return read_text(p);
  }

  void save_dataset(const CommittedDataset& ds) const {
    save_secret(fs::path("datasets") / (ds.root().hex() + ".records.jsonl"), ds.records_jsonl());
    save_secret(fs::path("datasets") / (ds.root().hex() + ".blindings.jsonl"), ds.secrets_jsonl());
  }

  CommittedDataset load_dataset(const Digest& root) const {
    CommittedDataset ds = CommittedDataset::load(load_secret(fs::path("datasets") / (root.hex() + ".records.jsonl")),
                                                 load_secret(fs::path("datasets") / (root.hex() + ".blindings.jsonl")));
    if (ds.root() != root) throw Error(ErrorCode::kSchemaMismatch, "stored dataset does not match " + root.hex());
    return ds;
  }

  void save_weights(const WeightsOpening& w) const {
    ByteWriter out;
    w.write(out);
    save_secret(fs::path("weights") / (w.root().hex() + ".opening"), hex_encode(out.data()) + "\n");
  }

  WeightsOpening load_weights(const Digest& root) const {
    std::string text = load_secret(fs::path("weights") / (root.hex() + ".opening"));
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    const Bytes bytes = hex_decode(text);
    ByteReader r(bytes);
    WeightsOpening w = WeightsOpening::read(r);
    r.expect_done();
    if (!verify_weights_opening(root, w)) throw Error(ErrorCode::kInvalidPriorOpening, "stored weights do not open");
    return w;
  }

  // Appends, self-verifies the new record, then persists blob and log line.
  StageRecord commit(PipelineChain chain, StageType type, const StageCommitments& c, const Digest& spec_hash,
                     ByteView blob) const {
    MemoryProofStore pending;
    const StageRecord record = chain_append(chain, type, c.inputs, c.outputs, spec_hash, blob, pending);
    LayeredStore layered(pending, store_);
    VerificationContext ctx = context();
    ctx.store = &layered;
    const ChainReport report = chain_verify(chain, ctx, record.index);
    if (!report.passed) {
      std::string detail;
      for (const RecordCheck& rc : report.records) {
        if (!rc.passed()) detail = "#" + std::to_string(rc.index) + ": " + rc.detail;
      }
      throw Error(ErrorCode::kSchemaMismatch, "new record failed self-verification (" + detail + ")");
    }
    fs::create_directories(config_.proof_store);
    DirectoryProofStore(config_.proof_store).put(blob);
    std::ofstream log(config_.chain_log, std::ios::binary | std::ios::app);
    log << record.canonical_line() << "\n";
    if (!log) throw Error(ErrorCode::kIoError, "cannot append to " + config_.chain_log.string());
    return record;
  }

 private:
  const PipelineConfig& config_;
  DirectoryProofStore store_;
};

ModelSpec load_model_spec(const PipelineConfig& c) {
  return ModelSpec::from_json(parse_json(read_text(c.model_spec)));
}

Json commitments_report(const StageRecord& r) {
  Json j = Json::object();
  for (const LabeledCommitment& o : r.outputs) j[o.label] = o.digest.hex();
  return j;
}

CommandResult stage_result(std::string_view command, const StageRecord& r, Json extra, std::string text) {
  CommandResult res;
  res.report = Json{{"command", std::string(command)},
                    {"record_index", r.index},
                    {"record_hash", r.record_hash.hex()},
                    {"outputs", commitments_report(r)}};
  res.report.update(extra);
  std::ostringstream out;
  out << "appended #" << r.index << " " << stage_type_name(r.type) << " (" << r.record_hash.hex().substr(0, 16)
      << ")\n";
  for (const LabeledCommitment& o : r.outputs) out << "  " << o.label << " " << o.digest.hex() << "\n";
  res.text = out.str() + text;
  return res;
}

bool has_record(const PipelineChain& chain, StageType type, const std::vector<LabeledCommitment>& inputs,
                const Digest& spec_hash) {
  return std::any_of(chain.records().begin(), chain.records().end(), [&](const StageRecord& r) {
    return r.type == type && r.inputs == inputs && r.spec_hash == spec_hash;
  });
}

void refuse_existing(bool exists, const CommandOptions& o, std::string_view what) {
  if (exists && !o.force_new) {
    throw Error(ErrorCode::kExistingStage, std::string(what) + " already recorded; pass --force-new to append another");
  }
}

const StageRecord& latest_with(const PipelineChain& chain, std::string_view label, const std::string& hint) {
  const auto i = chain.latest_output(label);
  if (!i) missing("no stage has produced " + std::string(label) + "; " + hint);
  return chain.records()[*i];
}

std::vector<RawAsset> load_assets(const fs::path& dir, ManifestStore& ingredients) {
  std::vector<fs::path> manifests;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.ends_with(".manifest.json")) manifests.push_back(e.path());
  }
  std::sort(manifests.begin(), manifests.end());
  std::vector<RawAsset> assets;
  for (const fs::path& m : manifests) {
    const std::string name = m.filename().string();
    const fs::path payload = dir / (name.substr(0, name.size() - std::string_view(".manifest.json").size()) + ".payload");
    assets.push_back(RawAsset{to_bytes(read_text(payload)), Manifest::from_json(parse_json(read_text(m)))});
  }
  if (fs::is_directory(dir / "ingredients")) {
    for (const auto& e : fs::directory_iterator(dir / "ingredients")) {
      if (e.path().filename().string().ends_with(".manifest.json")) {
        ingredients.add(Manifest::from_json(parse_json(read_text(e.path()))));
      }
    }
  }
  return assets;
}

}  // namespace

CommandResult cmd_ingest(const PipelineConfig& config, const CommandOptions& options) {
  const Workspace ws(config);
  const ChainLock lock(config.chain_log);
  const PipelineChain chain = ws.chain();
  refuse_existing(chain.latest_of_type(StageType::kCorpus).has_value(), options, "a corpus stage is");

  ManifestStore ingredients;
  const std::vector<RawAsset> assets = load_assets(config.corpus_dir, ingredients);
  const CorpusPolicy policy{config.required, parse_trusted_keys(read_text(config.trusted_keys))};
  BlindingSource bs = ws.blindings(chain.size());
  const CorpusCommitment corpus = corpus_verify(assets, policy, bs, &ingredients);

  CorpusStageProof proof{policy, corpus.accepted, {}};
  for (const auto& [digest, m] : ingredients.all()) proof.ingredients.push_back(m);
  const StageRecord r =
      ws.commit(chain, StageType::kCorpus, corpus_commitments(proof), proof.policy_hash(), proof.serialize());

  Json rejected = Json::array();
  std::ostringstream text;
  text << "accepted " << corpus.accepted.size() << " of " << assets.size() << " assets\n";
  for (const Rejection& x : corpus.rejected) {
    rejected.push_back(Json{{"index", x.input_index}, {"asset_id", x.asset_id}, {"reason", x.reason}});
    text << "  rejected " << x.asset_id << ": " << x.reason << "\n";
  }
  return stage_result("ingest", r, Json{{"accepted", corpus.accepted.size()}, {"rejected", rejected}}, text.str());
}

CommandResult cmd_transform(const PipelineConfig& config, const CommandOptions& options) {
  const Workspace ws(config);
  const ChainLock lock(config.chain_log);
  const PipelineChain chain = ws.chain();
  const auto corpus_index = chain.latest_of_type(StageType::kCorpus);
  if (!corpus_index) missing("no corpus stage; run ingest first");
  const StageRecord& corpus_record = chain.records()[*corpus_index];
  const TransformSpec spec = TransformSpec::from_json(parse_json(read_text(config.transform_spec)));
  refuse_existing(has_record(chain, StageType::kTransform, {{std::string(labels::kCorpusRoot),
                                                             *corpus_record.output(labels::kCorpusRoot)}},
                             spec.hash()),
                  options, "this transform is");

  const CorpusCommitment corpus = CorpusStageProof::deserialize(ws.blob(corpus_record.proof_digest)).commitment();
  BlindingSource bs = ws.blindings(chain.size());
  const TransformOutput out = transform_apply(corpus, spec, bs);
  const std::size_t c = std::min(options.challenges.value_or(config.c_transform), corpus.accepted.size());
  TransformStageProof proof{spec, transform_prove(corpus, out, spec, c), dataset_statistics(out.dataset)};
  ws.save_dataset(out.dataset);
  const StageRecord r =
      ws.commit(chain, StageType::kTransform, transform_commitments(proof), spec.hash(), proof.serialize());
  std::ostringstream text;
  text << out.dataset.size() << " records from " << corpus.accepted.size() << " rows, " << c << " rows challenged\n";
  return stage_result("transform", r, Json{{"records", out.dataset.size()}, {"challenges", c}}, text.str());
}

CommandResult cmd_train(const PipelineConfig& config, const CommandOptions& options) {
  const Workspace ws(config);
  const ChainLock lock(config.chain_log);
  const PipelineChain chain = ws.chain();
  const StageRecord& source = latest_with(chain, labels::kDatasetRoot, "run transform first");
  const Digest dataset_root = *source.output(labels::kDatasetRoot);
  const ModelSpec spec = load_model_spec(config);
  const CommittedDataset dataset = ws.load_dataset(dataset_root);
  BlindingSource bs = ws.blindings(chain.size());

  std::vector<LabeledCommitment> inputs{{std::string(labels::kDatasetRoot), dataset_root}};
  const StageType type = options.fine_tune ? StageType::kFineTune : StageType::kTrain;
  std::optional<TrainResult> result;
  if (options.fine_tune) {
    const Digest prior_root = *latest_with(chain, labels::kWeightsRoot, "run train first").output(labels::kWeightsRoot);
    inputs.push_back({std::string(labels::kWeightsRoot), prior_root});
    refuse_existing(has_record(chain, type, inputs, spec.hash()), options, "this fine-tuning is");
    result.emplace(fine_tune(dataset, spec, prior_root, ws.load_weights(prior_root), bs));
  } else {
    refuse_existing(has_record(chain, type, inputs, spec.hash()), options, "training on this dataset is");
    result.emplace(train(dataset, spec, WeightsOpening::fresh(ModelWeights::zeros(spec.dimension), bs), bs));
  }
  const std::size_t c = options.challenges.value_or(config.c_train);
  TrainStageProof proof{spec, prove_training(*result, dataset, spec, c, config.training_mode)};
  ws.save_weights(result->init);
  ws.save_weights(result->final);
  const StageRecord r =
      ws.commit(chain, type, train_commitments(proof, options.fine_tune), spec.hash(), proof.serialize());
  std::ostringstream text;
  text << spec.iterations << " iterations on " << dataset.size() << " records, " << proof.proof.iterations.size()
       << " iterations challenged\n";
  return stage_result(options.fine_tune ? "fine_tune" : "train", r,
                      Json{{"iterations", spec.iterations}, {"challenges", proof.proof.iterations.size()}},
                      text.str());
}

CommandResult cmd_evaluate(const PipelineConfig& config, const CommandOptions& options) {
  const Workspace ws(config);
  const ChainLock lock(config.chain_log);
  const PipelineChain chain = ws.chain();
  const Digest weights_root = *latest_with(chain, labels::kWeightsRoot, "run train first").output(labels::kWeightsRoot);
  const auto bench_path = options.benchmark ? options.benchmark : config.benchmark;
  if (!bench_path) throw Error(ErrorCode::kConfigInvalid, "no benchmark given (--benchmark or config 'benchmark')");
  const PublicDataset bench = PublicDataset::load(read_text(*bench_path));
  const ModelSpec spec = load_model_spec(config);
  const bool exists = std::any_of(chain.records().begin(), chain.records().end(), [&](const StageRecord& r) {
    return r.type == StageType::kEvaluate && r.input(labels::kWeightsRoot) &&
           *r.input(labels::kWeightsRoot) == weights_root && r.output(labels::kBenchmarkRoot) &&
           *r.output(labels::kBenchmarkRoot) == bench.root();
  });
  refuse_existing(exists, options, "this evaluation is");

  BlindingSource bs = ws.blindings(chain.size());
  EvaluationResult result = evaluate(spec.kind, ws.load_weights(weights_root), bench, config.group_column, bs);
  EvaluateStageProof proof{spec, result.report, bench.records_jsonl(), result.audit};
  const StageRecord r =
      ws.commit(chain, StageType::kEvaluate, evaluate_commitments(proof), spec.hash(), proof.serialize());

  Json groups = Json::array();
  std::ostringstream text;
  text << "accuracy " << result.report.accuracy_count << "/" << result.report.n << "\n";
  for (const GroupCount& g : result.report.groups) {
    groups.push_back(Json{{"value", g.value}, {"correct", g.correct}, {"total", g.total}});
    text << "  group " << FixedPoint::from_scaled(g.value).to_double() << ": " << g.correct << "/" << g.total << "\n";
  }
  return stage_result("evaluate", r,
                      Json{{"accuracy_count", result.report.accuracy_count}, {"n", result.report.n}, {"groups", groups}},
                      text.str());
}

CommandResult cmd_infer(const PipelineConfig& config, const CommandOptions& options) {
  const Workspace ws(config);
  const ChainLock lock(config.chain_log);
  const PipelineChain chain = ws.chain();
  const Digest weights_root = *latest_with(chain, labels::kWeightsRoot, "run train first").output(labels::kWeightsRoot);
  const Json input = parse_json(read_text(options.input));
  const Json& features = json_field(input, "features");
  if (!features.is_array()) throw Error(ErrorCode::kSchemaMismatch, "'features' must be an array of numbers");
  std::vector<FixedPoint> x;
  for (const Json& v : features) {
    if (!v.is_number()) throw Error(ErrorCode::kSchemaMismatch, "'features' must be an array of numbers");
    x.push_back(fp_encode(v.get<double>()));
  }
  const ModelSpec spec = load_model_spec(config);
  const WeightsOpening weights = ws.load_weights(weights_root);
  const InferenceMode mode = options.mode.value_or(config.inference_mode);
  BlindingSource bs = ws.blindings(chain.size());
  const InferenceRecord rec = infer(spec.kind, weights, x, bs);
  InferStageProof proof{spec, prove_inference(rec, weights, mode, options.challenges.value_or(config.c_infer), bs)};
  const StageCommitments commitments = infer_commitments(proof);
  const bool exists = std::any_of(chain.records().begin(), chain.records().end(), [&](const StageRecord& r) {
    return r.type == StageType::kInfer && r.outputs == commitments.outputs;
  });
  refuse_existing(exists, options, "this inference is");
  const StageRecord r = ws.commit(chain, StageType::kInfer, commitments, spec.hash(), proof.serialize());
  std::ostringstream text;
  text << "output " << rec.output.to_double() << " class " << (rec.predicted_class ? 1 : 0) << " ("
       << inference_mode_name(mode) << " proof)\n";
  return stage_result("infer", r,
                      Json{{"output_scaled", rec.output.scaled()},
                           {"class", rec.predicted_class ? 1 : 0},
                           {"mode", std::string(inference_mode_name(mode))}},
                      text.str());
}

CommandResult cmd_unlearn(const PipelineConfig& config, const CommandOptions& options) {
  const Workspace ws(config);
  const ChainLock lock(config.chain_log);
  const PipelineChain chain = ws.chain();
  const StageRecord& model = latest_with(chain, labels::kWeightsRoot, "run train first");
  Digest dataset_root, init_root;
  if (model.type == StageType::kUnlearn) {
    dataset_root = *model.output(labels::kDatasetRoot);
    init_root = *model.input(labels::kInitCommitment);
  } else if (model.type == StageType::kTrain || model.type == StageType::kFineTune) {
    dataset_root = *model.input(labels::kDatasetRoot);
    init_root = *model.output(labels::kInitCommitment);
  } else {
    missing("latest weights were not produced by training");
  }
  const CommittedDataset dataset = ws.load_dataset(dataset_root);
  Digest leaf;
  if (options.record.size() == 64) {
    leaf = Digest::from_hex(options.record);
  } else {
    std::size_t pos = 0;
    unsigned long long idx = 0;
    try {
      idx = std::stoull(options.record, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != options.record.size() || idx >= dataset.size()) {
      throw Error(ErrorCode::kRecordNotFound, "record '" + options.record + "' is neither a leaf nor a row index");
    }
    leaf = dataset.entries()[idx].leaf;
  }
  const ModelSpec spec = load_model_spec(config);
  BlindingSource bs = ws.blindings(chain.size());
  const UnlearnResult result = unlearn(dataset, leaf, spec, ws.load_weights(init_root), bs,
                                       options.challenges.value_or(config.c_train), config.training_mode);
  if (!verify_unlearning(result.proof, dataset_root, result.dataset.root(), spec, 1, init_root)) {
    throw Error(ErrorCode::kSchemaMismatch, "unlearning proof failed local verification");
  }
  ws.save_dataset(result.dataset);
  ws.save_weights(result.retrained.final);
  UnlearnStageProof proof{spec, result.proof};
  const StageRecord r =
      ws.commit(chain, StageType::kUnlearn, unlearn_commitments(proof), spec.hash(), proof.serialize());
  std::ostringstream text;
  text << "removed " << leaf.hex() << ", retrained on " << result.dataset.size() << " records\n";
  return stage_result("unlearn", r, Json{{"removed_leaf", leaf.hex()}, {"records", result.dataset.size()}},
                      text.str());
}

CommandResult cmd_verify(const PipelineConfig& config, const CommandOptions& options) {
  const Workspace ws(config);
  const std::string text = ws.log_text();
  if (text.empty()) missing("chain log " + config.chain_log.string() + " is empty");
  const ChainReport report = chain_verify_jsonl(text, ws.context(), options.stage);
  CommandResult res;
  res.ok = report.passed;
  res.report = Json{{"command", "verify"}, {"chain", report.to_json()}};
  res.text = report.to_text();
  return res;
}

CommandResult cmd_trace(const PipelineConfig& config, const CommandOptions& options) {
  const Workspace ws(config);
  CommandResult res;
  res.text = chain_trace(ws.chain(), options.label);
  res.report = Json{{"command", "trace"}, {"label", options.label}, {"tree", res.text}};
  return res;
}

namespace {

void emit(std::ostream& out, bool json, const CommandResult& r) {
  if (json) {
    Json j = r.report;
    j["report_version"] = 1;
    j["ok"] = r.ok;
    out << j.dump() << "\n";
  } else {
    out << r.text;
  }
}

void emit_error(std::ostream& out, std::ostream& err, bool json, const std::string& code, const std::string& msg) {
  if (json) {
    out << Json{{"report_version", 1}, {"ok", false}, {"error", {{"code", code}, {"message", msg}}}}.dump() << "\n";
  } else {
    err << "error: " << msg << "\n";
  }
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pipeline_attest: commitments and proofs for every stage of an ML pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  bool json = false;
  app.add_option("--config", config_path, "Pipeline config (JSON)");
  app.add_flag("--json", json, "Machine-readable report");

  CommandOptions o;
  std::string mode;
  bool all = false;
  auto add_force = [&](CLI::App* s) { s->add_flag("--force-new", o.force_new, "Append even if an equal stage exists"); };
  auto add_challenges = [&](CLI::App* s) {
    s->add_option("--challenges", o.challenges, "Challenge count")->check(CLI::PositiveNumber);
  };

  CLI::App* ingest = app.add_subcommand("ingest", "Verify manifests and commit the corpus");
  add_force(ingest);
  CLI::App* transform = app.add_subcommand("transform", "Apply the transform spec and prove it");
  add_force(transform);
  add_challenges(transform);
  CLI::App* train_cmd = app.add_subcommand("train", "Train (or fine-tune) and prove it");
  add_force(train_cmd);
  add_challenges(train_cmd);
  train_cmd->add_flag("--fine-tune", o.fine_tune, "Continue from the latest committed weights");
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Evaluate on a public benchmark");
  add_force(eval_cmd);
  eval_cmd->add_option("--benchmark", o.benchmark, "Benchmark JSON-lines file");
  CLI::App* infer_cmd = app.add_subcommand("infer", "Run and prove one inference");
  add_force(infer_cmd);
  add_challenges(infer_cmd);
  infer_cmd->add_option("--input", o.input, "JSON file {\"features\":[...]}")->required();
  infer_cmd->add_option("--mode", mode, "audit or spotcheck")->check(CLI::IsMember({"audit", "spotcheck"}));
  CLI::App* unlearn_cmd = app.add_subcommand("unlearn", "Remove one record and retrain");
  add_force(unlearn_cmd);
  add_challenges(unlearn_cmd);
  unlearn_cmd->add_option("--record", o.record, "Leaf digest (hex) or sorted row index")->required();
  CLI::App* verify_cmd = app.add_subcommand("verify", "Verify the chain");
  auto* stage_opt = verify_cmd->add_option("--stage", o.stage, "Run the proof of one record only");
  verify_cmd->add_flag("--all", all, "Verify every record (default)")->excludes(stage_opt);
  CLI::App* trace_cmd = app.add_subcommand("trace", "Print the provenance tree of an output");
  trace_cmd->add_option("label", o.label, "label, label=<hex> or <hex>")->required();

  SyntheticOptions synth;
  std::string demo_out;
  CLI::App* demo = app.add_subcommand("demo", "Write a synthetic, signed workspace");
  demo->add_option("--out", demo_out, "Target directory")->required();
  demo->add_option("--rows", synth.rows, "Corpus rows");
  demo->add_option("--dim", synth.dimension, "Feature count");
  demo->add_option("--benchmark-rows", synth.benchmark_rows, "Benchmark rows");
  demo->add_option("--seed", synth.seed, "Generator and blinding seed");
  demo->add_option("--deny-every", synth.deny_every, "Mark every k-th asset ai_training=deny");
  std::string keygen_out;
  CLI::App* keygen = app.add_subcommand("keygen", "Generate an Ed25519 signing key");
  keygen->add_option("--out", keygen_out, "Directory for signer.seed and signer.pub")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (demo->parsed()) {
      write_demo_workspace(demo_out, synth);
      CommandResult r;
      r.report = Json{{"command", "demo"}, {"config", (fs::path(demo_out) / "config.json").string()}};
      r.text = "wrote demo workspace to " + demo_out + "\n";
      emit(out, json, r);
      return 0;
    }
    if (keygen->parsed()) {
      const SigningKey key = SigningKey::generate();
      fs::create_directories(keygen_out);
      write_text(fs::path(keygen_out) / "signer.seed", hex_encode(key.seed()) + "\n", true);
      write_text(fs::path(keygen_out) / "signer.pub", hex_encode(key.public_key()) + "\n");
      CommandResult r;
      r.report = Json{{"command", "keygen"}, {"public_key", hex_encode(key.public_key())}};
      r.text = hex_encode(key.public_key()) + "\n";
      emit(out, json, r);
      return 0;
    }
    if (config_path.empty()) throw Error(ErrorCode::kConfigInvalid, "--config is required");
    const PipelineConfig config = PipelineConfig::load(config_path);
    if (!mode.empty()) o.mode = parse_inference_mode(mode);

    CommandResult r;
    if (ingest->parsed()) r = cmd_ingest(config, o);
    else if (transform->parsed()) r = cmd_transform(config, o);
    else if (train_cmd->parsed()) r = cmd_train(config, o);
    else if (eval_cmd->parsed()) r = cmd_evaluate(config, o);
    else if (infer_cmd->parsed()) r = cmd_infer(config, o);
    else if (unlearn_cmd->parsed()) r = cmd_unlearn(config, o);
    else if (verify_cmd->parsed()) r = cmd_verify(config, o);
    else r = cmd_trace(config, o);
    emit(out, json, r);
    return r.ok ? 0 : 1;
  } catch (const Error& e) {
    emit_error(out, err, json, std::string(error_code_name(e.code())), e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error(out, err, json, "Internal", e.what());
    return 2;
  }
}

}  // namespace attest
