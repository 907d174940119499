// Copyright 2026 The Paraflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "paraflow/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "paraflow/bridging.hpp"
#include "paraflow/checkpoint.hpp"
#include "paraflow/corpus.hpp"
#include "paraflow/discourse.hpp"
#include "paraflow/error.hpp"
#include "paraflow/hash.hpp"
#include "paraflow/manifest.hpp"
#include "paraflow/metrics.hpp"
#include "paraflow/models.hpp"
#include "paraflow/synth.hpp"
#include "paraflow/trainer.hpp"

namespace paraflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("io", "cannot read " + path);
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("io", "cannot write " + path.string());
  return out;
}

RunManifest start_manifest(std::string command, std::uint64_t seed) {
  RunManifest m;
  m.command = std::move(command);
  m.seed = seed;
  m.version = version_string();
  m.started_at = utc_now();
  return m;
}

// Sidecars for every output, written once all outputs exist.
void seal(RunManifest& m) {
  m.finished_at = utc_now();
  for (const auto& o : m.outputs) write_sidecar(o, m);
}

std::vector<Paragraph> load_corpus(const std::string& path) {
  auto in = open_in(path);
  return read_corpus(in);
}

Split load_split(const std::string& path, const std::vector<Paragraph>& corpus) {
  auto in = open_in(path);
  return read_split_manifest(in, corpus);
}

std::uint64_t split_seed(const std::string& path) {
  auto in = open_in(path);
  try {
    return json::parse(in).at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError("split", "unreadable split manifest " + path + ": " + e.what());
  }
}

// ------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string input;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::string domain = "synthetic";
  int vocab_size = kDefaultVocabSize;
  std::string id_prefix = "p";
};

void cmd_preprocess(const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
  auto in = open_in(a.input);
  const auto blocks = read_raw_blocks(in);
  const Domain domain = parse_domain(a.domain);
  auto m = start_manifest("preprocess", a.seed);
  m.inputs = {a.input};
  if (blocks.empty()) err << "warning: no paragraphs in " << a.input << '\n';

  std::vector<Paragraph> kept;
  std::vector<std::pair<std::string, std::string>> rejected;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    std::ostringstream id;
    id << a.id_prefix << std::setw(5) << std::setfill('0') << i + 1;
    auto r = filter_paragraph(blocks[i], default_tokenize, id.str(), domain);
    if (r.accepted()) {
      kept.push_back(std::move(*r.paragraph));
    } else {
      rejected.emplace_back(id.str(), std::string(reason_code(*r.reason)));
    }
  }
  std::vector<std::string> removed;
  kept = dedupe(std::move(kept), &removed);
  for (auto& id : removed) rejected.emplace_back(std::move(id), std::string(reason_code(RejectReason::kDuplicate)));

  Split split;
  if (kept.size() >= kMinSplitParagraphs) {
    split = split_corpus(kept, SplitSpec{a.seed});
  } else {
    if (!kept.empty()) {
      err << "warning: " << kept.size() << " paragraphs is below the split minimum of "
          << kMinSplitParagraphs << "; all go to train\n";
    }
    split.train = kept;
  }
  const Vocab vocab = split.train.empty() ? Vocab() : build_vocab(split.train, a.vocab_size);

  const fs::path dir(a.out_dir);
  const auto corpus_path = dir / "corpus.jsonl";
  const auto split_path = dir / "split.json";
  const auto vocab_path = dir / "vocab.txt";
  const auto log_path = dir / "rejections.json";
  {
    auto o = open_out(corpus_path);
    write_corpus(o, kept);
  }
  {
    auto o = open_out(split_path);
    write_split_manifest(o, split, a.seed);
  }
  {
    auto o = open_out(vocab_path);
    write_vocab(o, vocab);
  }
  json counts = json::object();
  for (auto r : {RejectReason::kParagraphLength, RejectReason::kTokenizeError,
                 RejectReason::kSentenceLength, RejectReason::kAdjacentIdentical,
                 RejectReason::kCapsEnding, RejectReason::kNoEndMark, RejectReason::kDuplicate}) {
    counts[std::string(reason_code(r))] = 0;
  }
  json rows = json::array();
  for (const auto& [id, reason] : rejected) {
    counts[reason] = counts[reason].get<int>() + 1;
    rows.push_back({{"id", id}, {"reason", reason}});
  }
  {
    auto o = open_out(log_path);
    o << json{{"total", blocks.size()}, {"kept", kept.size()}, {"counts", counts}, {"rejected", rows}}
             .dump(2)
      << '\n';
  }
  m.outputs = {corpus_path.string(), split_path.string(), vocab_path.string(), log_path.string()};
  seal(m);

  out << "kept " << kept.size() << " of " << blocks.size() << " paragraphs (train "
      << split.train.size() << ", valid " << split.valid.size() << ", test " << split.test.size()
      << ")\n";
  for (const auto& [reason, n] : counts.items()) {
    if (n.get<int>() > 0) out << "  rejected " << reason << ": " << n.get<int>() << '\n';
  }
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::string out_dir;
  int paragraphs = 20;
  std::uint64_t seed = 1;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto corpus = synth::synthesize({a.paragraphs, a.seed});
  auto m = start_manifest("synth", a.seed);
  const fs::path dir(a.out_dir);
  const auto raw_path = dir / "raw.txt";
  const auto corpus_path = dir / "corpus.jsonl";
  const auto split_path = dir / "split.json";
  const auto vocab_path = dir / "vocab.txt";
  const auto trees_path = dir / "trees.txt";
  {
    auto o = open_out(raw_path);
    synth::write_raw(o, corpus.paragraphs);
  }
  {
    auto o = open_out(corpus_path);
    write_corpus(o, corpus.paragraphs);
  }
  Split split;
  if (corpus.paragraphs.size() >= kMinSplitParagraphs) {
    split = split_corpus(corpus.paragraphs, SplitSpec{a.seed});
  } else {
    split.train = corpus.paragraphs;
  }
  {
    auto o = open_out(split_path);
    write_split_manifest(o, split, a.seed);
  }
  {
    auto o = open_out(vocab_path);
    write_vocab(o, build_vocab(split.train));
  }
  {
    auto o = open_out(trees_path);
    discourse::write_tree_file(o, corpus.trees);
  }
  m.outputs = {raw_path.string(), corpus_path.string(), split_path.string(), vocab_path.string(),
               trees_path.string()};
  seal(m);
  out << "wrote " << corpus.paragraphs.size() << " synthetic paragraphs to " << a.out_dir << '\n';
}

// ----------------------------------------------------------- trees-ingest

struct TreesArgs {
  std::string corpus;
  std::string trees;
  bool stub = false;
  std::string split;
  std::string out_dir;
  std::uint64_t seed = 1;
};

void cmd_trees_ingest(const TreesArgs& a, std::ostream& out) {
  if (a.trees.empty() == !a.stub) throw Error("usage", "give exactly one of --trees or --stub");
  const auto paragraphs = load_corpus(a.corpus);
  auto m = start_manifest("trees-ingest", a.seed);
  m.inputs = {a.corpus};

  std::map<std::string, discourse::RstTree> tree_map;
  std::vector<std::string> unparsed;
  if (a.stub) {
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
      tree_map.emplace(paragraphs[i].id, discourse::stub_parse(paragraphs[i], a.seed + i));
    }
  } else {
    auto in = open_in(a.trees);
    tree_map = discourse::read_tree_file(in, &unparsed);
    m.inputs.push_back(a.trees);
  }
  auto attached = discourse::attach_trees(paragraphs, tree_map);
  std::set<std::string> dropped(attached.unparsed.begin(), attached.unparsed.end());

  std::set<std::string> train_ids;
  Split split;
  const bool has_split = !a.split.empty();
  if (has_split) {
    m.inputs.push_back(a.split);
    const auto full = load_split(a.split, paragraphs);
    auto keep = [&](const std::vector<Paragraph>& part) {
      std::vector<Paragraph> r;
      for (const auto& p : part) {
        if (!dropped.contains(p.id)) r.push_back(p);
      }
      return r;
    };
    split = {keep(full.train), keep(full.valid), keep(full.test)};
    for (const auto& p : split.train) train_ids.insert(p.id);
  }
  std::vector<discourse::RstTree> inventory_trees;
  for (const auto& [id, tree] : attached.trees) {
    if (!has_split || train_ids.contains(id)) inventory_trees.push_back(tree);
  }
  const auto inventory = discourse::build_inventory(inventory_trees);

  const fs::path dir(a.out_dir);
  const auto corpus_path = dir / "corpus.jsonl";
  const auto trees_path = dir / "trees.txt";
  const auto relations_path = dir / "relations.txt";
  const auto unparsed_path = dir / "unparsed.txt";
  {
    auto o = open_out(corpus_path);
    write_corpus(o, attached.kept);
  }
  {
    auto o = open_out(trees_path);
    discourse::write_tree_file(o, attached.trees);
  }
  {
    auto o = open_out(relations_path);
    discourse::write_inventory(o, inventory);
  }
  {
    auto o = open_out(unparsed_path);
    for (const auto& id : attached.unparsed) o << id << '\t' << reason_code(RejectReason::kUnparsed) << '\n';
  }
  m.outputs = {corpus_path.string(), trees_path.string(), relations_path.string(),
               unparsed_path.string()};
  if (has_split) {
    const auto split_path = dir / "split.json";
    auto o = open_out(split_path);
    write_split_manifest(o, split, split_seed(a.split));
    o.close();
    m.outputs.push_back(split_path.string());
  }
  seal(m);
  out << "attached " << attached.kept.size() << " trees, dropped " << attached.unparsed.size()
      << " unparsed paragraphs, " << inventory.size() << " labels\n";
}


// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string config;
  std::map<std::string, std::string> model_flags;
  std::map<std::string, std::string> paths;
};

const std::vector<std::string> kPathKeys = {"corpus",    "split", "vocab_file", "trees",
                                            "relations", "checkpoint", "log", "embeddings"};

std::string path_of(const std::map<std::string, std::string>& paths, const std::string& key) {
  const auto it = paths.find(key);
  return it == paths.end() ? std::string() : it->second;
}

std::vector<models::EncodedParagraph> encode_all(const std::vector<Paragraph>& ps,
                                                 const Vocab& vocab) {
  std::vector<models::EncodedParagraph> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(models::encode_paragraph(p, vocab));
  return out;
}

void attach_labels(std::vector<models::EncodedParagraph>& encoded,
                   const std::vector<Paragraph>& paragraphs,
                   const std::map<std::string, discourse::RstTree>& trees,
                   const RelationInventory& inventory, discourse::LabelMode mode) {
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    const auto it = trees.find(paragraphs[i].id);
    if (it == trees.end()) {
      throw DataError("missing-tree", "no discourse tree for paragraph " + paragraphs[i].id +
                                          " (run trees-ingest first)");
    }
    encoded[i].labels = discourse::project_labels(paragraphs[i], it->second,
                                                  discourse::flatten(it->second), inventory, mode);
  }
}

void cmd_train(const TrainArgs& a, std::ostream& out) {
  models::ModelConfig config;
  std::map<std::string, std::string> paths;
  if (!a.config.empty()) {
    auto in = open_in(a.config);
    std::map<std::string, std::string> extra;
    config = models::parse_config(in, &extra);
    for (const auto& [k, v] : extra) {
      if (std::find(kPathKeys.begin(), kPathKeys.end(), k) == kPathKeys.end()) {
        throw Error("config", "unknown config key '" + k + "'");
      }
      paths[k] = v;
    }
  }
  for (const auto& [k, v] : a.model_flags) models::apply_config_value(config, k, v);
  for (const auto& [k, v] : a.paths) paths[k] = v;
  models::validate(config);

  const auto corpus_path = path_of(paths, "corpus");
  const auto checkpoint_path = path_of(paths, "checkpoint");
  if (corpus_path.empty()) throw Error("usage", "train needs a corpus");
  if (checkpoint_path.empty()) throw Error("usage", "train needs a checkpoint path");
  const bool disc = config.variant == models::Variant::kFlowDisc;
  if (disc && path_of(paths, "trees").empty()) {
    throw DataError("missing-trees", "flow_disc needs a discourse tree file (trees)");
  }

  auto m = start_manifest("train", config.seed);
  m.config_path = a.config;
  const auto corpus = load_corpus(corpus_path);
  m.inputs.push_back(corpus_path);
  Split split;
  if (const auto sp = path_of(paths, "split"); !sp.empty()) {
    split = load_split(sp, corpus);
    m.inputs.push_back(sp);
  } else if (corpus.size() >= kMinSplitParagraphs) {
    split = split_corpus(corpus, SplitSpec{config.seed});
  } else {
    split.train = corpus;
  }
  if (split.train.empty()) throw DataError("no-data", "training split is empty");

  Vocab vocab;
  if (const auto vp = path_of(paths, "vocab_file"); !vp.empty()) {
    auto in = open_in(vp);
    vocab = read_vocab(in);
    m.inputs.push_back(vp);
  } else {
    vocab = build_vocab(split.train, config.vocab);
  }

  auto train_set = encode_all(split.train, vocab);
  auto valid_set = encode_all(split.valid, vocab);
  RelationInventory inventory;
  if (disc) {
    const auto tp = path_of(paths, "trees");
    auto in = open_in(tp);
    const auto trees = discourse::read_tree_file(in);
    m.inputs.push_back(tp);
    if (const auto rp = path_of(paths, "relations"); !rp.empty()) {
      auto rin = open_in(rp);
      inventory = discourse::read_inventory(rin);
      m.inputs.push_back(rp);
    } else {
      std::vector<discourse::RstTree> train_trees;
      for (const auto& p : split.train) {
        if (const auto it = trees.find(p.id); it != trees.end()) train_trees.push_back(it->second);
      }
      inventory = discourse::build_inventory(train_trees);
    }
    attach_labels(train_set, split.train, trees, inventory, discourse::LabelMode::kTrain);
    attach_labels(valid_set, split.valid, trees, inventory, discourse::LabelMode::kEval);
  }

  std::optional<EmbeddingTable> embeddings;
  if (const auto ep = path_of(paths, "embeddings"); !ep.empty()) {
    auto in = open_in(ep);
    embeddings = load_embeddings(in, vocab, config.embed, config.seed);
    m.inputs.push_back(ep);
    out << "loaded " << embeddings->loaded << " pretrained vectors\n";
  }
  auto model = models::make_model(config, vocab.size(), inventory.size(),
                                   embeddings ? &*embeddings : nullptr);

  const fs::path ck_path(checkpoint_path);
  const fs::path log_path = path_of(paths, "log").empty() ? fs::path(checkpoint_path + ".log.jsonl")
                                                          : fs::path(path_of(paths, "log"));
  auto log = open_out(log_path);
  train::TrainOptions options;
  options.log = &log;
  const auto state = train::train(*model, train_set, valid_set, options);
  log.close();
  if (ck_path.has_parent_path()) fs::create_directories(ck_path.parent_path());
  save_checkpoint(ck_path, *model, vocab, inventory);
  m.outputs = {ck_path.string(), log_path.string()};
  seal(m);

  out << "variant " << models::variant_name(config.variant) << ", "
      << model->params().scalar_count() << " parameters, " << state.epoch << " epochs\n";
  if (state.epoch > 0) {
    const auto& best = state.history[static_cast<std::size_t>(state.best_epoch > 0 ? state.best_epoch - 1 : 0)];
    out << "best epoch " << state.best_epoch << ": train ppl " << std::exp(best.train_nll)
        << ", valid ppl " << std::exp(best.valid_nll) << '\n';
  }
  out << "checkpoint " << ck_path.string() << '\n';
}

// ----------------------------------------------------------------- bridge

struct BridgeArgs {
  std::string checkpoint;
  std::string corpus;
  std::string split;
  std::string part = "test";
  std::string examples;
  std::string out;
  std::string variant;
  std::string vocab_file;
  int max_len = 0;
};

std::vector<Paragraph> select_part(const std::vector<Paragraph>& corpus, const std::string& split_path,
                                   const std::string& part) {
  if (part == "all") return corpus;
  if (split_path.empty()) throw Error("usage", "--part " + part + " needs --split");
  const auto split = load_split(split_path, corpus);
  if (part == "train") return split.train;
  if (part == "valid") return split.valid;
  if (part == "test") return split.test;
  throw Error("usage", "--part must be train, valid, test or all");
}

void cmd_bridge(const BridgeArgs& a, std::ostream& out) {
  const auto ck = load_checkpoint(a.checkpoint);
  auto m = start_manifest("bridge", ck.model->config().seed);
  m.inputs = {a.checkpoint};
  std::vector<bridging::BridgingExample> examples;
  if (!a.corpus.empty()) {
    examples = bridging::make_examples(select_part(load_corpus(a.corpus), a.split, a.part));
    auto em = start_manifest("bridge", ck.model->config().seed);
    em.inputs = {a.corpus};
    if (!a.split.empty()) em.inputs.push_back(a.split);
    em.outputs = {a.examples};
    {
      auto o = open_out(a.examples);
      bridging::write_examples(o, examples);
    }
    seal(em);
    m.inputs.push_back(a.corpus);
  } else {
    auto in = open_in(a.examples);
    examples = bridging::read_examples(in);
  }
  m.inputs.push_back(a.examples);

  bridging::BridgeOptions options;
  options.max_len = a.max_len > 0 ? a.max_len : ck.model->config().max_sentence_len;
  if (!a.variant.empty()) options.expected_variant = models::parse_variant(a.variant);
  if (!a.vocab_file.empty()) {
    auto in = open_in(a.vocab_file);
    options.expected_vocab_hash = read_vocab(in).fingerprint();
  }
  const auto generations = bridging::run_bridging(ck, examples, options);
  {
    auto o = open_out(a.out);
    bridging::write_generations(o, generations);
  }
  m.upstream["examples"] = to_hex(file_hash(a.examples));
  m.upstream["checkpoint"] = to_hex(file_hash(a.checkpoint));
  m.outputs = {a.out};
  seal(m);
  out << "generated middles for " << generations.size() << " examples\n";
}

// ------------------------------------------------------------------- eval

struct EvalArgs {
  std::string generations;
  std::string examples;
  std::string checkpoint;
  std::string vocab_file;
  std::string embeddings;
  int embed_dim = kDefaultEmbeddingDim;
  std::uint64_t seed = 1;
  std::string ve_mode = "avg";
  std::string out;
  std::string csv;
};

void cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<bridging::Generation> generations;
  {
    auto in = open_in(a.generations);
    generations = bridging::read_generations(in);
  }
  if (generations.empty()) throw DataError("no-data", "no generations in " + a.generations);
  std::vector<bridging::BridgingExample> examples;
  {
    auto in = open_in(a.examples);
    examples = bridging::read_examples(in);
  }
  const auto sidecar = read_sidecar(a.generations);
  if (!sidecar) {
    err << "warning: " << a.generations << " has no manifest; provenance not checked\n";
  } else if (const auto it = sidecar->upstream.find("examples"); it != sidecar->upstream.end()) {
    const auto actual = to_hex(file_hash(a.examples));
    if (it->second != actual) {
      throw DataError("manifest-mismatch", "generations were produced from examples with hash " +
                                               it->second + " but " + a.examples + " hashes to " +
                                               actual);
    }
  }

  Vocab vocab;
  if (!a.vocab_file.empty()) {
    auto in = open_in(a.vocab_file);
    vocab = read_vocab(in);
  } else if (!a.checkpoint.empty()) {
    vocab = load_checkpoint(a.checkpoint).vocab;
  } else {
    throw Error("usage", "eval needs --vocab-file or --checkpoint for the embedding vocabulary");
  }
  EmbeddingTable table;
  if (!a.embeddings.empty()) {
    auto in = open_in(a.embeddings);
    table = load_embeddings(in, vocab, a.embed_dim, a.seed);
  } else {
    table = random_embeddings(vocab, a.embed_dim, a.seed);
  }
  const auto report = metrics::score_run(generations, examples, vocab, table,
                                         metrics::parse_ve_mode(a.ve_mode));
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  auto m = start_manifest("eval", a.seed);
  m.inputs = {a.generations, a.examples};
  m.upstream["generations"] = to_hex(file_hash(a.generations));
  m.upstream["examples"] = to_hex(file_hash(a.examples));
  {
    auto o = open_out(a.out);
    metrics::write_report_json(o, report);
  }
  m.outputs = {a.out};
  if (!a.csv.empty()) {
    auto o = open_out(a.csv);
    metrics::write_report_csv(o, report);
    o.close();
    m.outputs.push_back(a.csv);
  }
  seal(m);
  out << std::fixed << std::setprecision(4) << "examples " << report.overall.count << "  METEOR "
      << report.overall.meteor << "  VE " << report.overall.ve << '\n';
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> runs;
  std::vector<std::string> deltas;
  std::string out_dir;
};

std::vector<std::pair<std::string, metrics::MetricReport>> load_named(
    const std::vector<std::string>& specs) {
  std::vector<std::pair<std::string, metrics::MetricReport>> out;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw Error("usage", "expected NAME=REPORT.json, got '" + s + "'");
    }
    auto in = open_in(s.substr(eq + 1));
    auto r = metrics::read_report_json(in);
    if (r.overall.count == 0 || r.per_example.empty()) {
      throw DataError("no-data", "report " + s.substr(eq + 1) + " has no scored examples");
    }
    out.emplace_back(s.substr(0, eq), std::move(r));
  }
  return out;
}

std::string cell(const metrics::Aggregate* a, bool meteor) {
  if (!a || a->count == 0) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * (meteor ? a->meteor : a->ve);
  return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void cmd_report(const ReportArgs& a, std::ostream& out) {
  if (a.runs.empty() && a.deltas.empty()) throw DataError("no-data", "report needs --run or --delta inputs");
  const auto runs = load_named(a.runs);
  const auto deltas = load_named(a.deltas);

  std::vector<std::string> domains;
  for (auto d : {Domain::kPapers, Domain::kScifi, Domain::kFantasy, Domain::kSynthetic}) {
    const std::string name(domain_name(d));
    for (const auto& [_, r] : runs) {
      if (r.by_domain.contains(name)) {
        domains.push_back(name);
        break;
      }
    }
  }
  auto find = [](const auto& map, const auto& key) -> const metrics::Aggregate* {
    const auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };

  std::ostringstream text;
  std::ostringstream table2_csv, table3_csv, lengths_csv;
  table2_csv << "model,domain,meteor,ve,count\n";
  table3_csv << "delta,meteor,ve,count\n";
  lengths_csv << "model,length,meteor,ve,count\n";
  table2_csv.precision(17);
  table3_csv.precision(17);
  lengths_csv.precision(17);
  constexpr std::size_t kName = 14, kCell = 8;

  if (!runs.empty()) {
    text << "Bridging by domain (scores x100)\n" << pad("", kName);
    for (const auto& d : domains) text << pad(d, 2 * kCell);
    text << '\n' << pad("", kName);
    for (std::size_t i = 0; i < domains.size(); ++i) text << pad("M", kCell) << pad("VE", kCell);
    text << '\n';
    for (const auto& [name, r] : runs) {
      text << pad(name, kName);
      for (const auto& d : domains) {
        const auto* agg = find(r.by_domain, d);
        text << pad(cell(agg, true), kCell) << pad(cell(agg, false), kCell);
        if (agg) table2_csv << name << ',' << d << ',' << agg->meteor << ',' << agg->ve << ',' << agg->count << '\n';
      }
      text << '\n';
    }
    text << "\nBridging by paragraph length (METEOR / VE x100)\n" << pad("", kName);
    for (int len = kMinSentences; len <= kMaxSentences; ++len) text << pad(std::to_string(len), 2 * kCell);
    text << '\n';
    for (const auto& [name, r] : runs) {
      text << pad(name, kName);
      for (int len = kMinSentences; len <= kMaxSentences; ++len) {
        const auto* agg = find(r.by_length, len);
        text << pad(cell(agg, true), kCell) << pad(cell(agg, false), kCell);
        // Every bucket gets a row; empty buckets leave the scores blank.
        lengths_csv << name << ',' << len << ',';
        if (agg) {
          lengths_csv << agg->meteor << ',' << agg->ve << ',' << agg->count << '\n';
        } else {
          lengths_csv << ",,0\n";
        }
      }
      text << '\n';
    }
  }
  if (!deltas.empty()) {
    if (!runs.empty()) text << '\n';
    text << "Delta functions (scores x100)\n"
         << pad("", kName) << pad("M", kCell) << pad("VE", kCell) << '\n';
    for (const auto& [name, r] : deltas) {
      text << pad(name, kName) << pad(cell(&r.overall, true), kCell)
           << pad(cell(&r.overall, false), kCell) << '\n';
      table3_csv << name << ',' << r.overall.meteor << ',' << r.overall.ve << ',' << r.overall.count << '\n';
    }
  }

  const fs::path dir(a.out_dir);
  RunManifest m = start_manifest("report", 0);
  for (const auto& s : a.runs) m.inputs.push_back(s.substr(s.find('=') + 1));
  for (const auto& s : a.deltas) m.inputs.push_back(s.substr(s.find('=') + 1));
  auto write = [&](const fs::path& p, const std::string& content) {
    auto o = open_out(p);
    o << content;
    o.close();
    m.outputs.push_back(p.string());
  };
  write(dir / "report.txt", text.str());
  if (!runs.empty()) {
    write(dir / "table_domains.csv", table2_csv.str());
    write(dir / "lengths.csv", lengths_csv.str());
  }
  if (!deltas.empty()) write(dir / "table_delta.csv", table3_csv.str());
  seal(m);
  out << text.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Paragraph bridging with discourse and delta flow models", "paraflow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version_string()));

  PreprocessArgs pre;
  auto* sub_pre = app.add_subcommand("preprocess", "Filter, split and index a raw corpus");
  sub_pre->add_option("--input", pre.input, "Raw paragraphs, blank-line separated")->required();
  sub_pre->add_option("--out", pre.out_dir, "Output directory")->required();
  sub_pre->add_option("--seed", pre.seed, "Split seed");
  sub_pre->add_option("--domain", pre.domain, "papers, scifi, fantasy or synthetic");
  sub_pre->add_option("--vocab-size", pre.vocab_size, "Maximum vocabulary size");
  sub_pre->add_option("--id-prefix", pre.id_prefix, "Paragraph id prefix");

  SynthArgs syn;
  auto* sub_syn = app.add_subcommand("synth", "Write the bundled synthetic corpus");
  sub_syn->add_option("--out", syn.out_dir, "Output directory")->required();
  sub_syn->add_option("--paragraphs", syn.paragraphs, "Number of paragraphs");
  sub_syn->add_option("--seed", syn.seed, "Generator and split seed");

  TreesArgs trees;
  auto* sub_trees = app.add_subcommand("trees-ingest", "Attach discourse trees to a corpus");
  sub_trees->add_option("--corpus", trees.corpus, "Corpus JSONL")->required();
  sub_trees->add_option("--trees", trees.trees, "Tree file (id TAB bracketed tree)");
  sub_trees->add_flag("--stub", trees.stub, "Use right-branching stub trees");
  sub_trees->add_option("--split", trees.split, "Split manifest; relations come from train only");
  sub_trees->add_option("--out", trees.out_dir, "Output directory")->required();
  sub_trees->add_option("--seed", trees.seed, "Stub relation seed");

  TrainArgs tr;
  auto* sub_train = app.add_subcommand("train", "Train a model");
  sub_train->add_option("--config", tr.config, "Flat key = value config file");
  const auto defaults = models::config_to_map(models::ModelConfig{});
  std::map<std::string, std::string> flag_values;
  for (const auto& [key, _] : defaults) {
    sub_train->add_option("--" + key, flag_values[key], "ModelConfig " + key);
  }
  std::map<std::string, std::string> path_values;
  for (const auto& key : kPathKeys) {
    sub_train->add_option("--" + key, path_values[key], "Path: " + key);
  }

  BridgeArgs br;
  auto* sub_bridge = app.add_subcommand("bridge", "Generate middle sentences");
  sub_bridge->add_option("--checkpoint", br.checkpoint, "Model checkpoint")->required();
  sub_bridge->add_option("--corpus", br.corpus, "Corpus to build examples from");
  sub_bridge->add_option("--split", br.split, "Split manifest");
  sub_bridge->add_option("--part", br.part, "train, valid, test or all");
  sub_bridge->add_option("--examples", br.examples, "Examples JSONL (written with --corpus)")->required();
  sub_bridge->add_option("--out", br.out, "Generations JSONL")->required();
  sub_bridge->add_option("--variant", br.variant, "Expected checkpoint variant");
  sub_bridge->add_option("--vocab-file", br.vocab_file, "Expected vocabulary");
  sub_bridge->add_option("--max-len", br.max_len, "Token cap per sentence");

  EvalArgs ev;
  auto* sub_eval = app.add_subcommand("eval", "Score generations");
  sub_eval->add_option("--generations", ev.generations, "Generations JSONL")->required();
  sub_eval->add_option("--examples", ev.examples, "Examples JSONL")->required();
  sub_eval->add_option("--checkpoint", ev.checkpoint, "Checkpoint supplying the vocabulary");
  sub_eval->add_option("--vocab-file", ev.vocab_file, "Vocabulary file");
  sub_eval->add_option("--embeddings", ev.embeddings, "Text embedding file for VE");
  sub_eval->add_option("--embed-dim", ev.embed_dim, "Embedding width");
  sub_eval->add_option("--seed", ev.seed, "Seed for vectors missing from the file");
  sub_eval->add_option("--ve-mode", ev.ve_mode, "avg or extrema");
  sub_eval->add_option("--out", ev.out, "Report JSON")->required();
  sub_eval->add_option("--csv", ev.csv, "Per-example CSV");

  ReportArgs rep;
  auto* sub_report = app.add_subcommand("report", "Render result tables");
  sub_report->add_option("--run", rep.runs, "NAME=report.json, one row per model");
  sub_report->add_option("--delta", rep.deltas, "KIND=report.json, one row per delta function");
  sub_report->add_option("--out", rep.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sub_pre->parsed()) cmd_preprocess(pre, out, err);
    if (sub_syn->parsed()) cmd_synth(syn, out);
    if (sub_trees->parsed()) cmd_trees_ingest(trees, out);
    if (sub_train->parsed()) {
      for (const auto& [k, v] : flag_values) {
        if (sub_train->count("--" + k) > 0) tr.model_flags[k] = v;
      }
      for (const auto& [k, v] : path_values) {
        if (sub_train->count("--" + k) > 0) tr.paths[k] = v;
      }
      cmd_train(tr, out);
    }
    if (sub_bridge->parsed()) cmd_bridge(br, out);
    if (sub_eval->parsed()) cmd_eval(ev, out, err);
    if (sub_report->parsed()) cmd_report(rep, out);
  } catch (const DivergedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const DataError& e) {
    err << "error (" << e.code() << "): " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    err << "error (" << e.code() << "): " << e.what() << '\n';
    return e.code() == "usage" || e.code() == "config" ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace paraflow::cli
