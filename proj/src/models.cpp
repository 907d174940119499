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

#include "paraflow/models.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "paraflow/error.hpp"

namespace paraflow::models {

using ad::Matrix;
using seq::LstmCell;
using seq::LstmState;

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kS2S: return "s2s";
    case Variant::kHS2S: return "hs2s";
    case Variant::kFlowDisc: return "flow_disc";
    case Variant::kFlowDelta: return "flow_delta";
  }
  return "s2s";
}

Variant parse_variant(std::string_view name) {
  if (name == "s2s") return Variant::kS2S;
  if (name == "hs2s") return Variant::kHS2S;
  if (name == "flow_disc") return Variant::kFlowDisc;
  if (name == "flow_delta") return Variant::kFlowDelta;
  throw Error("config", "unknown variant '" + std::string(name) + "'");
}

void validate(const ModelConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error("config", std::string("invalid config: ") + what);
  };
  require(c.batch > 0, "batch must be positive");
  require(c.max_sentence_len > 0, "max_sentence_len must be positive");
  require(c.embed > 0, "embed must be positive");
  require(c.hidden > 0, "hidden must be positive");
  require(c.layers == 1, "only layers = 1 is supported");
  require(c.clip > 0, "clip must be positive");
  require(c.lr > 0, "lr must be positive");
  require(c.lr_decay > 0 && c.lr_decay <= 1, "lr_decay must be in (0, 1]");
  require(c.vocab > 0, "vocab must be positive");
  require(c.alpha >= 0, "alpha must be nonnegative");
  require(c.epochs >= 0, "epochs must be nonnegative");
  require(!c.relations_at_test, "relations_at_test is reserved and not supported");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for doubles is available, but stod gives clearer failures.
    try {
      std::size_t used = 0;
      out = std::stod(std::string(value), &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("config", "bad value for " + std::string(key) + ": '" + std::string(value) + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw Error("config", "bad value for " + std::string(key) + ": '" + std::string(value) + "'");
    }
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error("config", "bad boolean for " + std::string(key));
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void apply_config_value(ModelConfig& c, std::string_view key, std::string_view value) {
  if (key == "variant") c.variant = parse_variant(value);
  else if (key == "batch") c.batch = parse_number<int>(key, value);
  else if (key == "max_sentence_len") c.max_sentence_len = parse_number<int>(key, value);
  else if (key == "embed") c.embed = parse_number<int>(key, value);
  else if (key == "hidden") c.hidden = parse_number<int>(key, value);
  else if (key == "layers") c.layers = parse_number<int>(key, value);
  else if (key == "clip") c.clip = parse_number<double>(key, value);
  else if (key == "lr") c.lr = parse_number<double>(key, value);
  else if (key == "lr_decay") c.lr_decay = parse_number<double>(key, value);
  else if (key == "vocab") c.vocab = parse_number<int>(key, value);
  else if (key == "alpha") c.alpha = parse_number<double>(key, value);
  else if (key == "delta_kind") c.delta_kind = seq::parse_delta(value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "epochs") c.epochs = parse_number<int>(key, value);
  else if (key == "crf_form") {
    if (value == "pairwise") c.crf_form = crf::Form::kPairwise;
    else if (value == "unary") c.crf_form = crf::Form::kUnaryTransition;
    else throw Error("config", "crf_form must be pairwise or unary");
  } else if (key == "aggregation") {
    if (value == "token_mean") c.aggregation = Aggregation::kTokenMean;
    else if (value == "sum") c.aggregation = Aggregation::kSum;
    else throw Error("config", "aggregation must be token_mean or sum");
  } else if (key == "relations_at_test") c.relations_at_test = parse_bool(key, value);
  else throw Error("config", "unknown config key '" + std::string(key) + "'");
}

ModelConfig parse_config(std::istream& in, std::map<std::string, std::string>* extra) {
  ModelConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config", "config line " + std::to_string(line_no) + " is not key = value");
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    try {
      apply_config_value(c, key, value);
    } catch (const Error& e) {
      if (extra && e.what() == "unknown config key '" + key + "'") {
        (*extra)[key] = value;
      } else {
        throw;
      }
    }
  }
  return c;
}

std::map<std::string, std::string> config_to_map(const ModelConfig& c) {
  return {
      {"variant", std::string(variant_name(c.variant))},
      {"batch", std::to_string(c.batch)},
      {"max_sentence_len", std::to_string(c.max_sentence_len)},
      {"embed", std::to_string(c.embed)},
      {"hidden", std::to_string(c.hidden)},
      {"layers", std::to_string(c.layers)},
      {"clip", format_double(c.clip)},
      {"lr", format_double(c.lr)},
      {"lr_decay", format_double(c.lr_decay)},
      {"vocab", std::to_string(c.vocab)},
      {"alpha", format_double(c.alpha)},
      {"delta_kind", std::string(seq::delta_name(c.delta_kind))},
      {"seed", std::to_string(c.seed)},
      {"epochs", std::to_string(c.epochs)},
      {"crf_form", c.crf_form == crf::Form::kPairwise ? "pairwise" : "unary"},
      {"aggregation", c.aggregation == Aggregation::kTokenMean ? "token_mean" : "sum"},
      {"relations_at_test", c.relations_at_test ? "true" : "false"},
  };
}

void write_config(std::ostream& out, const ModelConfig& c) {
  for (const auto& [k, v] : config_to_map(c)) out << k << " = " << v << '\n';
}

EncodedParagraph encode_paragraph(const Paragraph& p, const Vocab& vocab) {
  EncodedParagraph e;
  e.id = p.id;
  for (const auto& s : p.sentences) e.sentences.push_back(vocab.encode(s));
  return e;
}

std::vector<int> bridge_context(std::span<const int> prev, std::span<const int> last) {
  std::vector<int> out(prev.begin(), prev.end());
  out.push_back(Vocab::kSep);
  out.insert(out.end(), last.begin(), last.end());
  return out;
}

Expr objective(Graph& g, const LossTerms& terms, double alpha, Aggregation aggregation) {
  Expr total = terms.lm.valid() ? terms.lm : g.constant(Matrix::Zero(1, 1));
  if (terms.crf.valid() && alpha != 0.0) total = total + ad::scale(terms.crf, alpha);
  if (aggregation == Aggregation::kTokenMean && terms.tokens > 0) {
    total = ad::scale(total, 1.0 / static_cast<double>(terms.tokens));
  }
  return total;
}

namespace {

std::vector<int> non_empty(std::vector<int> tokens) {
  if (tokens.empty()) tokens.push_back(Vocab::kEos);
  return tokens;
}

void add_term(Graph& g, Expr& acc, const Expr& term) {
  (void)g;
  acc = acc.valid() ? acc + term : term;
}

}  // namespace

Model::Model(const ModelConfig& config, int vocab_size) : config_(config), vocab_size_(vocab_size) {
  validate(config_);
  if (vocab_size_ <= Vocab::kNumReserved) throw Error("config", "vocabulary too small");
  embedding_ = &params_.add("embedding", vocab_size_, config_.embed);
  out_w_ = &params_.add("output.w", vocab_size_, config_.hidden);
  out_b_ = &params_.add("output.b", vocab_size_, 1);
}

void Model::init_parameters() {
  std::mt19937_64 rng(config_.seed);
  params_.init_uniform(-0.1, 0.1, rng);
  embedding_->value.row(Vocab::kPad).setZero();
}

void Model::set_embeddings(const EmbeddingTable& table) {
  if (table.dimension != config_.embed || table.vectors.rows() != vocab_size_) {
    throw DataError("bad-dim", "embedding table shape does not match the model");
  }
  embedding_->value = table.vectors;
  embedding_->value.row(Vocab::kPad).setZero();
}

Expr Model::logits(Graph& g, const Expr& h) const {
  return matmul(g.param(*out_w_), h) + g.param(*out_b_);
}

Expr Model::sentence_nll(Graph& g, std::span<const LstmState> states,
                         std::span<const int> target) const {
  if (states.size() != target.size() + 1) throw Error("shape", "sentence_nll: state count");
  std::vector<Expr> terms;
  terms.reserve(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) {
    const int gold = t < target.size() ? target[t] : Vocab::kEos;
    terms.push_back(ad::pick_neg_log_softmax(logits(g, states[t].h), gold));
  }
  return ad::sum(terms);
}

int Model::greedy_token(const Expr& l) const {
  const auto& v = l.value();
  int best = -1;
  for (int i = 0; i < static_cast<int>(v.rows()); ++i) {
    if (i == Vocab::kPad || i == Vocab::kBos || i == Vocab::kSep || i == Vocab::kEop) continue;
    if (best < 0 || v(i, 0) > v(best, 0)) best = i;
  }
  return best;
}

// ---------------------------------------------------------------- Seq2Seq

Seq2SeqModel::Seq2SeqModel(const ModelConfig& config, int vocab_size, int num_labels)
    : Model(config, vocab_size), num_labels_(num_labels) {
  const int E = config_.embed, H = config_.hidden;
  encoder_ = LstmCell::create(params_, "encoder", E, H);
  attention_ = seq::Attention::create(params_, "attention", H, H, H);
  decoder_ = LstmCell::create(params_, "decoder", E + H, H);
  if (config_.variant == Variant::kFlowDisc) {
    if (num_labels_ < 1) throw Error("config", "flow_disc needs a relation inventory");
    const int L = num_labels_;
    const int rows = config_.crf_form == crf::Form::kPairwise ? L * L : L;
    crf_w_ = &params_.add("crf.w", rows, H);
    crf_b_ = &params_.add("crf.b", L, L);
  }
  init_parameters();
}

std::size_t Seq2SeqModel::expected_parameter_count() const {
  const auto V = static_cast<std::size_t>(vocab_size_);
  const int E = config_.embed, H = config_.hidden;
  std::size_t n = V * static_cast<std::size_t>(E) + V * static_cast<std::size_t>(H) + V;
  n += LstmCell::count(E, H) + seq::Attention::count(H, H, H) + LstmCell::count(E + H, H);
  if (has_crf()) {
    const auto L = static_cast<std::size_t>(num_labels_);
    const auto rows = config_.crf_form == crf::Form::kPairwise ? L * L : L;
    n += rows * static_cast<std::size_t>(H) + L * L;
  }
  return n;
}

DecodeResult Seq2SeqModel::decode(Graph& g, std::span<const int> context,
                                  std::span<const int> target) const {
  const auto enc = seq::encode_sentence(g, context, *embedding_, encoder_);
  std::vector<Expr> keys;
  keys.reserve(enc.states.size());
  for (const auto& s : enc.states) keys.push_back(s.h);
  const auto memory = seq::attention_memory(g, attention_, keys);

  std::vector<LstmState> states;
  states.reserve(target.size() + 1);
  LstmState state = enc.states.back();
  for (std::size_t t = 0; t <= target.size(); ++t) {
    const int input = t == 0 ? Vocab::kBos : target[t - 1];
    const auto ctx = seq::attend(g, attention_, memory, state.h).context;
    state = seq::lstm_step(g, decoder_, ad::concat({g.lookup(*embedding_, input), ctx}), state);
    states.push_back(state);
  }
  DecodeResult r;
  r.nll = sentence_nll(g, states, target);
  r.tokens = static_cast<long>(target.size()) + 1;
  for (std::size_t t = 1; t < states.size(); ++t) r.token_states.push_back(states[t].h);
  return r;
}

Expr Seq2SeqModel::crf_nll(Graph& g, std::span<const Expr> token_states,
                           std::span<const int> labels) const {
  if (!has_crf()) throw Error("config", "model has no CRF head");
  if (labels.size() != token_states.size()) {
    throw DataError("align", "relation labels are misaligned with the sentence tokens");
  }
  return crf::nll_expr(ad::hcat(token_states), g.param(*crf_w_), g.param(*crf_b_),
                       std::vector<int>(labels.begin(), labels.end()), config_.crf_form);
}

LossTerms Seq2SeqModel::paragraph_loss(Graph& g, const EncodedParagraph& p) const {
  LossTerms terms;
  const auto M = p.sentences.size();
  if (has_crf() && p.labels.size() != M) {
    throw DataError("align", "paragraph " + p.id + " has no relation labels for every sentence");
  }
  for (std::size_t i = 1; i + 1 < M; ++i) {
    const auto ctx = bridge_context(p.sentences[i - 1], p.sentences[M - 1]);
    auto d = decode(g, ctx, p.sentences[i]);
    add_term(g, terms.lm, d.nll);
    terms.tokens += d.tokens;
    if (has_crf()) add_term(g, terms.crf, crf_nll(g, d.token_states, p.labels[i]));
  }
  return terms;
}

std::vector<std::vector<int>> Seq2SeqModel::generate(std::span<const int> first,
                                                     std::span<const int> last, int n_sentences,
                                                     int max_len) const {
  std::vector<std::vector<int>> out;
  std::vector<int> prev(first.begin(), first.end());
  for (int k = 0; k < n_sentences; ++k) {
    Graph g;
    const auto ctx = bridge_context(non_empty(prev), last);
    const auto enc = seq::encode_sentence(g, ctx, *embedding_, encoder_);
    std::vector<Expr> keys;
    for (const auto& s : enc.states) keys.push_back(s.h);
    const auto memory = seq::attention_memory(g, attention_, keys);
    LstmState state = enc.states.back();
    std::vector<int> sentence;
    int input = Vocab::kBos;
    while (static_cast<int>(sentence.size()) < max_len) {
      const auto ctx_vec = seq::attend(g, attention_, memory, state.h).context;
      state = seq::lstm_step(g, decoder_, ad::concat({g.lookup(*embedding_, input), ctx_vec}), state);
      const int next = greedy_token(logits(g, state.h));
      if (next == Vocab::kEos) break;
      sentence.push_back(next);
      input = next;
    }
    prev = sentence;
    out.push_back(std::move(sentence));
  }
  return out;
}

std::vector<int> Seq2SeqModel::predict_relations(std::span<const int> context,
                                                 std::span<const int> sentence) const {
  if (!has_crf()) throw Error("config", "model has no CRF head");
  if (sentence.empty()) return {};
  Graph g;
  const auto d = decode(g, context, sentence);
  crf::CrfParams p;
  p.labels = num_labels_;
  p.dim = config_.hidden;
  p.form = config_.crf_form;
  p.weights = crf_w_->value;
  p.bias = crf_b_->value;
  return crf::viterbi(ad::hcat(d.token_states).value(), p).labels;
}

// ----------------------------------------------------------- Hierarchical

HierarchicalModel::HierarchicalModel(const ModelConfig& config, int vocab_size)
    : Model(config, vocab_size) {
  const int E = config_.embed, H = config_.hidden;
  word_ = LstmCell::create(params_, "g_word", E, H);
  context_ = LstmCell::create(params_, "context", H, H);
  decoder_ = LstmCell::create(params_, "decoder", E, H);
  init_parameters();
}

std::size_t HierarchicalModel::expected_parameter_count() const {
  const auto V = static_cast<std::size_t>(vocab_size_);
  const int E = config_.embed, H = config_.hidden;
  return V * static_cast<std::size_t>(E) + V * static_cast<std::size_t>(H) + V +
         LstmCell::count(E, H) + LstmCell::count(H, H) + LstmCell::count(E, H);
}

LstmState HierarchicalModel::context_state(Graph& g, std::span<const std::vector<int>> context) const {
  if (context.empty()) throw Error("empty", "hs2s needs at least one context sentence");
  std::vector<Expr> vectors;
  for (const auto& s : context) {
    vectors.push_back(seq::encode_sentence(g, non_empty(s), *embedding_, word_).vector);
  }
  return seq::encode_vectors(g, vectors, context_).back();
}

DecodeResult HierarchicalModel::decode(Graph& g, const LstmState& init,
                                       std::span<const int> target) const {
  LstmState state = init;
  std::vector<LstmState> states;
  for (std::size_t t = 0; t <= target.size(); ++t) {
    const int input = t == 0 ? Vocab::kBos : target[t - 1];
    state = seq::lstm_step(g, decoder_, g.lookup(*embedding_, input), state);
    states.push_back(state);
  }
  DecodeResult r;
  r.nll = sentence_nll(g, states, target);
  r.tokens = static_cast<long>(target.size()) + 1;
  for (std::size_t t = 1; t < states.size(); ++t) r.token_states.push_back(states[t].h);
  return r;
}

LossTerms HierarchicalModel::paragraph_loss(Graph& g, const EncodedParagraph& p) const {
  LossTerms terms;
  const auto M = p.sentences.size();
  for (std::size_t i = 1; i + 1 < M; ++i) {
    const std::vector<std::vector<int>> ctx{p.sentences[i - 1], p.sentences[M - 1]};
    const auto d = decode(g, context_state(g, ctx), p.sentences[i]);
    add_term(g, terms.lm, d.nll);
    terms.tokens += d.tokens;
  }
  return terms;
}

std::vector<std::vector<int>> HierarchicalModel::generate(std::span<const int> first,
                                                          std::span<const int> last,
                                                          int n_sentences, int max_len) const {
  std::vector<std::vector<int>> out;
  std::vector<int> prev(first.begin(), first.end());
  for (int k = 0; k < n_sentences; ++k) {
    Graph g;
    const std::vector<std::vector<int>> ctx{prev, std::vector<int>(last.begin(), last.end())};
    LstmState state = context_state(g, ctx);
    std::vector<int> sentence;
    int input = Vocab::kBos;
    while (static_cast<int>(sentence.size()) < max_len) {
      state = seq::lstm_step(g, decoder_, g.lookup(*embedding_, input), state);
      const int next = greedy_token(logits(g, state.h));
      if (next == Vocab::kEos) break;
      sentence.push_back(next);
      input = next;
    }
    prev = sentence;
    out.push_back(std::move(sentence));
  }
  return out;
}

// -------------------------------------------------------------- FlowDelta

FlowDeltaModel::FlowDeltaModel(const ModelConfig& config, int vocab_size)
    : Model(config, vocab_size) {
  const int E = config_.embed, H = config_.hidden;
  word_ = LstmCell::create(params_, "g_word", E, H);
  sent_ = LstmCell::create(params_, "g_sent", H, H);
  delta_rnn_ = LstmCell::create(params_, "g_delta", H, H);
  decoder_ = LstmCell::create(params_, "decoder", E + 2 * H, H);
  init_sentence_ = &params_.add("init.sentence", H, 1);
  init_delta_ = &params_.add("init.delta", H, 1);
  if (config_.delta_kind == DeltaKind::kMlp) mlp_ = seq::DeltaMlp::create(params_, "delta_mlp", H);
  init_parameters();
}

std::size_t FlowDeltaModel::expected_parameter_count() const {
  const auto V = static_cast<std::size_t>(vocab_size_);
  const int E = config_.embed, H = config_.hidden;
  std::size_t n = V * static_cast<std::size_t>(E) + V * static_cast<std::size_t>(H) + V;
  n += LstmCell::count(E, H) + 2 * LstmCell::count(H, H) + LstmCell::count(E + 2 * H, H);
  n += 2 * static_cast<std::size_t>(H);
  if (config_.delta_kind == DeltaKind::kMlp) n += seq::DeltaMlp::count(H);
  return n;
}

void FlowDeltaModel::push_sentence(Graph& g, History& h, std::span<const int> tokens) const {
  const auto v = seq::encode_sentence(g, non_empty({tokens.begin(), tokens.end()}), *embedding_,
                                      word_)
                     .vector;
  const LstmState sent_prev =
      h.sent_states.empty() ? seq::zero_state(g, config_.hidden) : h.sent_states.back();
  h.sent_states.push_back(seq::lstm_step(g, sent_, v, sent_prev));
  if (!h.vectors.empty()) {
    const Expr d = seq::delta(g, h.vectors.back(), v, config_.delta_kind,
                              config_.delta_kind == DeltaKind::kMlp ? &mlp_ : nullptr);
    const LstmState delta_prev =
        h.delta_states.empty() ? seq::zero_state(g, config_.hidden) : h.delta_states.back();
    h.deltas.push_back(d);
    h.delta_states.push_back(seq::lstm_step(g, delta_rnn_, d, delta_prev));
  }
  h.vectors.push_back(v);
}

std::pair<Expr, Expr> FlowDeltaModel::conditioning(Graph& g, const History& h) const {
  const Expr s = h.sent_states.empty() ? g.param(*init_sentence_) : h.sent_states.back().h;
  const Expr d = h.delta_states.empty() ? g.param(*init_delta_) : h.delta_states.back().h;
  return {s, d};
}

LossTerms FlowDeltaModel::sentences_loss(Graph& g, std::span<const std::vector<int>> sentences,
                                         std::size_t first_target) const {
  LossTerms terms;
  History history;
  for (std::size_t m = 0; m < sentences.size(); ++m) {
    if (m >= first_target) {
      const auto [s, d] = conditioning(g, history);
      LstmState state = seq::zero_state(g, config_.hidden);
      std::vector<LstmState> states;
      const auto& target = sentences[m];
      for (std::size_t t = 0; t <= target.size(); ++t) {
        const int input = t == 0 ? Vocab::kBos : target[t - 1];
        state = seq::decode_step(g, decoder_, state, g.lookup(*embedding_, input), s, d);
        states.push_back(state);
      }
      add_term(g, terms.lm, sentence_nll(g, states, target));
      terms.tokens += static_cast<long>(target.size()) + 1;
    }
    if (m + 1 < sentences.size()) push_sentence(g, history, sentences[m]);
  }
  return terms;
}

LossTerms FlowDeltaModel::paragraph_loss(Graph& g, const EncodedParagraph& p) const {
  const auto M = p.sentences.size();
  if (M < 3) return {};
  std::vector<std::vector<int>> view;
  view.push_back(bridge_context(p.sentences.front(), p.sentences.back()));
  for (std::size_t i = 1; i + 1 < M; ++i) view.push_back(p.sentences[i]);
  return sentences_loss(g, view, 1);
}

std::vector<std::vector<int>> FlowDeltaModel::generate(std::span<const int> first,
                                                       std::span<const int> last,
                                                       int n_sentences, int max_len) const {
  std::vector<std::vector<int>> out;
  if (n_sentences <= 0) return out;
  Graph g;
  History history;
  push_sentence(g, history, bridge_context(first, last));
  for (int k = 0; k < n_sentences; ++k) {
    const auto [s, d] = conditioning(g, history);
    LstmState state = seq::zero_state(g, config_.hidden);
    std::vector<int> sentence;
    int input = Vocab::kBos;
    while (static_cast<int>(sentence.size()) < max_len) {
      state = seq::decode_step(g, decoder_, state, g.lookup(*embedding_, input), s, d);
      const int next = greedy_token(logits(g, state.h));
      if (next == Vocab::kEos) break;
      sentence.push_back(next);
      input = next;
    }
    if (k + 1 < n_sentences) push_sentence(g, history, sentence);
    out.push_back(std::move(sentence));
  }
  return out;
}

// --------------------------------------------------------------- factory

std::unique_ptr<Model> make_model(const ModelConfig& config, int vocab_size, int num_labels,
                                  const EmbeddingTable* embeddings) {
  std::unique_ptr<Model> m;
  switch (config.variant) {
    case Variant::kS2S: m = std::make_unique<Seq2SeqModel>(config, vocab_size, 0); break;
    case Variant::kFlowDisc:
      m = std::make_unique<Seq2SeqModel>(config, vocab_size, num_labels);
      break;
    case Variant::kHS2S: m = std::make_unique<HierarchicalModel>(config, vocab_size); break;
    case Variant::kFlowDelta: m = std::make_unique<FlowDeltaModel>(config, vocab_size); break;
  }
  if (embeddings) m->set_embeddings(*embeddings);
  return m;
}

LossTerms s2s_loss(Graph& g, const Seq2SeqModel& model, std::span<const int> context,
                   std::span<const int> target) {
  if (target.empty()) throw Error("empty", "s2s_loss: empty target sentence");
  const auto d = model.decode(g, context, target);
  LossTerms t;
  t.lm = d.nll;
  t.tokens = d.tokens;
  return t;
}

double s2s_loss_value(const Seq2SeqModel& model, std::span<const int> context,
                      std::span<const int> target, Aggregation aggregation) {
  Graph g;
  return objective(g, s2s_loss(g, model, context, target), 0.0, aggregation).scalar();
}

Expr flow_disc_loss(Graph& g, const Seq2SeqModel& model, const EncodedParagraph& p, double alpha,
                    Aggregation aggregation) {
  return objective(g, model.paragraph_loss(g, p), alpha, aggregation);
}

Expr flow_delta_loss(Graph& g, const FlowDeltaModel& model,
                     std::span<const std::vector<int>> sentences, std::size_t first_target,
                     Aggregation aggregation) {
  return objective(g, model.sentences_loss(g, sentences, first_target), 0.0, aggregation);
}

Expr hs2s_forward(Graph& g, const HierarchicalModel& model,
                  std::span<const std::vector<int>> context, std::span<const int> target,
                  Aggregation aggregation) {
  const auto d = model.decode(g, model.context_state(g, context), target);
  LossTerms t;
  t.lm = d.nll;
  t.tokens = d.tokens;
  return objective(g, t, 0.0, aggregation);
}

}  // namespace paraflow::models
