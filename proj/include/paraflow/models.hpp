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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paraflow/autodiff.hpp"
#include "paraflow/corpus.hpp"
#include "paraflow/crf.hpp"
#include "paraflow/seqmodel.hpp"

namespace paraflow::models {

using ad::Expr;
using ad::Graph;
using seq::DeltaKind;

enum class Variant { kS2S, kHS2S, kFlowDisc, kFlowDelta };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

enum class Aggregation { kTokenMean, kSum };

struct ModelConfig {
  Variant variant = Variant::kS2S;
  int batch = 32;
  int max_sentence_len = 25;
  int embed = 300;
  int hidden = 512;
  int layers = 1;
  double clip = 0.25;
  double lr = 0.2;
  double lr_decay = 0.5;
  int vocab = kDefaultVocabSize;
  double alpha = 0.5;  // flow_disc only
  DeltaKind delta_kind = DeltaKind::kSubtract;  // flow_delta only
  std::uint64_t seed = 1;
  int epochs = 10;
  crf::Form crf_form = crf::Form::kPairwise;
  Aggregation aggregation = Aggregation::kTokenMean;
  // Reserved: condition generation on predicted relations. Not supported.
  bool relations_at_test = false;
};

// Throws Error("config") on invalid values.
void validate(const ModelConfig& config);

// Flat "key = value" text, keys named exactly as the fields above. Unknown
// keys go to `extra` when given, otherwise they are an error.
ModelConfig parse_config(std::istream& in, std::map<std::string, std::string>* extra = nullptr);
void apply_config_value(ModelConfig& config, std::string_view key, std::string_view value);
std::map<std::string, std::string> config_to_map(const ModelConfig& config);
void write_config(std::ostream& out, const ModelConfig& config);

inline constexpr double kAlphaGrid[] = {0.1, 0.5, 1.0};

// Token ids of one paragraph plus optional per-sentence relation labels.
struct EncodedParagraph {
  std::string id;
  std::vector<std::vector<int>> sentences;
  std::vector<std::vector<int>> labels;
};

EncodedParagraph encode_paragraph(const Paragraph& p, const Vocab& vocab);

// "prev <sep> last", the conditioning sequence used by every variant.
std::vector<int> bridge_context(std::span<const int> prev, std::span<const int> last);

// Summed negative log-likelihood terms; `tokens` counts predicted tokens
// (sentence tokens plus EOS).
struct LossTerms {
  Expr lm;
  Expr crf;  // invalid unless a CRF head contributed
  long tokens = 0;
};

// Turns terms into the training objective (lm + alpha * crf), divided by
// `tokens` under kTokenMean.
Expr objective(Graph& g, const LossTerms& terms, double alpha, Aggregation aggregation);

class Model {
 public:
  virtual ~Model() = default;

  const ModelConfig& config() const { return config_; }
  int vocab_size() const { return vocab_size_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }

  // Closed-form count from the configured shapes.
  virtual std::size_t expected_parameter_count() const = 0;

  // Training loss over the middle sentences of a paragraph, each predicted
  // from the previous sentence and the final one.
  virtual LossTerms paragraph_loss(Graph& g, const EncodedParagraph& p) const = 0;

  // Greedy bridging: `n_sentences` sentences between `first` and `last`.
  // Each is cut at EOS or after `max_len` tokens.
  virtual std::vector<std::vector<int>> generate(std::span<const int> first,
                                                 std::span<const int> last, int n_sentences,
                                                 int max_len) const = 0;

  // Copies pretrained vectors into the embedding matrix (PAD stays zero).
  void set_embeddings(const EmbeddingTable& table);

 protected:
  Model(const ModelConfig& config, int vocab_size);
  void init_parameters();

  Expr logits(Graph& g, const Expr& h) const;
  // NLL of `target` + EOS given per-step output states; states[t] predicts
  // token t (states.size() == target.size() + 1).
  Expr sentence_nll(Graph& g, std::span<const seq::LstmState> states,
                    std::span<const int> target) const;
  int greedy_token(const Expr& logits) const;

  ModelConfig config_;
  int vocab_size_;
  ad::ParameterSet params_;
  ad::Parameter* embedding_ = nullptr;
  ad::Parameter* out_w_ = nullptr;
  ad::Parameter* out_b_ = nullptr;
};

// Result of one teacher-forced decode.
struct DecodeResult {
  Expr nll;            // summed over target tokens and EOS
  long tokens = 0;
  std::vector<Expr> token_states;  // decoder state after reading each target token
};

// Attentional encoder-decoder (S2S); with a CRF head it is the
// discourse-supervised variant.
class Seq2SeqModel : public Model {
 public:
  Seq2SeqModel(const ModelConfig& config, int vocab_size, int num_labels);

  std::size_t expected_parameter_count() const override;
  LossTerms paragraph_loss(Graph& g, const EncodedParagraph& p) const override;
  std::vector<std::vector<int>> generate(std::span<const int> first, std::span<const int> last,
                                         int n_sentences, int max_len) const override;

  DecodeResult decode(Graph& g, std::span<const int> context, std::span<const int> target) const;
  bool has_crf() const { return crf_w_ != nullptr; }
  int num_labels() const { return num_labels_; }
  Expr crf_nll(Graph& g, std::span<const Expr> token_states, std::span<const int> labels) const;
  // Relation labels for a generated or reference sentence (diagnostics only).
  std::vector<int> predict_relations(std::span<const int> context,
                                     std::span<const int> sentence) const;

 private:
  int num_labels_ = 0;
  seq::LstmCell encoder_;
  seq::LstmCell decoder_;
  seq::Attention attention_;
  ad::Parameter* crf_w_ = nullptr;
  ad::Parameter* crf_b_ = nullptr;
};

// Hierarchical encoder-decoder (HS2S): sentence vectors feed a context LSTM
// whose final state initializes the decoder.
class HierarchicalModel : public Model {
 public:
  HierarchicalModel(const ModelConfig& config, int vocab_size);

  std::size_t expected_parameter_count() const override;
  LossTerms paragraph_loss(Graph& g, const EncodedParagraph& p) const override;
  std::vector<std::vector<int>> generate(std::span<const int> first, std::span<const int> last,
                                         int n_sentences, int max_len) const override;

  // Final (h, c) of the sentence-level encoder; it initializes the decoder.
  seq::LstmState context_state(Graph& g, std::span<const std::vector<int>> context) const;
  DecodeResult decode(Graph& g, const seq::LstmState& init, std::span<const int> target) const;

  const seq::LstmCell& context_cell() const { return context_; }

 private:
  seq::LstmCell word_;
  seq::LstmCell context_;
  seq::LstmCell decoder_;
};

// Paragraph LM conditioned on the previous sentence (g_sent state) and the
// delta of the two previous sentences (g_delta state).
class FlowDeltaModel : public Model {
 public:
  FlowDeltaModel(const ModelConfig& config, int vocab_size);

  std::size_t expected_parameter_count() const override;
  LossTerms paragraph_loss(Graph& g, const EncodedParagraph& p) const override;
  std::vector<std::vector<int>> generate(std::span<const int> first, std::span<const int> last,
                                         int n_sentences, int max_len) const override;

  // NLL of sentences[first_target..] with full conditioning history.
  LossTerms sentences_loss(Graph& g, std::span<const std::vector<int>> sentences,
                           std::size_t first_target) const;

  struct History {
    std::vector<Expr> vectors;                // g_word outputs
    std::vector<seq::LstmState> sent_states;  // g_sent after each vector
    std::vector<Expr> deltas;                 // raw deltas between vectors
    std::vector<seq::LstmState> delta_states; // g_delta after each delta
  };
  void push_sentence(Graph& g, History& h, std::span<const int> tokens) const;
  // Conditioning pair (sentence, delta) for the next sentence to decode.
  std::pair<Expr, Expr> conditioning(Graph& g, const History& h) const;
  const seq::LstmCell& decoder() const { return decoder_; }

 private:
  seq::LstmCell word_;
  seq::LstmCell sent_;
  seq::LstmCell delta_rnn_;
  seq::LstmCell decoder_;
  seq::DeltaMlp mlp_;
  ad::Parameter* init_sentence_ = nullptr;
  ad::Parameter* init_delta_ = nullptr;
};

// Builds and seeds a model. `num_labels` is the relation inventory size
// (flow_disc only); `embeddings` optionally overrides the random init.
std::unique_ptr<Model> make_model(const ModelConfig& config, int vocab_size, int num_labels = 0,
                                  const EmbeddingTable* embeddings = nullptr);

// One adjacent pair under the attentional encoder-decoder.
LossTerms s2s_loss(Graph& g, const Seq2SeqModel& model, std::span<const int> context,
                   std::span<const int> target);
double s2s_loss_value(const Seq2SeqModel& model, std::span<const int> context,
                      std::span<const int> target, Aggregation aggregation = Aggregation::kTokenMean);

// Sum of pair losses plus alpha times the CRF NLL of every target sentence.
Expr flow_disc_loss(Graph& g, const Seq2SeqModel& model, const EncodedParagraph& p, double alpha,
                    Aggregation aggregation = Aggregation::kTokenMean);

Expr flow_delta_loss(Graph& g, const FlowDeltaModel& model,
                     std::span<const std::vector<int>> sentences, std::size_t first_target = 0,
                     Aggregation aggregation = Aggregation::kTokenMean);

Expr hs2s_forward(Graph& g, const HierarchicalModel& model,
                  std::span<const std::vector<int>> context, std::span<const int> target,
                  Aggregation aggregation = Aggregation::kTokenMean);

}  // namespace paraflow::models
