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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paraflow/autodiff.hpp"

namespace paraflow::seq {

using ad::Expr;
using ad::Graph;
using ad::Matrix;
using ad::Parameter;
using ad::ParameterSet;

// Single-layer LSTM without peepholes. Gate blocks are stacked in the order
// input, forget, output, candidate:  z = Wx x + Wh h + b  (4H rows).
struct LstmCell {
  Parameter* wx = nullptr;
  Parameter* wh = nullptr;
  Parameter* b = nullptr;
  int input = 0;
  int hidden = 0;

  static LstmCell create(ParameterSet& params, const std::string& prefix, int input, int hidden);
  // Closed-form parameter count: 4H(I + H + 1).
  static std::size_t count(int input, int hidden) {
    return 4u * static_cast<std::size_t>(hidden) * static_cast<std::size_t>(input + hidden + 1);
  }
};

struct LstmState {
  Expr h;
  Expr c;
};

LstmState zero_state(Graph& g, int hidden);
LstmState lstm_step(Graph& g, const LstmCell& cell, const Expr& x, const LstmState& prev);

struct EncodedSentence {
  std::vector<LstmState> states;
  Expr vector;  // final hidden state
};

// Runs `cell` over the embedded tokens from `init` (zero state by default).
EncodedSentence encode_sentence(Graph& g, std::span<const int> tokens, Parameter& embedding,
                                const LstmCell& cell, const LstmState* init = nullptr);

// Runs `cell` over a sequence of vectors (sentence or delta recurrences).
std::vector<LstmState> encode_vectors(Graph& g, std::span<const Expr> inputs, const LstmCell& cell,
                                      const LstmState* init = nullptr);

enum class DeltaKind { kSubtract, kAdd, kMlp };

std::string_view delta_name(DeltaKind k);
DeltaKind parse_delta(std::string_view name);

// tanh(W1 [prev; cur] + b1) followed by the affine output W2 h + b2.
struct DeltaMlp {
  Parameter* w1 = nullptr;
  Parameter* b1 = nullptr;
  Parameter* w2 = nullptr;
  Parameter* b2 = nullptr;

  static DeltaMlp create(ParameterSet& params, const std::string& prefix, int width);
  static std::size_t count(int width) {
    const auto w = static_cast<std::size_t>(width);
    return w * 2 * w + w + w * w + w;
  }
};

// subtract: cur - prev; add: cur + prev; mlp: DeltaMlp over [prev; cur].
Expr delta(Graph& g, const Expr& prev, const Expr& cur, DeltaKind kind,
           const DeltaMlp* mlp = nullptr);

// One conditioned decoder step: the cell consumes [x; sentence; delta].
LstmState decode_step(Graph& g, const LstmCell& cell, const LstmState& prev, const Expr& x,
                      const Expr& sentence, const Expr& delta);

// Additive attention: score_k = v . tanh(Wq q + Wk key_k).
struct Attention {
  Parameter* wq = nullptr;
  Parameter* wk = nullptr;
  Parameter* v = nullptr;

  static Attention create(ParameterSet& params, const std::string& prefix, int query_dim,
                          int key_dim, int attn_dim);
  static std::size_t count(int query_dim, int key_dim, int attn_dim) {
    const auto a = static_cast<std::size_t>(attn_dim);
    return a * static_cast<std::size_t>(query_dim) + a * static_cast<std::size_t>(key_dim) + a;
  }
};

struct AttentionMemory {
  Expr keys;       // key_dim x n
  Expr projected;  // attn_dim x n
};

struct AttentionResult {
  Expr context;  // key_dim x 1
  Expr weights;  // n x 1
};

AttentionMemory attention_memory(Graph& g, const Attention& att, std::span<const Expr> keys);
AttentionResult attend(Graph& g, const Attention& att, const AttentionMemory& memory,
                       const Expr& query);
AttentionResult attention(Graph& g, const Attention& att, const Expr& query,
                          std::span<const Expr> keys);

}  // namespace paraflow::seq
