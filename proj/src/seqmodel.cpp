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

#include "paraflow/seqmodel.hpp"

#include <cmath>

#include "paraflow/error.hpp"

namespace paraflow::seq {

using ad::Vector;

LstmCell LstmCell::create(ParameterSet& params, const std::string& prefix, int input, int hidden) {
  LstmCell cell;
  cell.input = input;
  cell.hidden = hidden;
  cell.wx = &params.add(prefix + ".wx", 4 * hidden, input);
  cell.wh = &params.add(prefix + ".wh", 4 * hidden, hidden);
  cell.b = &params.add(prefix + ".b", 4 * hidden, 1);
  return cell;
}

LstmState zero_state(Graph& g, int hidden) {
  return LstmState{g.constant(Matrix::Zero(hidden, 1)), g.constant(Matrix::Zero(hidden, 1))};
}

LstmState lstm_step(Graph& g, const LstmCell& cell, const Expr& x, const LstmState& prev) {
  const int H = cell.hidden;
  if (x.rows() != cell.input || x.cols() != 1) {
    throw Error("shape", "lstm_step: input width " + std::to_string(x.rows()) + " != " +
                             std::to_string(cell.input));
  }
  if (prev.h.rows() != H || prev.c.rows() != H) throw Error("shape", "lstm_step: bad state width");

  const Expr wx = g.param(*cell.wx);
  const Expr wh = g.param(*cell.wh);
  const Expr b = g.param(*cell.b);

  const Vector z = wx.value() * x.value() + wh.value() * prev.h.value() + b.value();
  Vector gates(4 * H);  // activated i, f, o, candidate
  gates.head(3 * H) = (1.0 / (1.0 + (-z.head(3 * H).array()).exp())).matrix();
  gates.tail(H) = z.tail(H).array().tanh().matrix();
  const auto i = gates.segment(0, H);
  const auto f = gates.segment(H, H);
  const auto o = gates.segment(2 * H, H);
  const auto cand = gates.segment(3 * H, H);

  Vector c = f.cwiseProduct(prev.c.value().col(0)) + i.cwiseProduct(cand);
  Vector tc = c.array().tanh().matrix();
  Matrix out(2 * H, 1);
  out.col(0).head(H) = o.cwiseProduct(tc);
  out.col(0).tail(H) = c;

  const int ix = x.index(), ih = prev.h.index(), ic = prev.c.index();
  const int iwx = wx.index(), iwh = wh.index(), ib = b.index();
  Expr joint = g.emit(std::move(out), [=, gates = std::move(gates), tc = std::move(tc)](
                                          Graph& gr, const Matrix& d) {
    const auto dh = d.col(0).head(H);
    const auto dc_in = d.col(0).tail(H);
    const auto gi = gates.segment(0, H);
    const auto gf = gates.segment(H, H);
    const auto go = gates.segment(2 * H, H);
    const auto gc = gates.segment(3 * H, H);
    const Vector dc = dc_in + (dh.array() * go.array() * (1.0 - tc.array().square())).matrix();
    Vector dz(4 * H);
    dz.segment(0, H) = (dc.array() * gc.array() * gi.array() * (1.0 - gi.array())).matrix();
    dz.segment(H, H) =
        (dc.array() * gr.value(ic).col(0).array() * gf.array() * (1.0 - gf.array())).matrix();
    dz.segment(2 * H, H) = (dh.array() * tc.array() * go.array() * (1.0 - go.array())).matrix();
    dz.segment(3 * H, H) = (dc.array() * gi.array() * (1.0 - gc.array().square())).matrix();

    gr.accumulate(iwx, dz * gr.value(ix).transpose());
    gr.accumulate(iwh, dz * gr.value(ih).transpose());
    gr.accumulate(ib, dz);
    gr.accumulate(ix, gr.value(iwx).transpose() * dz);
    gr.accumulate(ih, gr.value(iwh).transpose() * dz);
    gr.accumulate(ic, dc.cwiseProduct(gf));
  });
  return LstmState{ad::rows(joint, 0, H), ad::rows(joint, H, H)};
}

EncodedSentence encode_sentence(Graph& g, std::span<const int> tokens, Parameter& embedding,
                                const LstmCell& cell, const LstmState* init) {
  if (tokens.empty()) throw Error("empty", "encode_sentence: empty token list");
  if (embedding.value.cols() != cell.input) {
    throw Error("shape", "encode_sentence: embedding width does not match the cell");
  }
  EncodedSentence out;
  out.states.reserve(tokens.size());
  LstmState s = init ? *init : zero_state(g, cell.hidden);
  for (int t : tokens) {
    s = lstm_step(g, cell, g.lookup(embedding, t), s);
    out.states.push_back(s);
  }
  out.vector = s.h;
  return out;
}

std::vector<LstmState> encode_vectors(Graph& g, std::span<const Expr> inputs, const LstmCell& cell,
                                      const LstmState* init) {
  std::vector<LstmState> out;
  out.reserve(inputs.size());
  LstmState s = init ? *init : zero_state(g, cell.hidden);
  for (const auto& x : inputs) {
    s = lstm_step(g, cell, x, s);
    out.push_back(s);
  }
  return out;
}

std::string_view delta_name(DeltaKind k) {
  switch (k) {
    case DeltaKind::kSubtract: return "subtract";
    case DeltaKind::kAdd: return "add";
    case DeltaKind::kMlp: return "mlp";
  }
  return "subtract";
}

DeltaKind parse_delta(std::string_view name) {
  if (name == "subtract") return DeltaKind::kSubtract;
  if (name == "add") return DeltaKind::kAdd;
  if (name == "mlp") return DeltaKind::kMlp;
  throw Error("config", "unknown delta kind '" + std::string(name) + "'");
}

DeltaMlp DeltaMlp::create(ParameterSet& params, const std::string& prefix, int width) {
  DeltaMlp m;
  m.w1 = &params.add(prefix + ".w1", width, 2 * width);
  m.b1 = &params.add(prefix + ".b1", width, 1);
  m.w2 = &params.add(prefix + ".w2", width, width);
  m.b2 = &params.add(prefix + ".b2", width, 1);
  return m;
}

Expr delta(Graph& g, const Expr& prev, const Expr& cur, DeltaKind kind, const DeltaMlp* mlp) {
  if (prev.rows() != cur.rows() || prev.cols() != 1 || cur.cols() != 1) {
    throw Error("shape", "delta: sentence vectors differ in width");
  }
  switch (kind) {
    case DeltaKind::kSubtract: return cur - prev;
    case DeltaKind::kAdd: return cur + prev;
    case DeltaKind::kMlp: {
      if (!mlp) throw Error("config", "delta: mlp kind needs parameters");
      if (mlp->w2->value.rows() != cur.rows()) throw Error("shape", "delta: mlp width mismatch");
      const Expr hidden =
          ad::tanh(matmul(g.param(*mlp->w1), ad::concat({prev, cur})) + g.param(*mlp->b1));
      return matmul(g.param(*mlp->w2), hidden) + g.param(*mlp->b2);
    }
  }
  throw Error("config", "delta: unknown kind");
}

LstmState decode_step(Graph& g, const LstmCell& cell, const LstmState& prev, const Expr& x,
                      const Expr& sentence, const Expr& delta) {
  if (x.rows() + sentence.rows() + delta.rows() != cell.input) {
    throw Error("shape", "decode_step: [x; s; d] width does not match the cell input");
  }
  return lstm_step(g, cell, ad::concat({x, sentence, delta}), prev);
}

Attention Attention::create(ParameterSet& params, const std::string& prefix, int query_dim,
                            int key_dim, int attn_dim) {
  Attention a;
  a.wq = &params.add(prefix + ".wq", attn_dim, query_dim);
  a.wk = &params.add(prefix + ".wk", attn_dim, key_dim);
  a.v = &params.add(prefix + ".v", attn_dim, 1);
  return a;
}

AttentionMemory attention_memory(Graph& g, const Attention& att, std::span<const Expr> keys) {
  if (keys.empty()) throw Error("empty", "attention needs at least one key");
  AttentionMemory m;
  m.keys = ad::hcat(keys);
  m.projected = matmul(g.param(*att.wk), m.keys);
  return m;
}

AttentionResult attend(Graph& g, const Attention& att, const AttentionMemory& memory,
                       const Expr& query) {
  const Expr q = matmul(g.param(*att.wq), query);
  const Expr hidden = ad::tanh(ad::add_colwise(memory.projected, q));
  const Expr scores = matmul(ad::transpose(hidden), g.param(*att.v));
  AttentionResult r;
  r.weights = ad::softmax(scores);
  r.context = matmul(memory.keys, r.weights);
  return r;
}

AttentionResult attention(Graph& g, const Attention& att, const Expr& query,
                          std::span<const Expr> keys) {
  return attend(g, att, attention_memory(g, att, keys), query);
}

}  // namespace paraflow::seq
