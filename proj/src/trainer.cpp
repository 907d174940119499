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

#include "paraflow/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "paraflow/error.hpp"

namespace paraflow::train {

long target_tokens(const EncodedParagraph& p) {
  long n = 0;
  for (std::size_t i = 1; i + 1 < p.sentences.size(); ++i) {
    n += static_cast<long>(p.sentences[i].size()) + 1;
  }
  return n;
}

double evaluate_nll(const Model& model, const std::vector<EncodedParagraph>& data) {
  double total = 0;
  long tokens = 0;
  for (const auto& p : data) {
    ad::Graph g;
    const auto terms = model.paragraph_loss(g, p);
    if (terms.tokens == 0) continue;
    total += terms.lm.scalar();
    tokens += terms.tokens;
  }
  return tokens == 0 ? 0.0 : total / static_cast<double>(tokens);
}

double clip_gradients(ad::ParameterSet& params, double max_norm) {
  const double norm = params.grad_norm();
  if (!std::isfinite(norm)) throw DivergedError("gradient norm is not finite");
  if (norm > max_norm) {
    const double k = max_norm / norm;
    for (auto& p : params) p->grad *= k;
  }
  return norm;
}

void adagrad_update(ad::ParameterSet& params, std::vector<ad::Matrix>& accumulators, double lr) {
  std::size_t i = 0;
  for (auto& p : params) {
    auto& acc = accumulators.at(i++);
    acc.array() += p->grad.array().square();
    p->value.array() -= lr * p->grad.array() / (acc.array().sqrt() + kAdagradEpsilon);
  }
}

TrainState init_state(const Model& model) {
  TrainState s;
  for (const auto& p : model.params()) {
    s.accumulators.push_back(ad::Matrix::Zero(p->value.rows(), p->value.cols()));
  }
  s.lr = model.config().lr;
  s.best_valid = std::numeric_limits<double>::infinity();
  s.rng.seed(model.config().seed);
  return s;
}

namespace {

std::vector<ad::Matrix> snapshot(const ad::ParameterSet& params) {
  std::vector<ad::Matrix> out;
  for (const auto& p : params) out.push_back(p->value);
  return out;
}

void restore(ad::ParameterSet& params, const std::vector<ad::Matrix>& values) {
  std::size_t i = 0;
  for (auto& p : params) p->value = values.at(i++);
}

// One mini-batch: per-paragraph graphs, gradients summed and scaled so the
// result is the gradient of the batch objective. Returns summed LM NLL.
double run_batch(Model& model, const std::vector<const EncodedParagraph*>& batch) {
  const auto& cfg = model.config();
  long batch_tokens = 0;
  for (const auto* p : batch) batch_tokens += target_tokens(*p);
  const double scale = cfg.aggregation == models::Aggregation::kTokenMean && batch_tokens > 0
                           ? 1.0 / static_cast<double>(batch_tokens)
                           : 1.0;
  double lm_total = 0;
  for (const auto* p : batch) {
    ad::Graph g;
    const auto terms = model.paragraph_loss(g, *p);
    if (terms.tokens == 0) continue;
    const double alpha = cfg.variant == models::Variant::kFlowDisc ? cfg.alpha : 0.0;
    const auto loss = ad::scale(models::objective(g, terms, alpha, models::Aggregation::kSum), scale);
    if (!std::isfinite(loss.scalar())) {
      throw DivergedError("loss is not finite on paragraph " + p->id);
    }
    lm_total += terms.lm.scalar();
    g.backward(loss);
  }
  return lm_total;
}

}  // namespace

TrainState train(Model& model, const std::vector<EncodedParagraph>& train_set,
                 const std::vector<EncodedParagraph>& valid_set, const TrainOptions& options) {
  const auto& cfg = model.config();
  TrainState state = init_state(model);
  auto& params = model.params();

  const bool use_train_for_valid = valid_set.empty();
  auto validation = [&](double train_nll) {
    return use_train_for_valid ? train_nll : evaluate_nll(model, valid_set);
  };

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  long epoch_tokens = 0;
  for (const auto& p : train_set) epoch_tokens += target_tokens(p);

  std::vector<ad::Matrix> best = snapshot(params);
  if (!use_train_for_valid) state.best_valid = evaluate_nll(model, valid_set);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), state.rng);
    double lm_total = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
      const auto stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
      std::vector<const EncodedParagraph*> batch;
      for (std::size_t k = start; k < stop; ++k) batch.push_back(&train_set[order[k]]);
      params.zero_grad();
      lm_total += run_batch(model, batch);
      clip_gradients(params, cfg.clip);
      adagrad_update(params, state.accumulators, state.lr);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = state.lr;
    rec.train_nll = epoch_tokens > 0 ? lm_total / static_cast<double>(epoch_tokens) : 0.0;
    rec.valid_nll = validation(rec.train_nll);
    if (!std::isfinite(rec.train_nll) || !std::isfinite(rec.valid_nll)) {
      throw DivergedError("loss became non-finite at epoch " + std::to_string(epoch));
    }
    state.epoch = epoch;
    if (rec.valid_nll < state.best_valid) {
      state.best_valid = rec.valid_nll;
      state.best_epoch = epoch;
      best = snapshot(params);
    } else {
      state.lr *= cfg.lr_decay;
    }
    state.history.push_back(rec);
    if (options.log) {
      nlohmann::json line{{"epoch", rec.epoch},
                          {"train_nll", rec.train_nll},
                          {"valid_nll", rec.valid_nll},
                          {"lr", rec.lr}};
      *options.log << line.dump() << '\n';
      options.log->flush();
    }
    if (options.on_epoch) options.on_epoch(rec);
    if (options.stop_at_valid_ppl && std::exp(rec.valid_nll) <= *options.stop_at_valid_ppl) break;
  }
  if (state.epoch > 0) restore(params, best);
  return state;
}

}  // namespace paraflow::train
