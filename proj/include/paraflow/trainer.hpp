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
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "paraflow/models.hpp"

namespace paraflow::train {

using models::EncodedParagraph;
using models::Model;

struct EpochRecord {
  int epoch = 0;
  double train_nll = 0;  // token-mean LM NLL accumulated during the epoch
  double valid_nll = 0;  // token-mean LM NLL after the epoch
  double lr = 0;         // rate used during the epoch
};

// Optimizer and schedule state.
struct TrainState {
  int epoch = 0;
  std::vector<ad::Matrix> accumulators;  // Adagrad sums of squared gradients
  double lr = 0;
  double best_valid = 0;
  int best_epoch = 0;  // 0 means the initial parameters
  std::mt19937_64 rng;
  std::vector<EpochRecord> history;
};

struct TrainOptions {
  std::ostream* log = nullptr;  // JSON lines {epoch, train_nll, valid_nll, lr}
  // Stops once validation perplexity reaches this value.
  std::optional<double> stop_at_valid_ppl;
  std::function<void(const EpochRecord&)> on_epoch;
};

inline constexpr double kAdagradEpsilon = 1e-10;

// Predicted tokens (middle sentence tokens plus EOS) for one paragraph.
long target_tokens(const EncodedParagraph& p);

// Token-mean LM NLL over the bridging targets of `data`; 0 when empty.
double evaluate_nll(const Model& model, const std::vector<EncodedParagraph>& data);

// Rescales gradients to global norm `max_norm` when above it. Returns the
// norm before clipping.
double clip_gradients(ad::ParameterSet& params, double max_norm);

void adagrad_update(ad::ParameterSet& params, std::vector<ad::Matrix>& accumulators, double lr);

TrainState init_state(const Model& model);

// Runs config().epochs epochs of shuffled mini-batches, halving the rate
// (by lr_decay) after each epoch whose validation loss does not improve,
// and leaves the best-validation parameters in `model`. An empty validation
// set falls back to the training loss. Throws DivergedError on NaN/inf.
TrainState train(Model& model, const std::vector<EncodedParagraph>& train_set,
                 const std::vector<EncodedParagraph>& valid_set, const TrainOptions& options = {});

}  // namespace paraflow::train
