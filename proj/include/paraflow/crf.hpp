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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "paraflow/autodiff.hpp"

namespace paraflow::crf {

using Matrix = Eigen::MatrixXd;

// kPairwise scores each adjacent label pair against the hidden state of the
// left token:  S = sum_{j<T} W[y_j, y_{j+1}] . h_j + b[y_j, y_{j+1}].
// kUnaryTransition is the conventional split (U[y_j] . h_j for every j plus
// b[y_j, y_{j+1}]), kept for ablations.
enum class Form { kPairwise, kUnaryTransition };

struct CrfParams {
  int labels = 1;
  int dim = 0;
  Form form = Form::kPairwise;
  // kPairwise: (labels*labels) x dim, row = prev * labels + next.
  // kUnaryTransition: labels x dim.
  Matrix weights;
  Matrix bias;  // labels x labels

  static CrfParams zeros(int labels, int dim, Form form = Form::kPairwise);
  int weight_row(int prev, int next) const { return prev * labels + next; }
};

// `states` is dim x T, column j holding h_j.
double score_sequence(const Matrix& states, std::span<const int> labels, const CrfParams& params);
double log_partition(const Matrix& states, const CrfParams& params);

struct NllResult {
  double loss = 0;
  Matrix d_weights;
  Matrix d_bias;
  Matrix d_states;
};

// log Z - S(gold), with exact gradients from pairwise marginals.
NllResult nll(const Matrix& states, std::span<const int> gold, const CrfParams& params,
              bool with_gradients = true);

struct Decoded {
  std::vector<int> labels;
  double score = 0;
};

// Max-score sequence; ties go to the lowest label index.
Decoded viterbi(const Matrix& states, const CrfParams& params);

// Tape node computing nll(states, gold) with gradients into all three inputs.
// `states` is dim x T, `weights`/`bias` shaped as in CrfParams.
ad::Expr nll_expr(const ad::Expr& states, const ad::Expr& weights, const ad::Expr& bias,
                  std::vector<int> gold, Form form = Form::kPairwise);

}  // namespace paraflow::crf
