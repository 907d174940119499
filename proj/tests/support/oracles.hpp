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

// Independent reference implementations used by unit and acceptance tests.
// They favour plain enumeration over efficiency.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "paraflow/crf.hpp"
#include "paraflow/discourse.hpp"

namespace oracle {

struct CrfEnumeration {
  double log_partition = 0;
  std::vector<int> best;
  double best_score = 0;
  double probability_mass = 0;  // sum over all sequences of exp(score - logZ)
};

// Score written directly from the definition, one term per adjacent pair.
double crf_score(const Eigen::MatrixXd& states, const std::vector<int>& labels,
                 const paraflow::crf::CrfParams& params);

// Enumerates all labels^T sequences. Ties keep the lexicographically first.
CrfEnumeration crf_enumerate(const Eigen::MatrixXd& states, const paraflow::crf::CrfParams& params);

// Random CRF instance with entries in [-scale, scale].
paraflow::crf::CrfParams random_crf(int labels, int dim, paraflow::crf::Form form, double scale,
                                    std::mt19937_64& rng);
Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, double scale,
                              std::mt19937_64& rng);

// Top-down boundary walk: for each boundary descend from the root until a
// node splits it between two children.
paraflow::discourse::FlatRelationSeq flatten_walk(const paraflow::discourse::RstTree& tree);

// All binary bracketings over `edus` leaves, each leaf one sentence.
std::vector<paraflow::discourse::RstTree> binary_shapes(int edus);

// Fills relations and nuclearity of every internal node at random
// (NS, SN or NN), keeping at least one nucleus per node.
void decorate(paraflow::discourse::RstNode& node, std::mt19937_64& rng);

// METEOR from already counted alignment statistics.
double meteor_formula(int matches, int chunks, int hypothesis_length, int reference_length);

// Cosine of averaged rows.
double cosine_of_means(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b);

}  // namespace oracle
