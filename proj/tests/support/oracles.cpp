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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

using paraflow::crf::CrfParams;
using paraflow::crf::Form;
using paraflow::discourse::EduSpan;
using paraflow::discourse::FlatRelationSeq;
using paraflow::discourse::Nuclearity;
using paraflow::discourse::RstNode;
using paraflow::discourse::RstTree;

double crf_score(const Eigen::MatrixXd& states, const std::vector<int>& labels,
                 const CrfParams& params) {
  const auto T = static_cast<int>(labels.size());
  const int L = params.labels;
  double s = 0;
  if (params.form == Form::kPairwise) {
    for (int j = 0; j + 1 < T; ++j) {
      const int row = labels[j] * L + labels[j + 1];
      for (int d = 0; d < params.dim; ++d) s += params.weights(row, d) * states(d, j);
      s += params.bias(labels[j], labels[j + 1]);
    }
  } else {
    for (int j = 0; j < T; ++j) {
      for (int d = 0; d < params.dim; ++d) s += params.weights(labels[j], d) * states(d, j);
      if (j + 1 < T) s += params.bias(labels[j], labels[j + 1]);
    }
  }
  return s;
}

CrfEnumeration crf_enumerate(const Eigen::MatrixXd& states, const CrfParams& params) {
  const auto T = static_cast<int>(states.cols());
  const int L = params.labels;
  std::vector<double> scores;
  std::vector<int> labels(static_cast<std::size_t>(T), 0);
  CrfEnumeration out;
  bool first = true;
  while (true) {
    const double s = crf_score(states, labels, params);
    scores.push_back(s);
    if (first || s > out.best_score) {
      out.best_score = s;
      out.best = labels;
      first = false;
    }
    // Odometer increment with the last position fastest, so enumeration
    // order is lexicographic.
    int pos = T - 1;
    while (pos >= 0 && labels[static_cast<std::size_t>(pos)] == L - 1) {
      labels[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++labels[static_cast<std::size_t>(pos)];
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  double acc = 0;
  for (double s : scores) acc += std::exp(s - mx);
  out.log_partition = mx + std::log(acc);
  for (double s : scores) out.probability_mass += std::exp(s - out.log_partition);
  return out;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, double scale,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

CrfParams random_crf(int labels, int dim, Form form, double scale, std::mt19937_64& rng) {
  CrfParams p;
  p.labels = labels;
  p.dim = dim;
  p.form = form;
  p.weights = random_matrix(form == Form::kPairwise ? labels * labels : labels, dim, scale, rng);
  p.bias = random_matrix(labels, labels, scale, rng);
  return p;
}

namespace {

int leaf_count(const RstNode& n) {
  if (n.is_leaf()) return 1;
  int c = 0;
  for (const auto& ch : n.children) c += leaf_count(ch);
  return c;
}

}  // namespace

FlatRelationSeq flatten_walk(const RstTree& tree) {
  const int edus = leaf_count(tree.root);
  FlatRelationSeq out;
  for (int k = 0; k + 1 < edus; ++k) {
    const RstNode* node = &tree.root;
    int offset = 0;
    while (true) {
      // Child start offsets.
      std::vector<int> starts;
      int pos = offset;
      for (const auto& ch : node->children) {
        starts.push_back(pos);
        pos += leaf_count(ch);
      }
      // Child holding EDU k, and whether it also holds EDU k + 1.
      std::size_t c = 0;
      while (c + 1 < starts.size() && starts[c + 1] <= k) ++c;
      const int child_end = starts[c] + leaf_count(node->children[c]) - 1;
      if (child_end > k) {
        node = &node->children[c];
        offset = starts[c];
        continue;
      }
      // Boundary lies between children c and c + 1 of `node`.
      std::optional<std::size_t> first_nucleus;
      for (std::size_t i = 0; i < node->children.size(); ++i) {
        if (node->children[i].nuclearity == Nuclearity::kNucleus) {
          first_nucleus = i;
          break;
        }
      }
      if (first_nucleus && *first_nucleus <= c) {
        out.emplace_back(node->relation);
      } else {
        out.emplace_back(std::nullopt);
      }
      break;
    }
  }
  return out;
}

namespace {

std::vector<RstNode> shapes_over(int first, int count) {
  if (count == 1) {
    RstNode leaf;
    leaf.span = EduSpan{first, 0, 4};
    return {leaf};
  }
  std::vector<RstNode> out;
  for (int left = 1; left < count; ++left) {
    for (const auto& l : shapes_over(first, left)) {
      for (const auto& r : shapes_over(first + left, count - left)) {
        RstNode n;
        n.relation = "R";
        n.children = {l, r};
        out.push_back(n);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<RstTree> binary_shapes(int edus) {
  std::vector<RstTree> out;
  for (auto& n : shapes_over(0, edus)) out.push_back(RstTree{std::move(n)});
  return out;
}

void decorate(RstNode& node, std::mt19937_64& rng) {
  static const char* kNames[] = {"Elaboration", "Attribution", "Contrast", "Cause", "Joint"};
  if (node.is_leaf()) return;
  node.relation = kNames[rng() % 5];
  for (auto& c : node.children) {
    c.nuclearity = rng() % 2 ? Nuclearity::kNucleus : Nuclearity::kSatellite;
  }
  const bool any = std::any_of(node.children.begin(), node.children.end(),
                               [](const RstNode& c) { return c.nuclearity == Nuclearity::kNucleus; });
  if (!any) node.children[rng() % node.children.size()].nuclearity = Nuclearity::kNucleus;
  for (auto& c : node.children) decorate(c, rng);
}

double meteor_formula(int matches, int chunks, int hypothesis_length, int reference_length) {
  if (matches == 0) return 0.0;
  const double p = static_cast<double>(matches) / hypothesis_length;
  const double r = static_cast<double>(matches) / reference_length;
  const double fmean = 10.0 * p * r / (r + 9.0 * p);
  const double penalty = 0.5 * std::pow(static_cast<double>(chunks) / matches, 3.0);
  return fmean * (1.0 - penalty);
}

double cosine_of_means(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  const auto dim = a.front().size();
  std::vector<double> ma(static_cast<std::size_t>(dim), 0.0), mb(static_cast<std::size_t>(dim), 0.0);
  for (const auto& v : a) {
    for (Eigen::Index d = 0; d < dim; ++d) ma[static_cast<std::size_t>(d)] += v(d) / static_cast<double>(a.size());
  }
  for (const auto& v : b) {
    for (Eigen::Index d = 0; d < dim; ++d) mb[static_cast<std::size_t>(d)] += v(d) / static_cast<double>(b.size());
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t d = 0; d < ma.size(); ++d) {
    dot += ma[d] * mb[d];
    na += ma[d] * ma[d];
    nb += mb[d] * mb[d];
  }
  return dot / std::sqrt(na * nb);
}

}  // namespace oracle
