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

// Minimal tape-based reverse-mode differentiation over dense Eigen matrices.
// Column vectors are n x 1 matrices; scalars are 1 x 1.

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace paraflow::ad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Owns parameters with stable addresses, iterated in insertion order.
class ParameterSet {
 public:
  Parameter& add(std::string name, Eigen::Index rows, Eigen::Index cols);
  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  Parameter* find(std::string_view name);

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  double grad_norm() const;
  // Fills every value with uniform(lo, hi) draws in insertion order.
  void init_uniform(double lo, double hi, std::mt19937_64& rng);

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.cbegin(); }
  auto end() const { return params_.cend(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Expr {
 public:
  Expr() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
  Graph& graph() const { return *graph_; }
  int index() const { return index_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Expr(Graph* g, int i) : graph_(g), index_(i) {}
  Graph* graph_ = nullptr;
  int index_ = -1;
};

class Graph {
 public:
  using Backward = std::function<void(Graph&, const Matrix& grad_out)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr constant(Matrix value);
  // Leaf bound to `p`; backward() accumulates into p.grad. Repeated calls
  // for the same parameter return the same node.
  Expr param(Parameter& p);
  // Row `row` of `table` as a column vector; gradient flows into that row.
  Expr lookup(Parameter& table, int row);

  // Adds a node computed from `inputs`. `backward` receives dL/d(output)
  // and must route gradients with accumulate().
  Expr emit(Matrix value, Backward backward);

  void accumulate(const Expr& e, const Matrix& delta);
  void accumulate(int index, const Matrix& delta);
  const Matrix& value(int index) const { return nodes_[static_cast<std::size_t>(index)].value; }

  // Seeds d(loss)/d(loss) = 1 for a 1x1 node and runs the tape in reverse.
  void backward(const Expr& loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
  };
  std::deque<Node> nodes_;
  std::vector<std::pair<const Parameter*, int>> param_nodes_;
};

inline const Matrix& Expr::value() const { return graph_->value(index_); }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr cwise_mul(const Expr& a, const Expr& b);
Expr scale(const Expr& a, double k);
Expr matmul(const Expr& a, const Expr& b);
Expr transpose(const Expr& a);
Expr tanh(const Expr& a);
Expr sigmoid(const Expr& a);
// m (r x c) plus column vector v (r x 1) added to every column.
Expr add_colwise(const Expr& m, const Expr& v);
// Vertical concatenation of column vectors (or matrices with equal cols).
Expr concat(std::span<const Expr> parts);
Expr concat(std::initializer_list<Expr> parts);
// Horizontal concatenation of column vectors into a matrix.
Expr hcat(std::span<const Expr> columns);
Expr rows(const Expr& a, Eigen::Index start, Eigen::Index count);
// Softmax of a column vector.
Expr softmax(const Expr& a);
// Sum of equally shaped expressions.
Expr sum(std::span<const Expr> parts);
// -log softmax(logits)[target] for a column vector of logits.
Expr pick_neg_log_softmax(const Expr& logits, int target);

}  // namespace paraflow::ad
