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

#include "paraflow/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "paraflow/error.hpp"

namespace paraflow::ad {

Parameter& ParameterSet::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (find(name)) throw Error("param", "duplicate parameter '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->value = Matrix::Zero(rows, cols);
  p->grad = Matrix::Zero(rows, cols);
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter* ParameterSet::find(std::string_view name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

Parameter& ParameterSet::get(std::string_view name) {
  if (auto* p = find(name)) return *p;
  throw Error("param", "no parameter named '" + std::string(name) + "'");
}

const Parameter& ParameterSet::get(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->get(name);
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

double ParameterSet::grad_norm() const {
  double sq = 0;
  for (const auto& p : params_) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

void ParameterSet::init_uniform(double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(lo, hi);
  for (auto& p : params_) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = uni(rng);
  }
}

Expr Graph::emit(Matrix value, Backward backward) {
  nodes_.push_back(Node{std::move(value), Matrix(), std::move(backward)});
  return Expr(this, static_cast<int>(nodes_.size()) - 1);
}

Expr Graph::constant(Matrix value) { return emit(std::move(value), nullptr); }

Expr Graph::param(Parameter& p) {
  for (const auto& [ptr, idx] : param_nodes_) {
    if (ptr == &p) return Expr(this, idx);
  }
  Parameter* target = &p;
  Expr e = emit(p.value, [target](Graph&, const Matrix& g) { target->grad += g; });
  param_nodes_.emplace_back(&p, e.index());
  return e;
}

Expr Graph::lookup(Parameter& table, int row) {
  if (row < 0 || row >= table.value.rows()) throw Error("lookup", "embedding row out of range");
  Parameter* target = &table;
  return emit(table.value.row(row).transpose(), [target, row](Graph&, const Matrix& g) {
    target->grad.row(row) += g.transpose();
  });
}

void Graph::accumulate(int index, const Matrix& delta) {
  auto& node = nodes_[static_cast<std::size_t>(index)];
  if (node.grad.size() == 0) {
    node.grad = delta;
  } else {
    node.grad += delta;
  }
}

void Graph::accumulate(const Expr& e, const Matrix& delta) { accumulate(e.index(), delta); }

void Graph::backward(const Expr& loss) {
  if (loss.rows() != 1 || loss.cols() != 1) throw Error("backward", "loss must be a scalar");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[static_cast<std::size_t>(loss.index())].grad = Matrix::Ones(1, 1);
  for (int i = loss.index(); i >= 0; --i) {
    auto& node = nodes_[static_cast<std::size_t>(i)];
    if (node.grad.size() == 0 || !node.backward) continue;
    node.backward(*this, node.grad);
  }
}

namespace {

void check_same_shape(const Expr& a, const Expr& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("shape", std::string(op) + ": shape mismatch");
  }
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  check_same_shape(a, b, "add");
  const int ia = a.index(), ib = b.index();
  return a.graph().emit(a.value() + b.value(), [ia, ib](Graph& g, const Matrix& d) {
    g.accumulate(ia, d);
    g.accumulate(ib, d);
  });
}

Expr operator-(const Expr& a, const Expr& b) {
  check_same_shape(a, b, "sub");
  const int ia = a.index(), ib = b.index();
  return a.graph().emit(a.value() - b.value(), [ia, ib](Graph& g, const Matrix& d) {
    g.accumulate(ia, d);
    g.accumulate(ib, -d);
  });
}

Expr cwise_mul(const Expr& a, const Expr& b) {
  check_same_shape(a, b, "cwise_mul");
  const int ia = a.index(), ib = b.index();
  return a.graph().emit(a.value().cwiseProduct(b.value()), [ia, ib](Graph& g, const Matrix& d) {
    g.accumulate(ia, d.cwiseProduct(g.value(ib)));
    g.accumulate(ib, d.cwiseProduct(g.value(ia)));
  });
}

Expr scale(const Expr& a, double k) {
  const int ia = a.index();
  return a.graph().emit(a.value() * k, [ia, k](Graph& g, const Matrix& d) { g.accumulate(ia, d * k); });
}

Expr matmul(const Expr& a, const Expr& b) {
  if (a.cols() != b.rows()) throw Error("shape", "matmul: inner dimensions differ");
  const int ia = a.index(), ib = b.index();
  return a.graph().emit(a.value() * b.value(), [ia, ib](Graph& g, const Matrix& d) {
    g.accumulate(ia, d * g.value(ib).transpose());
    g.accumulate(ib, g.value(ia).transpose() * d);
  });
}

Expr transpose(const Expr& a) {
  const int ia = a.index();
  return a.graph().emit(a.value().transpose(),
                        [ia](Graph& g, const Matrix& d) { g.accumulate(ia, d.transpose()); });
}

Expr tanh(const Expr& a) {
  Matrix y = a.value().array().tanh().matrix();
  const int ia = a.index();
  Matrix local = (1.0 - y.array().square()).matrix();
  return a.graph().emit(std::move(y), [ia, local = std::move(local)](Graph& g, const Matrix& d) {
    g.accumulate(ia, d.cwiseProduct(local));
  });
}

Expr sigmoid(const Expr& a) {
  Matrix y = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  const int ia = a.index();
  Matrix local = (y.array() * (1.0 - y.array())).matrix();
  return a.graph().emit(std::move(y), [ia, local = std::move(local)](Graph& g, const Matrix& d) {
    g.accumulate(ia, d.cwiseProduct(local));
  });
}

Expr add_colwise(const Expr& m, const Expr& v) {
  if (v.cols() != 1 || v.rows() != m.rows()) throw Error("shape", "add_colwise: bad vector");
  const int im = m.index(), iv = v.index();
  Matrix out = m.value().colwise() + v.value().col(0);
  return m.graph().emit(std::move(out), [im, iv](Graph& g, const Matrix& d) {
    g.accumulate(im, d);
    g.accumulate(iv, d.rowwise().sum());
  });
}

Expr concat(std::span<const Expr> parts) {
  if (parts.empty()) throw Error("shape", "concat: no parts");
  const auto cols = parts.front().cols();
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw Error("shape", "concat: column mismatch");
    total += p.rows();
  }
  Matrix out(total, cols);
  std::vector<std::pair<int, Eigen::Index>> pieces;  // (node, rows)
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    pieces.emplace_back(p.index(), p.rows());
    at += p.rows();
  }
  return parts.front().graph().emit(std::move(out), [pieces](Graph& g, const Matrix& d) {
    Eigen::Index off = 0;
    for (const auto& [idx, n] : pieces) {
      g.accumulate(idx, d.middleRows(off, n));
      off += n;
    }
  });
}

Expr concat(std::initializer_list<Expr> parts) {
  return concat(std::span<const Expr>(parts.begin(), parts.size()));
}

Expr hcat(std::span<const Expr> columns) {
  if (columns.empty()) throw Error("shape", "hcat: no columns");
  const auto n = columns.front().rows();
  Matrix out(n, static_cast<Eigen::Index>(columns.size()));
  std::vector<int> idx;
  idx.reserve(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].rows() != n || columns[j].cols() != 1) throw Error("shape", "hcat: bad column");
    out.col(static_cast<Eigen::Index>(j)) = columns[j].value().col(0);
    idx.push_back(columns[j].index());
  }
  return columns.front().graph().emit(std::move(out), [idx](Graph& g, const Matrix& d) {
    for (std::size_t j = 0; j < idx.size(); ++j) g.accumulate(idx[j], d.col(static_cast<Eigen::Index>(j)));
  });
}

Expr rows(const Expr& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || start + count > a.rows()) throw Error("shape", "rows: out of range");
  const int ia = a.index();
  const auto total = a.rows();
  return a.graph().emit(a.value().middleRows(start, count),
                        [ia, start, count, total](Graph& g, const Matrix& d) {
                          Matrix full = Matrix::Zero(total, d.cols());
                          full.middleRows(start, count) = d;
                          g.accumulate(ia, full);
                        });
}

Expr softmax(const Expr& a) {
  if (a.cols() != 1) throw Error("shape", "softmax: expects a column vector");
  const Vector x = a.value().col(0);
  Vector p = (x.array() - x.maxCoeff()).exp().matrix();
  p /= p.sum();
  const int ia = a.index();
  Matrix out = p;
  return a.graph().emit(std::move(out), [ia, p](Graph& g, const Matrix& d) {
    const double dot = p.dot(d.col(0));
    Matrix dx = (p.array() * (d.col(0).array() - dot)).matrix();
    g.accumulate(ia, dx);
  });
}

Expr sum(std::span<const Expr> parts) {
  if (parts.empty()) throw Error("shape", "sum: no parts");
  Matrix out = parts.front().value();
  std::vector<int> idx{parts.front().index()};
  for (std::size_t i = 1; i < parts.size(); ++i) {
    check_same_shape(parts.front(), parts[i], "sum");
    out += parts[i].value();
    idx.push_back(parts[i].index());
  }
  return parts.front().graph().emit(std::move(out), [idx](Graph& g, const Matrix& d) {
    for (int i : idx) g.accumulate(i, d);
  });
}

Expr pick_neg_log_softmax(const Expr& logits, int target) {
  if (logits.cols() != 1 || target < 0 || target >= logits.rows()) {
    throw Error("shape", "pick_neg_log_softmax: bad logits or target");
  }
  const Vector x = logits.value().col(0);
  const double mx = x.maxCoeff();
  Vector p = (x.array() - mx).exp().matrix();
  const double z = p.sum();
  p /= z;
  const double loss = std::log(z) + mx - x(target);
  const int il = logits.index();
  return logits.graph().emit(Matrix::Constant(1, 1, loss), [il, p, target](Graph& g, const Matrix& d) {
    Matrix dx = p;
    dx(target, 0) -= 1.0;
    g.accumulate(il, dx * d(0, 0));
  });
}

}  // namespace paraflow::ad
