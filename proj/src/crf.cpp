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

#include "paraflow/crf.hpp"

#include <cmath>
#include <limits>

#include "paraflow/error.hpp"

namespace paraflow::crf {

namespace {

double log_sum_exp(const Eigen::VectorXd& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

void check_shapes(const Matrix& states, const CrfParams& p) {
  if (p.labels < 1) throw Error("crf", "CRF needs at least one label");
  if (states.rows() != p.dim) throw Error("crf", "state width does not match the CRF");
  const auto expected_rows = p.form == Form::kPairwise ? p.labels * p.labels : p.labels;
  if (p.weights.rows() != expected_rows || p.weights.cols() != p.dim ||
      p.bias.rows() != p.labels || p.bias.cols() != p.labels) {
    throw Error("crf", "CRF parameter shapes are inconsistent");
  }
  if (states.cols() < 1) throw Error("crf", "CRF needs at least one position");
}

void check_labels(std::span<const int> labels, const CrfParams& p, Eigen::Index length) {
  if (static_cast<Eigen::Index>(labels.size()) != length) {
    throw Error("crf", "label count does not match the number of states");
  }
  for (int y : labels) {
    if (y < 0 || y >= p.labels) throw Error("crf", "label index out of range");
  }
}

// Node potentials (labels x T) and edge potentials (T-1 matrices, labels x labels).
struct Potentials {
  Matrix unary;
  std::vector<Matrix> pair;
};

Potentials potentials(const Matrix& states, const CrfParams& p) {
  const auto T = states.cols();
  const int L = p.labels;
  Potentials out;
  if (p.form == Form::kPairwise) {
    out.unary = Matrix::Zero(L, T);
    const Matrix proj = p.weights * states;  // (L*L) x T
    for (Eigen::Index j = 0; j + 1 < T; ++j) {
      Matrix m(L, L);
      for (int a = 0; a < L; ++a) {
        for (int b = 0; b < L; ++b) m(a, b) = proj(p.weight_row(a, b), j) + p.bias(a, b);
      }
      out.pair.push_back(std::move(m));
    }
  } else {
    out.unary = p.weights * states;
    for (Eigen::Index j = 0; j + 1 < T; ++j) out.pair.push_back(p.bias);
  }
  return out;
}

}  // namespace

CrfParams CrfParams::zeros(int labels, int dim, Form form) {
  CrfParams p;
  p.labels = labels;
  p.dim = dim;
  p.form = form;
  p.weights = Matrix::Zero(form == Form::kPairwise ? labels * labels : labels, dim);
  p.bias = Matrix::Zero(labels, labels);
  return p;
}

double score_sequence(const Matrix& states, std::span<const int> labels, const CrfParams& params) {
  check_shapes(states, params);
  check_labels(labels, params, states.cols());
  const auto T = states.cols();
  double s = 0;
  for (Eigen::Index j = 0; j < T; ++j) {
    const int y = labels[static_cast<std::size_t>(j)];
    if (params.form == Form::kUnaryTransition) s += params.weights.row(y).dot(states.col(j));
    if (j + 1 < T) {
      const int y_next = labels[static_cast<std::size_t>(j + 1)];
      if (params.form == Form::kPairwise) {
        s += params.weights.row(params.weight_row(y, y_next)).dot(states.col(j));
      }
      s += params.bias(y, y_next);
    }
  }
  return s;
}

double log_partition(const Matrix& states, const CrfParams& params) {
  check_shapes(states, params);
  const auto pot = potentials(states, params);
  const int L = params.labels;
  Eigen::VectorXd alpha = pot.unary.col(0);
  Eigen::VectorXd next(L);
  for (std::size_t j = 0; j < pot.pair.size(); ++j) {
    for (int b = 0; b < L; ++b) {
      next(b) = pot.unary(b, static_cast<Eigen::Index>(j) + 1) +
                log_sum_exp(alpha + pot.pair[j].col(b));
    }
    alpha.swap(next);
  }
  return log_sum_exp(alpha);
}

NllResult nll(const Matrix& states, std::span<const int> gold, const CrfParams& params,
              bool with_gradients) {
  check_shapes(states, params);
  check_labels(gold, params, states.cols());
  const auto pot = potentials(states, params);
  const int L = params.labels;
  const auto T = states.cols();

  Matrix alpha(L, T), beta(L, T);
  alpha.col(0) = pot.unary.col(0);
  for (Eigen::Index j = 0; j + 1 < T; ++j) {
    for (int b = 0; b < L; ++b) {
      alpha(b, j + 1) = pot.unary(b, j + 1) +
                        log_sum_exp(alpha.col(j) + pot.pair[static_cast<std::size_t>(j)].col(b));
    }
  }
  const double log_z = log_sum_exp(alpha.col(T - 1));

  NllResult out;
  out.loss = log_z - score_sequence(states, gold, params);
  if (!with_gradients) return out;

  beta.col(T - 1).setZero();
  for (Eigen::Index j = T - 1; j-- > 0;) {
    const Eigen::VectorXd right = pot.unary.col(j + 1) + beta.col(j + 1);
    for (int a = 0; a < L; ++a) {
      beta(a, j) = log_sum_exp(pot.pair[static_cast<std::size_t>(j)].row(a).transpose() + right);
    }
  }

  out.d_weights = Matrix::Zero(params.weights.rows(), params.weights.cols());
  out.d_bias = Matrix::Zero(L, L);
  out.d_states = Matrix::Zero(states.rows(), T);

  if (params.form == Form::kUnaryTransition) {
    for (Eigen::Index j = 0; j < T; ++j) {
      Eigen::VectorXd d_unary = (alpha.col(j) + beta.col(j)).array() - log_z;
      d_unary = d_unary.array().exp();
      d_unary(gold[static_cast<std::size_t>(j)]) -= 1.0;
      out.d_weights += d_unary * states.col(j).transpose();
      out.d_states.col(j) += params.weights.transpose() * d_unary;
    }
  }
  for (Eigen::Index j = 0; j + 1 < T; ++j) {
    Matrix d_pair(L, L);
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) {
        d_pair(a, b) = std::exp(alpha(a, j) + pot.pair[static_cast<std::size_t>(j)](a, b) +
                                pot.unary(b, j + 1) + beta(b, j + 1) - log_z);
      }
    }
    d_pair(gold[static_cast<std::size_t>(j)], gold[static_cast<std::size_t>(j + 1)]) -= 1.0;
    out.d_bias += d_pair;
    if (params.form == Form::kPairwise) {
      for (int a = 0; a < L; ++a) {
        for (int b = 0; b < L; ++b) {
          const int row = params.weight_row(a, b);
          out.d_weights.row(row) += d_pair(a, b) * states.col(j).transpose();
          out.d_states.col(j) += d_pair(a, b) * params.weights.row(row).transpose();
        }
      }
    }
  }
  return out;
}

Decoded viterbi(const Matrix& states, const CrfParams& params) {
  check_shapes(states, params);
  const auto pot = potentials(states, params);
  const int L = params.labels;
  const auto T = states.cols();

  Eigen::VectorXd best = pot.unary.col(0);
  Eigen::VectorXd next(L);
  std::vector<std::vector<int>> back(static_cast<std::size_t>(T), std::vector<int>(L, 0));
  for (Eigen::Index j = 0; j + 1 < T; ++j) {
    const auto& pair = pot.pair[static_cast<std::size_t>(j)];
    for (int b = 0; b < L; ++b) {
      int arg = 0;
      double mx = best(0) + pair(0, b);
      for (int a = 1; a < L; ++a) {
        const double v = best(a) + pair(a, b);
        if (v > mx) {
          mx = v;
          arg = a;
        }
      }
      next(b) = mx + pot.unary(b, j + 1);
      back[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(b)] = arg;
    }
    best.swap(next);
  }
  int last = 0;
  for (int b = 1; b < L; ++b) {
    if (best(b) > best(last)) last = b;
  }
  Decoded out;
  out.labels.assign(static_cast<std::size_t>(T), 0);
  out.labels.back() = last;
  for (Eigen::Index j = T - 1; j > 0; --j) {
    out.labels[static_cast<std::size_t>(j - 1)] =
        back[static_cast<std::size_t>(j)][static_cast<std::size_t>(out.labels[static_cast<std::size_t>(j)])];
  }
  out.score = score_sequence(states, out.labels, params);
  return out;
}

ad::Expr nll_expr(const ad::Expr& states, const ad::Expr& weights, const ad::Expr& bias,
                  std::vector<int> gold, Form form) {
  CrfParams p;
  p.labels = static_cast<int>(bias.rows());
  p.dim = static_cast<int>(states.rows());
  p.form = form;
  p.weights = weights.value();
  p.bias = bias.value();
  auto r = nll(states.value(), gold, p, true);
  const int is = states.index(), iw = weights.index(), ib = bias.index();
  return states.graph().emit(
      ad::Matrix::Constant(1, 1, r.loss),
      [is, iw, ib, ds = std::move(r.d_states), dw = std::move(r.d_weights),
       db = std::move(r.d_bias)](ad::Graph& g, const ad::Matrix& d) {
        const double k = d(0, 0);
        g.accumulate(is, ds * k);
        g.accumulate(iw, dw * k);
        g.accumulate(ib, db * k);
      });
}

}  // namespace paraflow::crf
