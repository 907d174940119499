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

#include "paraflow/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "paraflow/error.hpp"

namespace paraflow {

namespace {

double checked(double v) {
  if (std::isnan(v)) throw Error("nan", "grad_check: loss is NaN");
  return v;
}

void consider(GradCheckResult& r, double a, double n, const std::string& name, long index) {
  const double denom = std::max({std::abs(a), std::abs(n), kGradCheckFloor});
  const double rel = std::abs(a - n) / denom;
  ++r.checked;
  if (r.worst_index < 0 || rel > r.max_relative_error) {
    r.max_relative_error = rel;
    r.worst_parameter = name;
    r.worst_index = index;
    r.analytic = a;
    r.numeric = n;
  }
}

}  // namespace

GradCheckResult grad_check(const std::function<double()>& f, std::span<double> point,
                           std::span<const double> analytic, double epsilon) {
  if (point.size() != analytic.size()) throw Error("shape", "grad_check: size mismatch");
  checked(f());
  GradCheckResult r;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + epsilon;
    const double up = checked(f());
    point[i] = saved - epsilon;
    const double down = checked(f());
    point[i] = saved;
    consider(r, analytic[i], (up - down) / (2 * epsilon), "x", static_cast<long>(i));
  }
  return r;
}

GradCheckResult grad_check(const std::function<ad::Expr(ad::Graph&)>& build,
                           ad::ParameterSet& params, double epsilon) {
  params.zero_grad();
  {
    ad::Graph g;
    const ad::Expr loss = build(g);
    checked(loss.scalar());
    g.backward(loss);
  }
  auto eval = [&] {
    ad::Graph g;
    return checked(build(g).scalar());
  };
  GradCheckResult r;
  for (auto& p : params) {
    const ad::Matrix analytic = p->grad;
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double& x = p->value.data()[i];
      const double saved = x;
      x = saved + epsilon;
      const double up = eval();
      x = saved - epsilon;
      const double down = eval();
      x = saved;
      consider(r, analytic.data()[i], (up - down) / (2 * epsilon), p->name, static_cast<long>(i));
    }
  }
  return r;
}

}  // namespace paraflow
