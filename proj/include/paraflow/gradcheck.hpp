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
#include <span>
#include <string>

#include "paraflow/autodiff.hpp"

namespace paraflow {

struct GradCheckResult {
  double max_relative_error = 0;
  std::string worst_parameter;
  long worst_index = -1;
  double analytic = 0;
  double numeric = 0;
  long checked = 0;
};

// Relative error |a - n| / max(|a|, |n|, kGradCheckFloor). The floor keeps
// entries whose true derivative is ~0 from dividing noise by noise.
inline constexpr double kGradCheckFloor = 1e-6;

// Central differences on `f` around `point`, compared with `analytic`.
// `point` is restored before returning. Throws Error("nan") on a NaN loss.
GradCheckResult grad_check(const std::function<double()>& f, std::span<double> point,
                           std::span<const double> analytic, double epsilon = 1e-4);

// Builds the loss with `build` on a fresh graph, backpropagates, and checks
// every scalar of every parameter in `params`.
GradCheckResult grad_check(const std::function<ad::Expr(ad::Graph&)>& build,
                           ad::ParameterSet& params, double epsilon = 1e-4);

}  // namespace paraflow
