// Copyright 2026 The semorder Authors.
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
#include <map>
#include <string>
#include <vector>

#include "semorder/parameter.hpp"

namespace semorder {

using GradientMap = std::map<std::string, Tensor>;
using ScalarFn = std::function<double(const ParameterStore&)>;
using ParamFilter = std::function<bool(const Parameter&)>;

// Central differences (f(theta + h) - f(theta - h)) / 2h for every scalar of
// every parameter accepted by `filter` (all parameters when empty). The store
// is perturbed in place and restored exactly. Throws EvaluationError on a
// non-finite evaluation.
GradientMap finite_diff_grad(const ScalarFn& f, ParameterStore& store, double step = 1e-5,
                             const ParamFilter& filter = {});

// Central-difference derivative of a function of a plain vector.
std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double step = 1e-5);

// ||a - b|| / (||a|| + ||b||); zero when both vanish.
double relative_error(std::span<const double> a, std::span<const double> b);

struct GradCheckReport {
  std::map<std::string, double> per_parameter;
  double max_relative_error = 0.0;
};

// Compares the analytic gradients held in the store against `numeric`.
GradCheckReport compare_gradients(const ParameterStore& store, const GradientMap& numeric);

}  // namespace semorder
