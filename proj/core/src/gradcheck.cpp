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

#include "semorder/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "semorder/errors.hpp"
#include "semorder/ops.hpp"

namespace semorder {

namespace {

double checked(double v) {
  if (!std::isfinite(v)) throw EvaluationError("finite-difference evaluation returned a non-finite value");
  return v;
}

}  // namespace

GradientMap finite_diff_grad(const ScalarFn& f, ParameterStore& store, double step,
                             const ParamFilter& filter) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  GradientMap out;
  for (auto& p : store) {
    if (filter && !filter(p)) continue;
    Tensor g(p.value.shape());
    auto vals = p.value.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double saved = vals[i];
      vals[i] = saved + step;
      const double fp = checked(f(store));
      vals[i] = saved - step;
      const double fm = checked(f(store));
      vals[i] = saved;
      g[i] = (fp - fm) / (2.0 * step);
    }
    out.emplace(p.name, std::move(g));
  }
  return out;
}

std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double fp = checked(f(x));
    x[i] = saved - step;
    const double fm = checked(f(x));
    x[i] = saved;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - b[i]) * (a[i] - b[i]);
  const double denom = norm2(a) + norm2(b);
  if (denom == 0.0) return 0.0;
  return std::sqrt(diff) / denom;
}

GradCheckReport compare_gradients(const ParameterStore& store, const GradientMap& numeric) {
  GradCheckReport report;
  for (const auto& [name, g] : numeric) {
    const auto* p = store.find(name);
    if (!p) throw std::out_of_range("numeric gradient for unknown parameter " + name);
    const double e = relative_error(p->grad.values(), g.values());
    report.per_parameter[name] = e;
    report.max_relative_error = std::max(report.max_relative_error, e);
  }
  return report;
}

}  // namespace semorder
