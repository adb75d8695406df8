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

#include "semorder/parameter.hpp"

#include "semorder/errors.hpp"

namespace semorder {

Parameter& ParameterStore::add(const std::string& name, Shape shape) {
  if (find(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  return params_.emplace_back(name, std::move(shape));
}

Parameter* ParameterStore::find(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Parameter* ParameterStore::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Parameter& ParameterStore::get(const std::string& name) {
  auto* p = find(name);
  if (!p) throw std::out_of_range("no parameter named " + name);
  return *p;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grads() {
  for (auto& p : params_) p.zero_grad();
}

void ParameterStore::init_uniform(Rng& rng, double range) {
  for (auto& p : params_) {
    if (p.value.rank() >= 2) {
      for (auto& v : p.value.values()) v = rng.uniform(-range, range);
    } else {
      p.value.fill(0.0);
    }
  }
}

std::vector<Tensor> ParameterStore::snapshot() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.value);
  return out;
}

void ParameterStore::restore(const std::vector<Tensor>& values) {
  if (values.size() != params_.size()) throw DimensionError("snapshot has wrong parameter count");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].shape() != params_[i].value.shape()) {
      throw DimensionError("snapshot shape mismatch for " + params_[i].name);
    }
    params_[i].value = values[i];
  }
}

}  // namespace semorder
