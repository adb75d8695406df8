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

#include "semorder/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semorder/encoder.hpp"
#include "semorder/errors.hpp"

namespace semorder {

Generator::Generator(Parameter& embedding, LstmCell cell, Parameter& output_bias)
    : embedding_(&embedding), cell_(cell), bias_(&output_bias) {
  if (embedding.value.rank() != 2 || embedding.value.rows() != cell_.hidden() ||
      cell_.input_dim() != cell_.hidden()) {
    throw DimensionError("generator embedding, input and hidden sizes must all agree");
  }
  if (output_bias.value.size() != embedding.value.cols()) {
    throw DimensionError("generator output bias must have one entry per word");
  }
  if (vocab() <= static_cast<std::size_t>(kFirstWordToken)) {
    throw DimensionError("generator vocabulary has no words beyond the special tokens");
  }
}

Vec Generator::logits(std::span<const double> h) const {
  Vec z(bias_->value.values().begin(), bias_->value.values().end());
  matvec_t_acc(embedding_->value, h, z);
  return z;
}

namespace {

// log softmax(z)[k] computed without forming q.
double log_prob(const Vec& z, std::size_t k) {
  const double mx = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - mx);
  return z[k] - mx - std::log(s);
}

}  // namespace

double Generator::nll(std::span<const double> v, const TokenSequence& target, GeneratorCache* cache,
                      GenerationTrace* trace) const {
  validate_tokens(target, vocab());
  const std::size_t H = hidden();
  if (v.size() != H) {
    throw DimensionError("image embedding has dimension " + std::to_string(v.size()) +
                         ", generator expects " + std::to_string(H));
  }
  const std::size_t steps = target.length + 1;
  std::vector<int> inputs{kBosToken};
  inputs.insert(inputs.end(), target.real().begin(), target.real().end());
  std::vector<int> outputs(target.real().begin(), target.real().end());
  outputs.push_back(kEosToken);

  if (cache) {
    cache->inputs = inputs;
    cache->outputs = outputs;
    cache->steps.assign(steps, {});
    cache->q.assign(steps, {});
  }
  if (trace) {
    trace->q.clear();
    trace->log_likelihood.clear();
  }

  LstmState state{Vec(v.begin(), v.end()), Vec(H, 0.0)};
  double loss = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    Vec x = embedding_column(embedding_->value, inputs[t]);
    state = lstm_step(cell_, x, state.h, state.c, cache ? &cache->steps[t] : nullptr);
    Vec z = logits(state.h);
    const double ll = log_prob(z, static_cast<std::size_t>(outputs[t]));
    loss -= ll;
    if (cache || trace) {
      Vec q = softmax(z);
      if (trace) {
        trace->q.push_back(q);
        trace->log_likelihood.push_back(ll);
      }
      if (cache) cache->q[t] = std::move(q);
    }
  }
  return loss;
}

Vec Generator::backward(const GeneratorCache& cache, double scale) {
  const std::size_t H = hidden();
  Vec dh_next(H, 0.0), dc_next(H, 0.0);
  for (std::size_t t = cache.steps.size(); t-- > 0;) {
    const auto& step = cache.steps[t];
    Vec h(H);
    for (std::size_t j = 0; j < H; ++j) h[j] = step.o[j] * step.tanh_c[j];

    Vec dz = cache.q[t];
    dz[static_cast<std::size_t>(cache.outputs[t])] -= 1.0;
    for (auto& d : dz) d *= scale;
    outer_acc(embedding_->grad, h, dz);
    axpy(1.0, dz, bias_->grad.values());
    matvec_acc(embedding_->value, dz, dh_next);

    auto g = lstm_step_backward(cell_, step, dh_next, dc_next);
    embedding_column_acc(embedding_->grad, cache.inputs[t], g.dx);
    dh_next = std::move(g.dh_prev);
    dc_next = std::move(g.dc_prev);
  }
  return dh_next;
}

TokenSequence Generator::greedy_decode(std::span<const double> v, std::size_t max_len) const {
  const std::size_t H = hidden();
  if (v.size() != H) throw DimensionError("image embedding dimension mismatch in decode");
  if (max_len == 0) throw std::invalid_argument("max_len must be at least 1");
  LstmState state{Vec(v.begin(), v.end()), Vec(H, 0.0)};
  std::vector<int> out;
  int prev = kBosToken;
  while (out.size() < max_len) {
    Vec x = embedding_column(embedding_->value, prev);
    state = lstm_step(cell_, x, state.h, state.c);
    Vec z = logits(state.h);
    z[kPadToken] = -std::numeric_limits<double>::infinity();
    z[kBosToken] = -std::numeric_limits<double>::infinity();
    if (out.empty()) z[kEosToken] = -std::numeric_limits<double>::infinity();
    // max_element returns the first maximum, so ties go to the lower id.
    const int next = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    if (next == kEosToken) break;
    out.push_back(next);
    prev = next;
  }
  return TokenSequence::unpadded(std::move(out));
}

}  // namespace semorder
