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

#include <vector>

#include "semorder/lstm.hpp"
#include "semorder/tokens.hpp"

namespace semorder {

struct GenerationTrace {
  std::vector<Vec> q;                  // next-word distribution per step
  std::vector<double> log_likelihood;  // log q[target] per step
};

struct GeneratorCache {
  std::vector<int> inputs;   // BOS followed by the real target tokens
  std::vector<int> outputs;  // real target tokens followed by EOS
  std::vector<LstmStepCache> steps;
  std::vector<Vec> q;
};

// Generative LSTM whose initial hidden state is the image embedding. The
// word embedding F (E x G) embeds inputs as F w and scores outputs as
// softmax(F^T h + b_p), so E must equal the hidden size.
class Generator {
 public:
  Generator(Parameter& embedding, LstmCell cell, Parameter& output_bias);

  std::size_t hidden() const { return cell_.hidden(); }
  std::size_t vocab() const { return embedding_->value.cols(); }
  Parameter& embedding() { return *embedding_; }
  Parameter& output_bias() { return *bias_; }
  LstmCell& cell() { return cell_; }

  // Teacher-forced  -sum_t log q_t[target_t]  over the real tokens plus the
  // end-of-sentence step, with h_0 = v and c_0 = 0.
  double nll(std::span<const double> v, const TokenSequence& target, GeneratorCache* cache = nullptr,
             GenerationTrace* trace = nullptr) const;

  // Backpropagates `scale` * nll, accumulating parameter gradients and
  // returning d(scale * nll) / d v.
  Vec backward(const GeneratorCache& cache, double scale = 1.0);

  // Argmax decoding from v. Pad and BOS are never emitted and EOS is not
  // allowed as the first token, so at least one token is always returned;
  // decoding stops at EOS (not included) or after max_len tokens.
  TokenSequence greedy_decode(std::span<const double> v, std::size_t max_len) const;

 private:
  Vec logits(std::span<const double> h) const;

  Parameter* embedding_;
  LstmCell cell_;
  Parameter* bias_;
};

}  // namespace semorder
