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

struct EncoderCache {
  TokenSequence tokens;
  std::vector<LstmStepCache> steps;
};

// Embeds each real token with a D x G matrix and runs an LSTM from the zero
// state; the sentence embedding is the hidden state after the last real token.
class SentenceEncoder {
 public:
  SentenceEncoder(Parameter& embedding, LstmCell cell);

  std::size_t hidden() const { return cell_.hidden(); }
  std::size_t vocab() const { return embedding_->value.cols(); }
  Parameter& embedding() { return *embedding_; }
  LstmCell& cell() { return cell_; }

  // Throws DegenerateInputError on an empty sequence and DimensionError on
  // out-of-vocabulary ids.
  Vec encode(const TokenSequence& tokens, EncoderCache* cache = nullptr) const;
  void backward(const EncoderCache& cache, std::span<const double> grad_s);

 private:
  Parameter* embedding_;
  LstmCell cell_;
};

// Column `id` of a D x G embedding matrix.
Vec embedding_column(const Tensor& embedding, int id);
void embedding_column_acc(Tensor& grad, int id, std::span<const double> g);

}  // namespace semorder
