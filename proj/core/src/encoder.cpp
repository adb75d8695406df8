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

#include "semorder/encoder.hpp"

#include <string>

#include "semorder/errors.hpp"

namespace semorder {

TokenSequence TokenSequence::padded(std::vector<int> tokens, std::size_t width) {
  if (tokens.size() > width) {
    throw DimensionError("sentence of length " + std::to_string(tokens.size()) + " exceeds width " +
                         std::to_string(width));
  }
  TokenSequence t;
  t.length = tokens.size();
  t.ids = std::move(tokens);
  t.ids.resize(width, kPadToken);
  return t;
}

TokenSequence TokenSequence::unpadded(std::vector<int> tokens) {
  const auto n = tokens.size();
  return padded(std::move(tokens), n);
}

bool TokenSequence::operator==(const TokenSequence& o) const {
  if (length != o.length) return false;
  for (std::size_t i = 0; i < length; ++i) {
    if (ids[i] != o.ids[i]) return false;
  }
  return true;
}

void validate_tokens(const TokenSequence& tokens, std::size_t vocab) {
  if (tokens.length == 0) throw DegenerateInputError("empty token sequence");
  if (tokens.length > tokens.ids.size()) throw DimensionError("token sequence length exceeds its ids");
  for (int id : tokens.real()) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw DimensionError("token id " + std::to_string(id) + " outside vocabulary of " +
                           std::to_string(vocab));
    }
  }
}

Vec embedding_column(const Tensor& embedding, int id) {
  const std::size_t D = embedding.rows();
  Vec out(D);
  for (std::size_t d = 0; d < D; ++d) out[d] = embedding.at(d, static_cast<std::size_t>(id));
  return out;
}

void embedding_column_acc(Tensor& grad, int id, std::span<const double> g) {
  for (std::size_t d = 0; d < g.size(); ++d) grad.at(d, static_cast<std::size_t>(id)) += g[d];
}

SentenceEncoder::SentenceEncoder(Parameter& embedding, LstmCell cell)
    : embedding_(&embedding), cell_(cell) {
  if (embedding.value.rank() != 2 || embedding.value.rows() != cell_.input_dim()) {
    throw DimensionError("encoder embedding rows must equal the cell input dimension");
  }
}

Vec SentenceEncoder::encode(const TokenSequence& tokens, EncoderCache* cache) const {
  validate_tokens(tokens, vocab());
  const std::size_t H = hidden();
  LstmState state{Vec(H, 0.0), Vec(H, 0.0)};
  if (cache) {
    cache->tokens = tokens;
    cache->steps.assign(tokens.length, {});
  }
  for (std::size_t t = 0; t < tokens.length; ++t) {
    Vec x = embedding_column(embedding_->value, tokens.ids[t]);
    state = lstm_step(cell_, x, state.h, state.c, cache ? &cache->steps[t] : nullptr);
  }
  return state.h;
}

void SentenceEncoder::backward(const EncoderCache& cache, std::span<const double> grad_s) {
  const std::size_t H = hidden();
  Vec dh(grad_s.begin(), grad_s.end());
  Vec dc(H, 0.0);
  for (std::size_t t = cache.steps.size(); t-- > 0;) {
    auto g = lstm_step_backward(cell_, cache.steps[t], dh, dc);
    embedding_column_acc(embedding_->grad, cache.tokens.ids[t], g.dx);
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }
}

}  // namespace semorder
