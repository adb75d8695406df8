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

#include "semorder/matching.hpp"

#include <stdexcept>
#include <string>

#include "semorder/errors.hpp"

namespace semorder {

NegativeSet sample_negatives(std::size_t pool_size, std::size_t anchors, std::size_t count, Rng& rng) {
  if (pool_size < 2) throw DegenerateInputError("negative sampling needs at least two pairs");
  if (anchors > pool_size) throw std::invalid_argument("more anchors than pool entries");
  NegativeSet out;
  out.sentences.resize(anchors);
  out.images.resize(anchors);
  std::vector<std::size_t> others;
  others.reserve(pool_size - 1);
  for (std::size_t i = 0; i < anchors; ++i) {
    others.clear();
    for (std::size_t k = 0; k < pool_size; ++k) {
      if (k != i) others.push_back(k);
    }
    out.sentences[i] = rng.sample(others, count);
    out.images[i] = rng.sample(others, count);
  }
  return out;
}

namespace {

void check(const SimilarityMatrix& s, const NegativeSet& neg) {
  if (neg.sentences.size() != neg.images.size()) throw std::invalid_argument("negative set directions differ");
  if (neg.sentences.size() > s.images() || neg.sentences.size() > s.sentences()) {
    throw DimensionError("more anchors than similarity rows/cols");
  }
  for (std::size_t i = 0; i < neg.sentences.size(); ++i) {
    for (auto k : neg.sentences[i]) {
      if (k == i) throw std::invalid_argument("negative index equals positive index " + std::to_string(i));
      if (k >= s.sentences()) throw DimensionError("negative sentence index out of range");
    }
    for (auto k : neg.images[i]) {
      if (k == i) throw std::invalid_argument("negative index equals positive index " + std::to_string(i));
      if (k >= s.images()) throw DimensionError("negative image index out of range");
    }
  }
}

}  // namespace

double matching_loss(const SimilarityMatrix& s, const NegativeSet& neg, double margin) {
  check(s, neg);
  double loss = 0.0;
  for (std::size_t i = 0; i < neg.sentences.size(); ++i) {
    const double pos = s(i, i);
    for (auto k : neg.sentences[i]) loss += std::max(0.0, margin - pos + s(i, k));
    for (auto k : neg.images[i]) loss += std::max(0.0, margin - pos + s(k, i));
  }
  return loss;
}

Tensor matching_loss_grad(const SimilarityMatrix& s, const NegativeSet& neg, double margin) {
  check(s, neg);
  Tensor g(s.scores.shape());
  for (std::size_t i = 0; i < neg.sentences.size(); ++i) {
    const double pos = s(i, i);
    for (auto k : neg.sentences[i]) {
      if (margin - pos + s(i, k) > 0.0) {
        g.at(i, i) -= 1.0;
        g.at(i, k) += 1.0;
      }
    }
    for (auto k : neg.images[i]) {
      if (margin - pos + s(k, i) > 0.0) {
        g.at(i, i) -= 1.0;
        g.at(k, i) += 1.0;
      }
    }
  }
  return g;
}

}  // namespace semorder
