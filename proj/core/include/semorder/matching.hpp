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

#include "semorder/random.hpp"
#include "semorder/tensor.hpp"

namespace semorder {

// Rows are images, columns sentences; S(i, k) = cosine(v_i, s_k). In a
// training batch the matched pairs sit on the diagonal.
struct SimilarityMatrix {
  Tensor scores;

  SimilarityMatrix() = default;
  explicit SimilarityMatrix(Tensor s) : scores(std::move(s)) {}
  SimilarityMatrix(std::size_t images, std::size_t sentences) : scores({images, sentences}) {}

  std::size_t images() const { return scores.rows(); }
  std::size_t sentences() const { return scores.cols(); }
  double operator()(std::size_t i, std::size_t k) const { return scores.at(i, k); }
  double& operator()(std::size_t i, std::size_t k) { return scores.at(i, k); }
};

// Mismatched indices drawn for each matched pair i (row i of the batch).
struct NegativeSet {
  std::vector<std::vector<std::size_t>> sentences;  // k: terms m - s_ii + s_ik
  std::vector<std::vector<std::size_t>> images;     // k: terms m - s_ii + s_ki
};

// For each of the first `anchors` pairs, min(count, pool_size - 1) distinct
// indices in [0, pool_size) other than the pair itself, independently for
// the sentence and image directions. Throws DegenerateInputError when
// pool_size < 2.
NegativeSet sample_negatives(std::size_t pool_size, std::size_t anchors, std::size_t count, Rng& rng);
inline NegativeSet sample_negatives(std::size_t batch, std::size_t count, Rng& rng) {
  return sample_negatives(batch, batch, count, rng);
}

// sum_i sum_k max(0, m - s_ii + s_ik) + max(0, m - s_ii + s_ki).
// Throws std::invalid_argument if a negative equals its own pair index.
double matching_loss(const SimilarityMatrix& s, const NegativeSet& negatives, double margin);

// Subgradient of matching_loss with respect to S; hinge terms that are
// exactly zero contribute nothing.
Tensor matching_loss_grad(const SimilarityMatrix& s, const NegativeSet& negatives, double margin);

}  // namespace semorder
