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
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "semorder/matching.hpp"
#include "semorder/model.hpp"
#include "semorder/optim.hpp"
#include "semorder/retrieval.hpp"

namespace semorder {

// Aligned image/caption pairs: image i matches caption i. Concept scores
// come from the frozen head, so they are computed once up front.
struct PairSet {
  std::vector<ConceptScores> concepts;
  std::vector<Vec> contexts;
  std::vector<TokenSequence> captions;

  std::size_t size() const { return captions.size(); }
};

struct StepLosses {
  double total = 0;       // L = L_mat + lambda * L_gen
  double matching = 0;    // L_mat
  double generation = 0;  // L_gen (zero when generation is off)
};

// Joint objective over a set of pairs. `items` indexes into `data`; the
// first `anchors` of them are the matched pairs of the batch and the rest
// only serve as negatives. Negative indices are positions within `items`.
// With accumulate_grads, parameter gradients are added into the store
// (callers zero them first).
StepLosses joint_loss(MatchingModel& model, const PairSet& data, std::span<const std::size_t> items,
                      std::size_t anchors, const NegativeSet& negatives, bool accumulate_grads);

struct EpochMetrics {
  std::size_t epoch = 0;
  double loss = 0, l_mat = 0, l_gen = 0;
  double val_mr = 0;
};

using EpochCallback = std::function<bool(const EpochMetrics&, MatchingModel&)>;

struct TrainResult {
  std::vector<StepLosses> steps;
  std::vector<EpochMetrics> epochs;
  double best_val_mr = -1.0;
  std::size_t best_epoch = 0;
};

// Owns the optimizer and the sampling stream for one training run.
class JointTrainer {
 public:
  explicit JointTrainer(MatchingModel& model);

  // One update on `batch` (indices into data). Negatives come from the batch
  // when it holds more than `negatives` pairs, otherwise from `pool` (by
  // convention the whole training split, which should include the batch).
  // Throws NumericError if the loss or any gradient is non-finite.
  StepLosses step(const PairSet& data, std::span<const std::size_t> batch, std::span<const std::size_t> pool);

  // Full training loop with per-epoch validation mR. The parameters with
  // the best validation mR are restored into the model at the end. The
  // callback may request an early stop by returning true.
  TrainResult train(const PairSet& train, const PairSet& val, const EpochCallback& on_epoch = {});

  Rng& rng() { return rng_; }

 private:
  MatchingModel& model_;
  Adam opt_;
  Rng rng_;
};

SimilarityMatrix similarity_matrix(const MatchingModel& model, const PairSet& data);

// Metrics trace: header "epoch,L,L_mat,L_gen,val_mR" then one row per epoch.
void write_metrics_csv(std::ostream& os, std::span<const EpochMetrics> epochs);

}  // namespace semorder
