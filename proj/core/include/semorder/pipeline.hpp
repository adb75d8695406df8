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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semorder/corpus.hpp"
#include "semorder/retrieval.hpp"
#include "semorder/trainer.hpp"

namespace semorder {

// Copies the corpus dimensions (I, K, D, G, J, r) into `base`.
TrainConfig config_for_corpus(const CorpusManifest& manifest, TrainConfig base);

std::vector<ConceptExample> concept_examples(const Corpus& corpus, std::span<const std::size_t> indices);

// Pairs for the given scenes with concept scores from the model's head.
// With `corrupted`, each image is paired with its role-swapped caption.
PairSet make_pairs(const MatchingModel& model, const Corpus& corpus, std::span<const std::size_t> indices,
                   bool corrupted = false);

struct ExperimentResult {
  HeadTrainResult head;
  TrainResult train;
  RetrievalReport test;
};

// Trains the concept head on the training split, then the joint model with
// validation-based selection, then evaluates on the test split.
ExperimentResult run_experiment(MatchingModel& model, const Corpus& corpus, const EpochCallback& on_epoch = {});

// Fraction of scenes whose image scores higher against the canonical caption
// than against the role-swapped one.
double order_sensitivity(const MatchingModel& model, const Corpus& corpus, std::span<const std::size_t> indices);

struct AblationVariant {
  std::string name;
  FusionMode fusion;
  bool generation;
};

// gate+gen, gate, sum, context-only.
std::vector<AblationVariant> default_ablation_variants();

struct AblationRow {
  AblationVariant variant;
  std::vector<double> mr_per_seed;
  std::vector<RetrievalReport> reports;
  double mean_mr = 0;
};

// Every variant trained once per seed on the same corpus; the seed sets
// both initialisation and sampling.
std::vector<AblationRow> run_ablation(const Corpus& corpus, const TrainConfig& base,
                                      std::span<const AblationVariant> variants,
                                      std::span<const std::uint64_t> seeds);

// ---------------------------------------------------------------------------
// Finite-difference suites

struct GradCheckSuite {
  std::string module;
  std::size_t points = 0;
  double max_relative_error = 0;
};

// concept-head, lstm-cell, encoder, fusion-gate, fusion-sum, generator,
// matching-hinge and joint-loss, each checked at `points` seeded points.
std::vector<GradCheckSuite> run_gradcheck_suites(std::uint64_t seed, std::size_t points = 10);

}  // namespace semorder
