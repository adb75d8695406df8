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

#include "semorder/ops.hpp"
#include "semorder/parameter.hpp"

namespace semorder {

// r >= 1 feature vectors of equal dimension, one per image region.
struct RegionFeatureSet {
  std::string image_id;
  std::vector<Vec> regions;
};

// Multi-hot groundtruth over the K concepts.
using ConceptLabels = std::vector<std::uint8_t>;
// Per-concept confidences in [0, 1].
using ConceptScores = Vec;

// Shared linear-sigmoid head applied to every region: sigmoid(W x + b).
class ConceptHead {
 public:
  // Registers "<prefix>.W" (K x I) and "<prefix>.b" (K) in the store.
  ConceptHead(ParameterStore& store, std::size_t feature_dim, std::size_t concepts,
              const std::string& prefix = "concept");
  // Binds to parameters already present in the store.
  static ConceptHead bind(ParameterStore& store, const std::string& prefix = "concept");

  std::size_t feature_dim() const { return weight_->value.cols(); }
  std::size_t concepts() const { return weight_->value.rows(); }
  Parameter& weight() { return *weight_; }
  Parameter& bias() { return *bias_; }
  std::vector<Parameter*> parameters() { return {weight_, bias_}; }

  Vec logits(std::span<const double> feature) const;
  Vec predict_region(std::span<const double> feature) const;
  // Region predictions max-pooled into one score vector.
  ConceptScores predict(const RegionFeatureSet& image) const;

  // Accumulates d loss / d(W, b) given d loss / d logits for one region.
  void backward(std::span<const double> feature, std::span<const double> grad_logits);

 private:
  ConceptHead(Parameter* w, Parameter* b) : weight_(w), bias_(b) {}
  Parameter* weight_;
  Parameter* bias_;
};

// Element-wise maximum across region score vectors.
ConceptScores maxpool_scores(std::span<const Vec> scores);

// sum_c log(1 + exp(-y_c z_c)) over logits z with labels remapped to {-1, +1}.
double multilabel_loss(std::span<const double> logits, const ConceptLabels& labels);
Vec multilabel_loss_grad(std::span<const double> logits, const ConceptLabels& labels);

struct ConceptExample {
  RegionFeatureSet image;
  ConceptLabels labels;
};

struct HeadTrainConfig {
  double lr = 0.05;
  std::size_t epochs = 60;
  std::size_t batch_size = 16;  // images per update
  std::uint64_t seed = 1;
};

struct HeadTrainResult {
  // Mean per-region loss over each epoch.
  std::vector<double> loss_trace;
};

// Trains the head on per-region examples, every region of an image carrying
// that image's labels. Throws DegenerateInputError on an empty dataset.
HeadTrainResult train_concept_head(ConceptHead& head, std::span<const ConceptExample> data,
                                   const HeadTrainConfig& config);

}  // namespace semorder
