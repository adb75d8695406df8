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

#include <memory>
#include <vector>

#include "semorder/concept.hpp"
#include "semorder/config.hpp"
#include "semorder/encoder.hpp"
#include "semorder/fusion.hpp"
#include "semorder/generator.hpp"

namespace semorder {

// The full matching network: frozen concept head, gated fusion of concepts
// and context into v, LSTM sentence encoder producing s, and the generative
// LSTM used only as a training signal on v.
//
// Parameter layout (registration order, which fixes initialisation):
//   concept.W, concept.b,
//   enc.embed (absent when shared), enc.Wx, enc.Wh, enc.b,
//   fusion.W_l, fusion.W_g, fusion.U_l, fusion.U_g,
//   gen.F, gen.Wx, gen.Wh, gen.b, gen.b_p
// With a shared embedding, gen.F is registered in place of enc.embed and the
// encoder's input width becomes H.
class MatchingModel {
 public:
  explicit MatchingModel(const TrainConfig& config);

  MatchingModel(const MatchingModel&) = delete;
  MatchingModel& operator=(const MatchingModel&) = delete;

  const TrainConfig& config() const { return config_; }
  ParameterStore& store() { return store_; }
  const ParameterStore& store() const { return store_; }

  ConceptHead& head() { return head_; }
  const ConceptHead& head() const { return head_; }
  SentenceEncoder& encoder() { return encoder_; }
  const SentenceEncoder& encoder() const { return encoder_; }
  FusionUnit& fusion() { return fusion_; }
  const FusionUnit& fusion() const { return fusion_; }
  Generator& generator() { return generator_; }
  const Generator& generator() const { return generator_; }

  // Everything except the concept head.
  std::vector<Parameter*> trainable();
  static bool is_trainable(const Parameter& p);

  ConceptScores concept_scores(const RegionFeatureSet& regions) const { return head_.predict(regions); }
  FusedImageEmbedding embed_image(std::span<const double> concepts, std::span<const double> context) const {
    return fusion_.forward(concepts, context);
  }
  Vec embed_sentence(const TokenSequence& tokens) const { return encoder_.encode(tokens); }
  // Test-time score: cosine(v, s); no generation involved.
  double similarity(std::span<const double> concepts, std::span<const double> context,
                    const TokenSequence& tokens) const;

 private:
  TrainConfig config_;
  ParameterStore store_;
  ConceptHead head_;
  SentenceEncoder encoder_;
  FusionUnit fusion_;
  Generator generator_;
};

}  // namespace semorder
