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

#include "semorder/concept.hpp"

#include <algorithm>
#include <numeric>

#include "semorder/errors.hpp"
#include "semorder/optim.hpp"

namespace semorder {

ConceptHead::ConceptHead(ParameterStore& store, std::size_t feature_dim, std::size_t concepts,
                         const std::string& prefix)
    : weight_(&store.add(prefix + ".W", {concepts, feature_dim})),
      bias_(&store.add(prefix + ".b", {concepts})) {}

ConceptHead ConceptHead::bind(ParameterStore& store, const std::string& prefix) {
  return ConceptHead(&store.get(prefix + ".W"), &store.get(prefix + ".b"));
}

Vec ConceptHead::logits(std::span<const double> feature) const {
  if (feature.size() != feature_dim()) {
    throw DimensionError("region feature has dimension " + std::to_string(feature.size()) +
                         ", head expects " + std::to_string(feature_dim()));
  }
  Vec z(bias_->value.values().begin(), bias_->value.values().end());
  matvec_acc(weight_->value, feature, z);
  return z;
}

Vec ConceptHead::predict_region(std::span<const double> feature) const {
  Vec z = logits(feature);
  for (auto& v : z) v = sigmoid(v);
  return z;
}

ConceptScores ConceptHead::predict(const RegionFeatureSet& image) const {
  std::vector<Vec> scores;
  scores.reserve(image.regions.size());
  for (const auto& r : image.regions) scores.push_back(predict_region(r));
  return maxpool_scores(scores);
}

void ConceptHead::backward(std::span<const double> feature, std::span<const double> grad_logits) {
  outer_acc(weight_->grad, grad_logits, feature);
  axpy(1.0, grad_logits, bias_->grad.values());
}

ConceptScores maxpool_scores(std::span<const Vec> scores) {
  if (scores.empty()) throw DegenerateInputError("max-pooling over zero regions");
  ConceptScores out = scores.front();
  for (const auto& s : scores.subspan(1)) {
    if (s.size() != out.size()) throw DimensionError("region score vectors differ in length");
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::max(out[c], s[c]);
  }
  return out;
}

namespace {

double signed_label(std::uint8_t y) { return y ? 1.0 : -1.0; }

void check_labels(std::span<const double> logits, const ConceptLabels& labels) {
  if (logits.size() != labels.size()) {
    throw DimensionError("logit count " + std::to_string(logits.size()) + " != label count " +
                         std::to_string(labels.size()));
  }
}

}  // namespace

double multilabel_loss(std::span<const double> logits, const ConceptLabels& labels) {
  check_labels(logits, labels);
  double loss = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) loss += softplus(-signed_label(labels[c]) * logits[c]);
  return loss;
}

Vec multilabel_loss_grad(std::span<const double> logits, const ConceptLabels& labels) {
  check_labels(logits, labels);
  Vec g(logits.size());
  for (std::size_t c = 0; c < logits.size(); ++c) {
    const double y = signed_label(labels[c]);
    g[c] = -y * sigmoid(-y * logits[c]);
  }
  return g;
}

HeadTrainResult train_concept_head(ConceptHead& head, std::span<const ConceptExample> data,
                                   const HeadTrainConfig& config) {
  if (data.empty()) throw DegenerateInputError("concept head training needs at least one image");
  if (config.batch_size == 0) throw std::invalid_argument("batch_size must be positive");

  Adam opt(head.parameters(), AdamConfig{.lr = config.lr});
  Rng rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  HeadTrainResult result;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_regions = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      head.weight().zero_grad();
      head.bias().zero_grad();
      std::size_t batch_regions = 0;
      for (std::size_t k = start; k < stop; ++k) batch_regions += data[order[k]].image.regions.size();
      const double scale = 1.0 / static_cast<double>(batch_regions);
      for (std::size_t k = start; k < stop; ++k) {
        const auto& ex = data[order[k]];
        for (const auto& region : ex.image.regions) {
          Vec z = head.logits(region);
          epoch_loss += multilabel_loss(z, ex.labels);
          Vec g = multilabel_loss_grad(z, ex.labels);
          for (auto& v : g) v *= scale;
          head.backward(region, g);
        }
      }
      epoch_regions += batch_regions;
      opt.step();
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(epoch_regions));
  }
  return result;
}

}  // namespace semorder
