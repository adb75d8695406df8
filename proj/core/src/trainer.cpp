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

#include "semorder/trainer.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "semorder/errors.hpp"

namespace semorder {

StepLosses joint_loss(MatchingModel& model, const PairSet& data, std::span<const std::size_t> items,
                      std::size_t anchors, const NegativeSet& negatives, bool accumulate_grads) {
  const auto& cfg = model.config();
  const std::size_t P = items.size();
  if (anchors > P) throw std::invalid_argument("more anchors than items");
  if (negatives.sentences.size() != anchors) throw std::invalid_argument("negative set does not match anchors");

  std::vector<FusionCache> icache(accumulate_grads ? P : 0);
  std::vector<EncoderCache> scache(accumulate_grads ? P : 0);
  std::vector<Vec> v(P), s(P);
  for (std::size_t p = 0; p < P; ++p) {
    const std::size_t d = items[p];
    v[p] = model.fusion().forward(data.concepts[d], data.contexts[d], accumulate_grads ? &icache[p] : nullptr).v;
    s[p] = model.encoder().encode(data.captions[d], accumulate_grads ? &scache[p] : nullptr);
  }

  // Only the entries the hinge terms read are filled in.
  SimilarityMatrix S(P, P);
  for (std::size_t i = 0; i < anchors; ++i) {
    S(i, i) = cosine(v[i], s[i]);
    for (auto k : negatives.sentences[i]) S(i, k) = cosine(v[i], s[k]);
    for (auto k : negatives.images[i]) S(k, i) = cosine(v[k], s[i]);
  }

  StepLosses out;
  out.matching = matching_loss(S, negatives, cfg.margin);

  std::vector<Vec> dv, ds;
  if (accumulate_grads) {
    dv.assign(P, Vec(cfg.hidden, 0.0));
    ds.assign(P, Vec(cfg.hidden, 0.0));
    const Tensor dS = matching_loss_grad(S, negatives, cfg.margin);
    for (std::size_t i = 0; i < P; ++i) {
      for (std::size_t k = 0; k < P; ++k) {
        const double g = dS.at(i, k);
        if (g == 0.0) continue;
        auto cg = cosine_backward(v[i], s[k], g);
        axpy(1.0, cg.da, dv[i]);
        axpy(1.0, cg.db, ds[k]);
      }
    }
  }

  if (cfg.generation) {
    for (std::size_t a = 0; a < anchors; ++a) {
      GeneratorCache gc;
      const bool need_grad = accumulate_grads && cfg.lambda != 0.0;
      out.generation += model.generator().nll(v[a], data.captions[items[a]], need_grad ? &gc : nullptr);
      if (need_grad) axpy(1.0, model.generator().backward(gc, cfg.lambda), dv[a]);
    }
  }
  out.total = out.matching + cfg.lambda * out.generation;

  if (accumulate_grads) {
    auto nonzero = [](const Vec& x) {
      for (double e : x) {
        if (e != 0.0) return true;
      }
      return false;
    };
    for (std::size_t p = 0; p < P; ++p) {
      if (nonzero(dv[p])) model.fusion().backward(icache[p], dv[p]);
      if (nonzero(ds[p])) model.encoder().backward(scache[p], ds[p]);
    }
  }
  return out;
}

namespace {

bool finite(const StepLosses& l) {
  return std::isfinite(l.total) && std::isfinite(l.matching) && std::isfinite(l.generation);
}

}  // namespace

JointTrainer::JointTrainer(MatchingModel& model)
    : model_(model),
      opt_(model.trainable(), AdamConfig{.lr = model.config().lr}),
      rng_(model.config().seed ^ 0x5eed5eed5eed5eedULL) {}

StepLosses JointTrainer::step(const PairSet& data, std::span<const std::size_t> batch,
                              std::span<const std::size_t> pool) {
  const auto& cfg = model_.config();
  std::vector<std::size_t> items(batch.begin(), batch.end());
  if (batch.size() <= cfg.negatives) {
    std::unordered_set<std::size_t> in_batch(batch.begin(), batch.end());
    for (auto p : pool) {
      if (!in_batch.contains(p)) items.push_back(p);
    }
  }
  const NegativeSet neg = sample_negatives(items.size(), batch.size(), cfg.negatives, rng_);

  model_.store().zero_grads();
  const StepLosses losses = joint_loss(model_, data, items, batch.size(), neg, true);
  if (!finite(losses)) {
    std::ostringstream os;
    os << "non-finite loss after " << opt_.steps() << " updates: L=" << losses.total
       << " L_mat=" << losses.matching << " L_gen=" << losses.generation;
    throw NumericError(os.str());
  }
  for (const auto* p : model_.trainable()) {
    if (!p->grad.all_finite()) {
      throw NumericError("non-finite gradient in " + p->name + " after " + std::to_string(opt_.steps()) +
                         " updates");
    }
  }
  opt_.step();
  return losses;
}

TrainResult JointTrainer::train(const PairSet& train, const PairSet& val, const EpochCallback& on_epoch) {
  const auto& cfg = model_.config();
  if (train.size() < 2) throw DegenerateInputError("training split needs at least two pairs");
  if (val.size() == 0) throw DegenerateInputError("validation split is empty");

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::vector<std::size_t> pool = order;

  TrainResult result;
  auto best = model_.store().snapshot();
  const std::size_t n = train.size();
  const std::size_t batches = (n + cfg.batch_size - 1) / cfg.batch_size;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng_.shuffle(order);
    EpochMetrics m;
    m.epoch = epoch;
    // Nearly equal batches of at most batch_size pairs.
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * n / batches, hi = (b + 1) * n / batches;
      if (hi - lo < 2) continue;
      std::span<const std::size_t> batch(order.data() + lo, hi - lo);
      const StepLosses l = step(train, batch, pool);
      result.steps.push_back(l);
      m.loss += l.total;
      m.l_mat += l.matching;
      m.l_gen += l.generation;
    }
    m.val_mr = evaluate_retrieval(similarity_matrix(model_, val)).mr;
    result.epochs.push_back(m);
    if (m.val_mr > result.best_val_mr) {
      result.best_val_mr = m.val_mr;
      result.best_epoch = epoch;
      best = model_.store().snapshot();
    }
    if (on_epoch && on_epoch(m, model_)) break;
  }
  model_.store().restore(best);
  return result;
}

SimilarityMatrix similarity_matrix(const MatchingModel& model, const PairSet& data) {
  const std::size_t n = data.size();
  std::vector<Vec> v(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = model.embed_image(data.concepts[i], data.contexts[i]).v;
    s[i] = model.embed_sentence(data.captions[i]);
  }
  SimilarityMatrix S(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) S(i, k) = cosine(v[i], s[k]);
  }
  return S;
}

void write_metrics_csv(std::ostream& os, std::span<const EpochMetrics> epochs) {
  os << "epoch,L,L_mat,L_gen,val_mR\n";
  const auto old = os.precision(17);
  for (const auto& m : epochs) {
    os << m.epoch << ',' << m.loss << ',' << m.l_mat << ',' << m.l_gen << ',' << m.val_mr << '\n';
  }
  os.precision(old);
}

}  // namespace semorder
