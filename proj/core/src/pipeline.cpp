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

#include "semorder/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semorder/errors.hpp"
#include "semorder/gradcheck.hpp"

namespace semorder {

TrainConfig config_for_corpus(const CorpusManifest& m, TrainConfig base) {
  base.context_dim = m.context_dim;
  base.concepts = m.concepts;
  base.word_dim = m.word_dim;
  base.vocab = m.vocab;
  base.max_len = m.max_len;
  base.regions = m.regions;
  return base;
}

std::vector<ConceptExample> concept_examples(const Corpus& corpus, std::span<const std::size_t> indices) {
  std::vector<ConceptExample> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    const auto& s = corpus.scenes.at(i);
    out.push_back({s.regions, s.labels(corpus.manifest.concepts)});
  }
  return out;
}

PairSet make_pairs(const MatchingModel& model, const Corpus& corpus, std::span<const std::size_t> indices,
                   bool corrupted) {
  PairSet out;
  for (auto i : indices) {
    const auto& s = corpus.scenes.at(i);
    out.concepts.push_back(model.concept_scores(s.regions));
    out.contexts.push_back(s.context);
    out.captions.push_back(corrupted ? s.corrupted : s.caption);
  }
  return out;
}

namespace {

void check_dimensions(const MatchingModel& model, const CorpusManifest& m) {
  const auto& c = model.config();
  if (c.context_dim != m.context_dim || c.concepts != m.concepts || c.vocab != m.vocab) {
    throw DataError("model dimensions (I=" + std::to_string(c.context_dim) + ", K=" + std::to_string(c.concepts) +
                    ", G=" + std::to_string(c.vocab) + ") do not match the corpus (I=" +
                    std::to_string(m.context_dim) + ", K=" + std::to_string(m.concepts) +
                    ", G=" + std::to_string(m.vocab) + ")");
  }
}

}  // namespace

ExperimentResult run_experiment(MatchingModel& model, const Corpus& corpus, const EpochCallback& on_epoch) {
  check_dimensions(model, corpus.manifest);
  const auto& m = corpus.manifest;
  if (m.train.empty() || m.val.empty() || m.test.empty()) throw DegenerateInputError("corpus has an empty split");

  ExperimentResult r;
  const auto examples = concept_examples(corpus, m.train);
  r.head = train_concept_head(model.head(), examples, model.config().head);

  const PairSet train = make_pairs(model, corpus, m.train);
  const PairSet val = make_pairs(model, corpus, m.val);
  const PairSet test = make_pairs(model, corpus, m.test);
  JointTrainer trainer(model);
  r.train = trainer.train(train, val, on_epoch);
  r.test = evaluate_retrieval(similarity_matrix(model, test));
  return r;
}

double order_sensitivity(const MatchingModel& model, const Corpus& corpus, std::span<const std::size_t> indices) {
  if (indices.empty()) throw DegenerateInputError("no scenes to score");
  std::size_t wins = 0;
  for (auto i : indices) {
    const auto& s = corpus.scenes.at(i);
    const auto v = model.embed_image(model.concept_scores(s.regions), s.context).v;
    if (cosine(v, model.embed_sentence(s.caption)) > cosine(v, model.embed_sentence(s.corrupted))) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(indices.size());
}

std::vector<AblationVariant> default_ablation_variants() {
  return {{"gate+gen", FusionMode::Gate, true},
          {"gate", FusionMode::Gate, false},
          {"sum", FusionMode::Sum, false},
          {"context", FusionMode::ContextOnly, false}};
}

std::vector<AblationRow> run_ablation(const Corpus& corpus, const TrainConfig& base,
                                      std::span<const AblationVariant> variants,
                                      std::span<const std::uint64_t> seeds) {
  if (variants.empty() || seeds.empty()) throw DegenerateInputError("ablation needs variants and seeds");
  std::vector<AblationRow> rows;
  for (const auto& v : variants) rows.push_back({v, {}, {}, 0.0});
  for (auto seed : seeds) {
    for (auto& row : rows) {
      TrainConfig cfg = config_for_corpus(corpus.manifest, base);
      cfg.fusion = row.variant.fusion;
      cfg.generation = row.variant.generation;
      cfg.seed = seed;
      cfg.head.seed = seed;
      MatchingModel model(cfg);
      const auto r = run_experiment(model, corpus);
      row.reports.push_back(r.test);
      row.mr_per_seed.push_back(r.test.mr);
    }
  }
  for (auto& row : rows) {
    row.mean_mr = std::accumulate(row.mr_per_seed.begin(), row.mr_per_seed.end(), 0.0) /
                  static_cast<double>(row.mr_per_seed.size());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Finite-difference suites

namespace {

constexpr double kCheckStep = 1e-5;
constexpr double kCheckInit = 0.5;

Vec random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vec v(n);
  for (auto& e : v) e = rng.uniform(lo, hi);
  return v;
}

TokenSequence random_tokens(Rng& rng, std::size_t vocab, std::size_t length, std::size_t width) {
  std::vector<int> ids(length);
  for (auto& t : ids) t = kFirstWordToken + static_cast<int>(rng.below(vocab - kFirstWordToken));
  return TokenSequence::padded(std::move(ids), width);
}

double check_store(ParameterStore& store, const ScalarFn& f, const std::function<void()>& backward,
                   const ParamFilter& filter = {}) {
  store.zero_grads();
  backward();
  const auto numeric = finite_diff_grad(f, store, kCheckStep, filter);
  return compare_gradients(store, numeric).max_relative_error;
}

double concept_head_point(Rng& rng) {
  ParameterStore store;
  ConceptHead head(store, 4, 3);
  store.init_uniform(rng, kCheckInit);
  head.bias().value.values()[0] = rng.uniform(-1, 1);
  std::vector<Vec> regions;
  for (int r = 0; r < 3; ++r) regions.push_back(random_vec(rng, 4));
  ConceptLabels y{1, 0, static_cast<std::uint8_t>(rng.below(2))};
  auto f = [&](const ParameterStore&) {
    double l = 0;
    for (const auto& x : regions) l += multilabel_loss(head.logits(x), y);
    return l;
  };
  return check_store(store, f, [&] {
    for (const auto& x : regions) head.backward(x, multilabel_loss_grad(head.logits(x), y));
  });
}

double lstm_cell_point(Rng& rng) {
  ParameterStore store;
  LstmCell cell(store, "cell", 3, 4);
  store.init_uniform(rng, kCheckInit);
  for (auto& b : cell.bias().value.values()) b = rng.uniform(-0.5, 0.5);
  const Vec x = random_vec(rng, 3), h0 = random_vec(rng, 4), c0 = random_vec(rng, 4);
  const Vec wh = random_vec(rng, 4), wc = random_vec(rng, 4);
  auto f = [&](const ParameterStore&) {
    const auto st = lstm_step(cell, x, h0, c0);
    return dot(wh, st.h) + dot(wc, st.c);
  };
  return check_store(store, f, [&] {
    LstmStepCache cache;
    lstm_step(cell, x, h0, c0, &cache);
    lstm_step_backward(cell, cache, wh, wc);
  });
}

double encoder_point(Rng& rng) {
  ParameterStore store;
  Parameter& embed = store.add("enc.embed", {3, 8});
  SentenceEncoder enc(embed, LstmCell(store, "enc", 3, 4));
  store.init_uniform(rng, kCheckInit);
  const auto tokens = random_tokens(rng, 8, 2 + rng.below(3), 6);
  const Vec w = random_vec(rng, 4);
  auto f = [&](const ParameterStore&) { return dot(w, enc.encode(tokens)); };
  return check_store(store, f, [&] {
    EncoderCache cache;
    enc.encode(tokens, &cache);
    enc.backward(cache, w);
  });
}

double fusion_point(Rng& rng, FusionMode mode) {
  ParameterStore store;
  FusionUnit fu(store, 4, 3, 5, mode);
  store.init_uniform(rng, kCheckInit);
  const Vec p = random_vec(rng, 3, 0.0, 1.0), x = random_vec(rng, 5), w = random_vec(rng, 4);
  auto f = [&](const ParameterStore&) { return dot(w, fu.forward(p, x).v); };
  return check_store(store, f, [&] {
    FusionCache cache;
    fu.forward(p, x, &cache);
    fu.backward(cache, w);
  });
}

double generator_point(Rng& rng) {
  ParameterStore store;
  Parameter& F = store.add("gen.F", {4, 8});
  LstmCell cell(store, "gen", 4, 4);
  Parameter& bp = store.add("gen.b_p", {8});
  Parameter& v = store.add("input.v", {4});
  Generator gen(F, cell, bp);
  store.init_uniform(rng, kCheckInit);
  for (auto& e : bp.value.values()) e = rng.uniform(-0.5, 0.5);
  for (auto& e : v.value.values()) e = rng.uniform(-1, 1);
  const auto target = random_tokens(rng, 8, 1 + rng.below(4), 6);
  auto f = [&](const ParameterStore&) { return gen.nll(v.value.values(), target); };
  return check_store(store, f, [&] {
    GeneratorCache cache;
    gen.nll(v.value.values(), target, &cache);
    axpy(1.0, gen.backward(cache), v.grad.values());
  });
}

double matching_point(Rng& rng) {
  const std::size_t n = 4;
  const double m = 0.2;
  const NegativeSet neg = sample_negatives(n, n - 1, rng);
  // Resample until no hinge term sits near its kink.
  for (;;) {
    SimilarityMatrix S(n, n);
    for (auto& e : S.scores.values()) e = rng.uniform(-1, 1);
    bool near_kink = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (auto k : neg.sentences[i]) near_kink |= std::abs(m - S(i, i) + S(i, k)) < 1e-3;
      for (auto k : neg.images[i]) near_kink |= std::abs(m - S(i, i) + S(k, i)) < 1e-3;
    }
    if (near_kink) continue;
    const Tensor analytic = matching_loss_grad(S, neg, m);
    auto f = [&](const std::vector<double>& flat) {
      SimilarityMatrix T(Tensor(S.scores.shape(), flat));
      return matching_loss(T, neg, m);
    };
    const std::vector<double> flat(S.scores.values().begin(), S.scores.values().end());
    const auto numeric = finite_diff_grad(f, flat, kCheckStep);
    return relative_error(analytic.values(), numeric);
  }
}

double joint_point(Rng& rng, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.hidden = 4;
  cfg.context_dim = 3;
  cfg.concepts = 3;
  cfg.word_dim = 3;
  cfg.vocab = 8;
  cfg.max_len = 5;
  cfg.regions = 2;
  cfg.lambda = rng.uniform(0.5, 1.5);
  cfg.seed = seed;
  cfg.init_range = kCheckInit;
  MatchingModel model(cfg);

  PairSet data;
  for (int i = 0; i < 2; ++i) {
    data.concepts.push_back(random_vec(rng, 3, 0.0, 1.0));
    data.contexts.push_back(random_vec(rng, 3));
    data.captions.push_back(random_tokens(rng, 8, 2 + rng.below(3), 5));
  }
  const std::vector<std::size_t> items{0, 1};
  const NegativeSet neg = sample_negatives(2, 128, rng);
  auto f = [&](const ParameterStore&) { return joint_loss(model, data, items, 2, neg, false).total; };
  return check_store(
      model.store(), f, [&] { joint_loss(model, data, items, 2, neg, true); }, &MatchingModel::is_trainable);
}

}  // namespace

std::vector<GradCheckSuite> run_gradcheck_suites(std::uint64_t seed, std::size_t points) {
  if (points == 0) throw std::invalid_argument("gradcheck needs at least one point");
  std::vector<GradCheckSuite> out;
  Rng root(seed);
  auto suite = [&](const std::string& name, const std::function<double(Rng&, std::size_t)>& fn) {
    Rng rng = root.split();
    GradCheckSuite s{name, points, 0.0};
    for (std::size_t i = 0; i < points; ++i) s.max_relative_error = std::max(s.max_relative_error, fn(rng, i));
    out.push_back(s);
  };
  suite("concept-head", [](Rng& r, std::size_t) { return concept_head_point(r); });
  suite("lstm-cell", [](Rng& r, std::size_t) { return lstm_cell_point(r); });
  suite("encoder", [](Rng& r, std::size_t) { return encoder_point(r); });
  suite("fusion-gate", [](Rng& r, std::size_t) { return fusion_point(r, FusionMode::Gate); });
  suite("fusion-sum", [](Rng& r, std::size_t) { return fusion_point(r, FusionMode::Sum); });
  suite("generator", [](Rng& r, std::size_t) { return generator_point(r); });
  suite("matching-hinge", [](Rng& r, std::size_t) { return matching_point(r); });
  suite("joint-loss", [&](Rng& r, std::size_t i) { return joint_point(r, seed * 1000 + i); });
  return out;
}

}  // namespace semorder
