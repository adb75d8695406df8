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

#include <benchmark/benchmark.h>

#include <numeric>

#include "semorder/pipeline.hpp"

namespace {

using namespace semorder;

TrainConfig config_with_hidden(std::size_t hidden) {
  TrainConfig cfg;
  cfg.hidden = hidden;
  return cfg;
}

Vec random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vec v(n);
  for (auto& e : v) e = rng.uniform(lo, hi);
  return v;
}

const Corpus& corpus() {
  static const Corpus c = generate_corpus(500, {}, 1);
  return c;
}

void BM_EncodeSentence(benchmark::State& state) {
  MatchingModel model(config_with_hidden(static_cast<std::size_t>(state.range(0))));
  const auto& caption = corpus().scenes[0].caption;
  for (auto _ : state) benchmark::DoNotOptimize(model.embed_sentence(caption));
}
BENCHMARK(BM_EncodeSentence)->Arg(32)->Arg(128)->Arg(512);

void BM_FuseImage(benchmark::State& state) {
  MatchingModel model(config_with_hidden(static_cast<std::size_t>(state.range(0))));
  Rng rng(1);
  const Vec p = random_vec(rng, model.config().concepts, 0, 1), x = random_vec(rng, model.config().context_dim);
  for (auto _ : state) benchmark::DoNotOptimize(model.embed_image(p, x));
}
BENCHMARK(BM_FuseImage)->Arg(32)->Arg(128)->Arg(512);

void BM_GeneratorNll(benchmark::State& state) {
  MatchingModel model(config_with_hidden(static_cast<std::size_t>(state.range(0))));
  Rng rng(2);
  const Vec v = random_vec(rng, model.config().hidden);
  const auto& caption = corpus().scenes[0].caption;
  for (auto _ : state) {
    GeneratorCache cache;
    benchmark::DoNotOptimize(model.generator().nll(v, caption, &cache));
    benchmark::DoNotOptimize(model.generator().backward(cache));
  }
}
BENCHMARK(BM_GeneratorNll)->Arg(32)->Arg(128);

// One optimiser update on a full batch with pooled negatives.
void BM_JointStep(benchmark::State& state) {
  TrainConfig cfg = config_for_corpus(corpus().manifest, {});
  cfg.batch_size = static_cast<std::size_t>(state.range(0));
  cfg.generation = state.range(1) != 0;
  MatchingModel model(cfg);
  const PairSet train = make_pairs(model, corpus(), corpus().manifest.train);
  std::vector<std::size_t> pool(train.size());
  std::iota(pool.begin(), pool.end(), 0);
  JointTrainer trainer(model);
  for (auto _ : state) {
    trainer.rng().shuffle(pool);
    benchmark::DoNotOptimize(trainer.step(train, std::span(pool).first(cfg.batch_size), pool));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_JointStep)->Args({32, 1})->Args({160, 1})->Args({160, 0})->Unit(benchmark::kMillisecond);

void BM_EvaluateRetrieval(benchmark::State& state) {
  MatchingModel model(config_for_corpus(corpus().manifest, {}));
  std::vector<std::size_t> idx(static_cast<std::size_t>(state.range(0)));
  std::iota(idx.begin(), idx.end(), 0);
  const PairSet pairs = make_pairs(model, corpus(), idx);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_retrieval(similarity_matrix(model, pairs)));
}
BENCHMARK(BM_EvaluateRetrieval)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_GenerateCorpus(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_corpus(static_cast<std::size_t>(state.range(0)), {}, 1));
}
BENCHMARK(BM_GenerateCorpus)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
