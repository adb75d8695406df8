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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "semorder/errors.hpp"
#include "semorder/pipeline.hpp"
#include "semorder/trainer.hpp"

namespace semorder {
namespace {

const Corpus& small_corpus() {
  static const Corpus c = generate_corpus(40, {}, 11);
  return c;
}

TrainConfig small_config(double lambda = 1.0) {
  TrainConfig cfg = config_for_corpus(small_corpus().manifest, {});
  cfg.hidden = 8;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.negatives = 4;
  cfg.lambda = lambda;
  cfg.lr = 5e-3;
  cfg.head.epochs = 5;
  return cfg;
}

struct Split {
  PairSet train, val;
};

Split pairs_for(const MatchingModel& model) {
  const auto& c = small_corpus();
  return {make_pairs(model, c, c.manifest.train), make_pairs(model, c, c.manifest.val)};
}

TEST(JointTrainer, LambdaZeroLossIsMatchingLoss) {
  MatchingModel model(small_config(0.0));
  const auto data = pairs_for(model);
  const auto r = JointTrainer(model).train(data.train, data.val);
  ASSERT_FALSE(r.steps.empty());
  for (const auto& s : r.steps) {
    EXPECT_EQ(s.total, s.matching);
    EXPECT_GT(s.generation, 0.0);
  }
}

TEST(JointTrainer, GenerationOffContributesNothing) {
  auto cfg = small_config(1.0);
  cfg.generation = false;
  MatchingModel model(cfg);
  const auto data = pairs_for(model);
  for (const auto& s : JointTrainer(model).train(data.train, data.val).steps) {
    EXPECT_EQ(s.generation, 0.0);
    EXPECT_EQ(s.total, s.matching);
  }
}

TEST(JointTrainer, LossDecomposes) {
  for (double lambda : {0.3, 1.0, 2.5}) {
    MatchingModel model(small_config(lambda));
    const auto data = pairs_for(model);
    for (const auto& s : JointTrainer(model).train(data.train, data.val).steps) {
      EXPECT_LE(std::abs(s.total - (s.matching + lambda * s.generation)), 1e-12);
    }
  }
}

TEST(JointTrainer, ZeroLearningRateLeavesParametersUnchanged) {
  auto cfg = small_config();
  cfg.lr = 0.0;
  MatchingModel model(cfg);
  const auto before = model.store().snapshot();
  const auto data = pairs_for(model);
  JointTrainer(model).train(data.train, data.val);
  const auto after = model.store().snapshot();
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_TRUE(before[i] == after[i]) << i;
}

TEST(JointTrainer, HeadIsFrozen) {
  MatchingModel model(small_config());
  const Tensor w = model.head().weight().value;
  const auto data = pairs_for(model);
  JointTrainer trainer(model);
  std::vector<std::size_t> batch(data.train.size());
  std::iota(batch.begin(), batch.end(), 0);
  trainer.step(data.train, std::span(batch).first(4), batch);
  EXPECT_TRUE(model.head().weight().value == w);
  for (const auto* p : model.trainable()) EXPECT_TRUE(MatchingModel::is_trainable(*p));
  EXPECT_FALSE(MatchingModel::is_trainable(model.head().weight()));
}

TEST(JointTrainer, SameSeedSameRun) {
  auto run = [] {
    MatchingModel model(small_config());
    const auto data = pairs_for(model);
    auto r = JointTrainer(model).train(data.train, data.val);
    return std::make_pair(r, model.store().snapshot());
  };
  const auto [a, pa] = run();
  const auto [b, pb] = run();
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].total, b.steps[i].total);
    EXPECT_EQ(a.steps[i].generation, b.steps[i].generation);
  }
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_TRUE(pa[i] == pb[i]);
}

TEST(JointTrainer, DifferentSeedsDiffer) {
  auto first_loss = [](std::uint64_t seed) {
    auto cfg = small_config();
    cfg.seed = seed;
    MatchingModel model(cfg);
    const auto data = pairs_for(model);
    return JointTrainer(model).train(data.train, data.val).steps.front().total;
  };
  EXPECT_NE(first_loss(1), first_loss(2));
}

TEST(JointTrainer, RestoresBestValidationParameters) {
  auto cfg = small_config();
  cfg.epochs = 8;
  MatchingModel model(cfg);
  const auto data = pairs_for(model);
  const auto r = JointTrainer(model).train(data.train, data.val);
  ASSERT_EQ(r.epochs.size(), 8u);
  double best = -1;
  for (const auto& e : r.epochs) best = std::max(best, e.val_mr);
  EXPECT_EQ(r.best_val_mr, best);
  EXPECT_EQ(r.epochs[r.best_epoch - 1].val_mr, best);
  EXPECT_EQ(evaluate_retrieval(similarity_matrix(model, data.val)).mr, best);
}

TEST(JointTrainer, CallbackCanStopEarly) {
  MatchingModel model(small_config());
  const auto data = pairs_for(model);
  const auto r = JointTrainer(model).train(data.train, data.val, [](const EpochMetrics& m, MatchingModel&) {
    return m.epoch == 2;
  });
  EXPECT_EQ(r.epochs.size(), 2u);
}

TEST(JointTrainer, TrainingLowersMatchingLoss) {
  auto cfg = small_config();
  cfg.epochs = 40;
  MatchingModel model(cfg);
  const auto data = pairs_for(model);
  const auto r = JointTrainer(model).train(data.train, data.val);
  EXPECT_LT(r.epochs.back().l_mat, 0.5 * r.epochs.front().l_mat);
}

TEST(JointTrainer, DegenerateSplitsThrow) {
  MatchingModel model(small_config());
  auto data = pairs_for(model);
  PairSet one;
  one.concepts = {data.train.concepts[0]};
  one.contexts = {data.train.contexts[0]};
  one.captions = {data.train.captions[0]};
  JointTrainer trainer(model);
  EXPECT_THROW(trainer.train(one, data.val), DegenerateInputError);
  EXPECT_THROW(trainer.train(data.train, PairSet{}), DegenerateInputError);
}

TEST(JointTrainer, NonFiniteLossRaisesNumericError) {
  MatchingModel model(small_config());
  const auto data = pairs_for(model);
  for (auto& p : model.store()) {
    if (p.name == "fusion.W_g") p.value.values()[0] = std::numeric_limits<double>::quiet_NaN();
  }
  EXPECT_THROW(JointTrainer(model).train(data.train, data.val), NumericError);
}

TEST(JointLoss, PoolEntriesOnlyServeAsNegatives) {
  MatchingModel model(small_config());
  const auto data = pairs_for(model);
  Rng rng(3);
  const std::vector<std::size_t> items{0, 1, 2, 3, 4, 5};
  const auto neg = sample_negatives(items.size(), 2, 3, rng);
  const auto l = joint_loss(model, data.train, items, 2, neg, false);
  // Generation runs over the two anchors only.
  double gen = 0;
  for (std::size_t a = 0; a < 2; ++a) {
    const auto v = model.embed_image(data.train.concepts[a], data.train.contexts[a]).v;
    gen += model.generator().nll(v, data.train.captions[a]);
  }
  EXPECT_NEAR(l.generation, gen, 1e-12);
  EXPECT_GE(l.matching, 0.0);
}

TEST(Config, ParseOverridesAndRejectsUnknownKeys) {
  const auto c = parse_config("lambda = 0.5\n# comment\nfusion = sum  # trailing\ngeneration=off\nH=64\n");
  EXPECT_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.fusion, FusionMode::Sum);
  EXPECT_FALSE(c.generation);
  EXPECT_EQ(c.hidden, 64u);
  EXPECT_THROW(parse_config("dropout = 0.5"), DataError);
  EXPECT_THROW(parse_config("lambda"), DataError);
  EXPECT_THROW(parse_config("epochs = many"), DataError);
}

TEST(Config, TextRoundTrip) {
  TrainConfig c;
  c.lambda = 0.123456789;
  c.fusion = FusionMode::ContextOnly;
  c.shared_embedding = true;
  c.head.lr = 0.07;
  const TrainConfig back = parse_config(config_to_text(c));
  EXPECT_EQ(config_to_map(back), config_to_map(c));
}

TEST(Config, ValidateRejectsBadValues) {
  EXPECT_NO_THROW(TrainConfig{}.validate());
  TrainConfig c;
  c.margin = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.lambda = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.batch_size = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.hidden = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(MetricsCsv, HeaderAndRows) {
  std::vector<EpochMetrics> e{{1, 3.0, 2.0, 1.0, 50.0}, {2, 2.5, 1.5, 1.0, 60.0}};
  std::ostringstream os;
  write_metrics_csv(os, e);
  EXPECT_EQ(os.str(), "epoch,L,L_mat,L_gen,val_mR\n1,3,2,1,50\n2,2.5,1.5,1,60\n");
}

TEST(Ablation, SmokeRunProducesOneRowPerVariant) {
  auto cfg = small_config();
  cfg.epochs = 2;
  const auto variants = default_ablation_variants();
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto rows = run_ablation(small_corpus(), cfg, variants, seeds);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].variant.name, "gate+gen");
  EXPECT_EQ(rows[3].variant.fusion, FusionMode::ContextOnly);
  for (const auto& r : rows) {
    ASSERT_EQ(r.mr_per_seed.size(), 2u);
    EXPECT_NEAR(r.mean_mr, 0.5 * (r.mr_per_seed[0] + r.mr_per_seed[1]), 1e-12);
    for (double mr : r.mr_per_seed) {
      EXPECT_GE(mr, 0.0);
      EXPECT_LE(mr, 100.0);
    }
  }
}

TEST(GradcheckSuites, AllModulesAgreeWithFiniteDifferences) {
  const auto suites = run_gradcheck_suites(1, 3);
  ASSERT_EQ(suites.size(), 8u);
  for (const auto& s : suites) {
    EXPECT_EQ(s.points, 3u) << s.module;
    EXPECT_LT(s.max_relative_error, 1e-4) << s.module;
  }
}

}  // namespace
}  // namespace semorder
