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

#include <algorithm>
#include <cmath>
#include <set>

#include "semorder/errors.hpp"
#include "semorder/gradcheck.hpp"
#include "semorder/matching.hpp"
#include "test_util.hpp"

namespace semorder {
namespace {

SimilarityMatrix from_rows(std::vector<std::vector<double>> rows) {
  SimilarityMatrix s(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) s(i, k) = rows[i][k];
  }
  return s;
}

// Every off-diagonal index as a negative in both directions.
NegativeSet all_negatives(std::size_t n) {
  NegativeSet neg;
  neg.sentences.resize(n);
  neg.images.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      neg.sentences[i].push_back(k);
      neg.images[i].push_back(k);
    }
  }
  return neg;
}

SimilarityMatrix random_matrix(Rng& rng, std::size_t n) {
  SimilarityMatrix s(n, n);
  for (auto& e : s.scores.values()) e = rng.uniform(-1, 1);
  return s;
}

TEST(MatchingLoss, SeparatedPairsCostNothing) {
  const auto s = from_rows({{0.9, 0.1}, {0.2, 0.8}});
  EXPECT_EQ(matching_loss(s, all_negatives(2), 0.2), 0.0);
  const Tensor g = matching_loss_grad(s, all_negatives(2), 0.2);
  for (double e : g.values()) EXPECT_EQ(e, 0.0);
}

TEST(MatchingLoss, UniformScoresCostFourMargins) {
  const auto s = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_NEAR(matching_loss(s, all_negatives(2), 0.2), 0.8, 1e-15);
}

TEST(MatchingLoss, HandComputedAsymmetricCase) {
  // Sentence terms 0.2-0.6+0.7 and 0.2-0.4+0.3; image terms 0.2-0.6+0.3 (inactive) and 0.2-0.4+0.7.
  const auto s = from_rows({{0.6, 0.7}, {0.3, 0.4}});
  EXPECT_NEAR(matching_loss(s, all_negatives(2), 0.2), 0.3 + 0.1 + 0.5, 1e-12);
}

TEST(MatchingLoss, NonnegativeAndShiftInvariant) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(6);
    auto s = random_matrix(rng, n);
    const auto neg = sample_negatives(n, 1 + rng.below(n), rng);
    const double m = rng.uniform(0.0, 0.5);
    const double l = matching_loss(s, neg, m);
    EXPECT_GE(l, 0.0);
    const double c = rng.uniform(-2, 2);
    for (auto& e : s.scores.values()) e += c;
    EXPECT_NEAR(matching_loss(s, neg, m), l, 1e-12);
  }
}

TEST(MatchingLoss, MonotoneInMarginAndPositives) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = random_matrix(rng, 4);
    const auto neg = all_negatives(4);
    EXPECT_LE(matching_loss(s, neg, 0.1), matching_loss(s, neg, 0.3));
    const double before = matching_loss(s, neg, 0.2);
    s(1, 1) += 0.3;
    EXPECT_LE(matching_loss(s, neg, 0.2), before);
    const double lowered = matching_loss(s, neg, 0.2);
    s(1, 2) += 0.3;
    EXPECT_GE(matching_loss(s, neg, 0.2), lowered);
  }
}

TEST(MatchingLoss, MarginZeroWithDominantDiagonalIsZero) {
  auto s = from_rows({{1.0, 0.2, 0.3}, {0.1, 0.9, 0.0}, {-0.5, 0.4, 0.8}});
  EXPECT_EQ(matching_loss(s, all_negatives(3), 0.0), 0.0);
}

TEST(MatchingLoss, GradientCountsActiveHinges) {
  const auto s = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  const Tensor g = matching_loss_grad(s, all_negatives(2), 0.2);
  EXPECT_EQ(g.at(0, 0), -2.0);
  EXPECT_EQ(g.at(1, 1), -2.0);
  EXPECT_EQ(g.at(0, 1), 2.0);
  EXPECT_EQ(g.at(1, 0), 2.0);
}

TEST(MatchingLoss, KinkTermsContributeNothing) {
  // 0.25 - 0.625 + 0.375 == 0 exactly: every hinge sits on its kink.
  const auto s = from_rows({{0.625, 0.375}, {0.375, 0.625}});
  const Tensor g = matching_loss_grad(s, all_negatives(2), 0.25);
  EXPECT_EQ(matching_loss(s, all_negatives(2), 0.25), 0.0);
  for (double e : g.values()) EXPECT_EQ(e, 0.0);
}

TEST(MatchingLoss, GradientMatchesFiniteDifferencesAwayFromKinks) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    const auto neg = sample_negatives(n, 2 + rng.below(3), rng);
    auto s = random_matrix(rng, n);
    const Tensor g = matching_loss_grad(s, neg, 0.2);
    std::vector<double> flat(s.scores.values().begin(), s.scores.values().end());
    const auto numeric = finite_diff_grad(
        [&](const std::vector<double>& x) {
          SimilarityMatrix t(n, n);
          std::copy(x.begin(), x.end(), t.scores.values().begin());
          return matching_loss(t, neg, 0.2);
        },
        flat, 1e-7);
    // Uniform draws land within 1e-7 of a kink with negligible probability.
    EXPECT_LT(relative_error(g.values(), numeric), 1e-4);
  }
}

TEST(MatchingLoss, InvalidNegativesThrow) {
  const auto s = from_rows({{0.5, 0.5}, {0.5, 0.5}});
  NegativeSet own;
  own.sentences = {{0}};
  own.images = {{1}};
  EXPECT_THROW(matching_loss(s, own, 0.2), std::invalid_argument);
  NegativeSet far;
  far.sentences = {{5}};
  far.images = {{1}};
  EXPECT_THROW(matching_loss(s, far, 0.2), DimensionError);
}

TEST(SampleNegatives, PairOfTwoPicksTheOther) {
  Rng rng(4);
  const auto neg = sample_negatives(2, 128, rng);
  ASSERT_EQ(neg.sentences.size(), 2u);
  EXPECT_EQ(neg.sentences[0], std::vector<std::size_t>{1});
  EXPECT_EQ(neg.images[1], std::vector<std::size_t>{0});
}

TEST(SampleNegatives, DistinctExcludingSelf) {
  Rng rng(5);
  for (std::size_t pool : {3u, 10u, 200u}) {
    const auto neg = sample_negatives(pool, std::min<std::size_t>(pool, 5), 128, rng);
    for (std::size_t i = 0; i < neg.sentences.size(); ++i) {
      for (const auto* list : {&neg.sentences[i], &neg.images[i]}) {
        EXPECT_EQ(list->size(), std::min<std::size_t>(128, pool - 1));
        const std::set<std::size_t> uniq(list->begin(), list->end());
        EXPECT_EQ(uniq.size(), list->size());
        EXPECT_FALSE(uniq.count(i));
        for (auto k : uniq) EXPECT_LT(k, pool);
      }
    }
  }
}

TEST(SampleNegatives, UniformOverOtherIndices) {
  Rng rng(6);
  constexpr std::size_t kPool = 11, kDraws = 100000;
  std::vector<double> hits(kPool, 0.0);
  for (std::size_t d = 0; d < kDraws; ++d) {
    const auto neg = sample_negatives(kPool, 1, 1, rng);
    hits[neg.sentences[0].at(0)] += 1;
  }
  EXPECT_EQ(hits[0], 0.0);
  const double p = 1.0 / (kPool - 1);
  const double sigma = std::sqrt(kDraws * p * (1 - p));
  for (std::size_t k = 1; k < kPool; ++k) EXPECT_LT(std::abs(hits[k] - kDraws * p), 3 * sigma) << k;
}

TEST(SampleNegatives, SingletonPoolThrows) {
  Rng rng(7);
  EXPECT_THROW(sample_negatives(1, 1, rng), DegenerateInputError);
  EXPECT_THROW(sample_negatives(3, 4, 2, rng), std::invalid_argument);
}

}  // namespace
}  // namespace semorder
