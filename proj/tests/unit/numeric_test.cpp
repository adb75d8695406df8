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
#include <numeric>
#include <set>

#include "semorder/errors.hpp"
#include "semorder/gradcheck.hpp"
#include "semorder/ops.hpp"
#include "semorder/optim.hpp"
#include "semorder/parameter.hpp"
#include "test_util.hpp"

namespace semorder {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;
using testing::random_vec;

TEST(Tensor, ShapeAndDataAgree) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  Tensor v = Tensor::vector({1, 2, 3});
  EXPECT_EQ(v.rank(), 1u);
  EXPECT_EQ(v.cols(), 1u);
  EXPECT_THROW(Tensor({2, 0}), DimensionError);
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), DimensionError);
  EXPECT_THROW(Tensor::matrix({{1, 2}, {3}}), DimensionError);
}

TEST(Tensor, FiniteCheck) {
  Tensor t = Tensor::vector({1, 2});
  EXPECT_TRUE(t.all_finite());
  t[1] = std::nan("");
  EXPECT_FALSE(t.all_finite());
}

TEST(Matmul, IdentityTimesColumn) {
  const Tensor r = matmul(Tensor::matrix({{1, 0}, {0, 1}}), Tensor::matrix({{3}, {4}}));
  EXPECT_EQ(r, Tensor::matrix({{3}, {4}}));
}

TEST(Matmul, RowTimesColumn) {
  EXPECT_EQ(matmul(Tensor::matrix({{1, 2}}), Tensor::matrix({{3}, {4}})), Tensor::matrix({{11}}));
}

TEST(Matmul, MatchesTripleLoop) {
  Rng rng(11);
  const Tensor a = random_tensor(rng, {5, 7}), b = random_tensor(rng, {7, 3});
  const Tensor c = matmul(a, b);
  ASSERT_EQ(c.shape(), (Shape{5, 3}));
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double want = 0.0;
      for (std::size_t k = 0; k < 7; ++k) want += a.at(i, k) * b.at(k, j);
      EXPECT_LT(std::abs(c.at(i, j) - want), 1e-12);
    }
  }
}

TEST(Matmul, InnerMismatchThrows) {
  EXPECT_THROW(matmul(Tensor({2, 3}), Tensor({2, 3})), DimensionError);
  EXPECT_THROW(matvec(Tensor({2, 3}), Vec(2)), DimensionError);
}

TEST(Matvec, TransposedAndOuterAgreeWithMatmul) {
  Rng rng(12);
  const Tensor w = random_tensor(rng, {4, 3});
  const Vec x = random_vec(rng, 3), y = random_vec(rng, 4);
  const Vec wx = matvec(w, x);
  const Tensor ref = matmul(w, Tensor({3, 1}, x));
  EXPECT_LT(max_abs_diff(wx, ref.values()), 1e-14);

  Vec wty(3, 0.0);
  matvec_t_acc(w, y, wty);
  for (std::size_t j = 0; j < 3; ++j) {
    double want = 0;
    for (std::size_t i = 0; i < 4; ++i) want += w.at(i, j) * y[i];
    EXPECT_DOUBLE_EQ(wty[j], want);
  }

  Tensor g({4, 3});
  outer_acc(g, y, x);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(g.at(i, j), y[i] * x[j]);
  }
}

TEST(Activations, SigmoidAndTanhRanges) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  Rng rng(3);
  const Tensor x = random_tensor(rng, {50}, -15, 15);
  const Tensor s = sigmoid(x), t = semorder::tanh(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_GT(s[i], 0.0);
    EXPECT_LT(s[i], 1.0);
    EXPECT_GT(t[i], -1.0);
    EXPECT_LT(t[i], 1.0);
  }
  EXPECT_NEAR(sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_EQ(sigmoid(800.0), 1.0);
}

TEST(Activations, SoftplusIsStable) {
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(softplus(1000.0), 1000.0);
  EXPECT_GE(softplus(-1000.0), 0.0);
  EXPECT_LT(softplus(-1000.0), 1e-300);
}

TEST(Softmax, UniformOnEqualLogits) {
  const Vec q = softmax(Vec{0, 0, 0});
  for (double e : q) EXPECT_NEAR(e, 1.0 / 3.0, 1e-15);
}

TEST(Softmax, LargeLogitDoesNotOverflow) {
  const Vec q = softmax(Vec{1000, 0});
  EXPECT_NEAR(q[0], 1.0, 1e-12);
  EXPECT_NEAR(q[1], 0.0, 1e-12);
}

TEST(Softmax, ProbabilityVectorAndShiftInvariance) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    Vec z = random_vec(rng, 1 + rng.below(20), -50, 50);
    const Vec q = softmax(z);
    EXPECT_NEAR(std::accumulate(q.begin(), q.end(), 0.0), 1.0, 1e-12);
    for (double e : q) EXPECT_GE(e, 0.0);
    const double c = rng.uniform(-100, 100);
    for (auto& e : z) e += c;
    EXPECT_LT(max_abs_diff(softmax(z), q), 1e-12);
  }
  EXPECT_THROW(softmax(Vec{}), DimensionError);
}

TEST(L2Normalize, Examples) {
  const Vec y = l2_normalize(Vec{3, 4});
  EXPECT_NEAR(y[0], 0.6, 1e-15);
  EXPECT_NEAR(y[1], 0.8, 1e-15);
  EXPECT_EQ(l2_normalize(Vec{0, 0}), (Vec{0, 0}));
}

TEST(L2Normalize, UnitNormOnLongVector) {
  Rng rng(5);
  EXPECT_NEAR(norm2(l2_normalize(random_vec(rng, 1024))), 1.0, 1e-12);
}

TEST(L2Normalize, ScaleInvariant) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = random_vec(rng, 8);
    const double c = rng.uniform(1e-3, 1e3);
    Vec cx = x;
    for (auto& e : cx) e *= c;
    EXPECT_LT(max_abs_diff(l2_normalize(cx), l2_normalize(x)), 1e-12);
  }
}

TEST(L2Normalize, BackwardMatchesFiniteDifferences) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = random_vec(rng, 6), w = random_vec(rng, 6);
    const Vec analytic = l2_normalize_backward(x, w);
    const auto numeric = finite_diff_grad([&](const std::vector<double>& z) { return dot(w, l2_normalize(z)); }, x);
    EXPECT_LT(relative_error(analytic, numeric), 1e-8);
  }
}

TEST(Cosine, Examples) {
  const Vec u{0.3, -1.2, 2.0};
  EXPECT_NEAR(cosine(u, u), 1.0, 1e-15);
  EXPECT_EQ(cosine(Vec{1, 0}, Vec{0, 1}), 0.0);
  EXPECT_THROW(cosine(Vec{0, 0}, Vec{1, 0}), DegenerateInputError);
  EXPECT_THROW(cosine(Vec{1, 0}, Vec{0, 0}), DegenerateInputError);
}

TEST(Cosine, SymmetricAndBounded) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec a = random_vec(rng, 10), b = random_vec(rng, 10);
    EXPECT_LT(std::abs(cosine(a, b) - cosine(b, a)), 1e-14);
    EXPECT_LE(std::abs(cosine(a, b)), 1.0);
  }
}

TEST(Cosine, BackwardMatchesFiniteDifferences) {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec a = random_vec(rng, 5), b = random_vec(rng, 5);
    const double up = rng.uniform(-2, 2);
    const auto g = cosine_backward(a, b, up);
    auto fa = [&](const std::vector<double>& z) { return up * cosine(z, b); };
    auto fb = [&](const std::vector<double>& z) { return up * cosine(a, z); };
    EXPECT_LT(relative_error(g.da, finite_diff_grad(fa, a)), 1e-8);
    EXPECT_LT(relative_error(g.db, finite_diff_grad(fb, b)), 1e-8);
  }
}

TEST(FiniteDiff, SquareAtThree) {
  ParameterStore store;
  Parameter& p = store.add("theta", {1});
  p.value[0] = 3.0;
  const auto g = finite_diff_grad([](const ParameterStore& s) {
    const double t = s.find("theta")->value[0];
    return t * t;
  }, store, 1e-5);
  EXPECT_NEAR(g.at("theta")[0], 6.0, 1e-8);
  EXPECT_EQ(p.value[0], 3.0);
}

TEST(FiniteDiff, ConstantFunctionHasZeroGradient) {
  ParameterStore store;
  store.add("a", {2, 2});
  store.add("b", {3});
  const auto g = finite_diff_grad([](const ParameterStore&) { return 4.2; }, store);
  for (const auto& [name, t] : g) {
    for (double e : t.values()) EXPECT_EQ(e, 0.0) << name;
  }
}

TEST(FiniteDiff, NonFiniteEvaluationThrows) {
  ParameterStore store;
  store.add("a", {1});
  EXPECT_THROW(finite_diff_grad([](const ParameterStore&) { return std::nan(""); }, store), EvaluationError);
  EXPECT_THROW(finite_diff_grad([](const ParameterStore&) { return 1.0; }, store, 0.0), std::invalid_argument);
}

TEST(FiniteDiff, FilterSkipsParameters) {
  ParameterStore store;
  store.add("keep", {2});
  store.add("skip", {2});
  const auto g = finite_diff_grad([](const ParameterStore&) { return 0.0; }, store, 1e-5,
                                  [](const Parameter& p) { return p.name == "keep"; });
  EXPECT_EQ(g.size(), 1u);
  EXPECT_TRUE(g.contains("keep"));
}

TEST(RelativeError, Definition) {
  EXPECT_EQ(relative_error(Vec{0, 0}, Vec{0, 0}), 0.0);
  EXPECT_NEAR(relative_error(Vec{1, 0}, Vec{-1, 0}), 1.0, 1e-15);
  EXPECT_NEAR(relative_error(Vec{3, 4}, Vec{3, 4}), 0.0, 1e-15);
}

TEST(Rng, DeterministicPerSeed) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, DistributionsStayInRange) {
  Rng rng(1);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.below(7), 7u);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
}

TEST(Rng, SampleIsDistinctSubset) {
  Rng rng(2);
  const std::vector<std::size_t> pool{3, 5, 7, 9, 11};
  const auto s = rng.sample(pool, 3);
  ASSERT_EQ(s.size(), 3u);
  std::set<std::size_t> seen(s.begin(), s.end());
  EXPECT_EQ(seen.size(), 3u);
  for (auto e : s) EXPECT_TRUE(std::find(pool.begin(), pool.end(), e) != pool.end());
  EXPECT_EQ(rng.sample(pool, 10).size(), pool.size());
}

TEST(ParameterStore, NamesUniqueAndOrderStable) {
  ParameterStore a, b;
  for (auto* s : {&a, &b}) {
    s->add("w", {2, 3});
    s->add("b", {2});
    s->add("u", {3, 3});
  }
  EXPECT_THROW(a.add("w", {1}), std::invalid_argument);
  std::vector<std::string> na, nb;
  for (const auto& p : a) na.push_back(p.name);
  for (const auto& p : b) nb.push_back(p.name);
  EXPECT_EQ(na, (std::vector<std::string>{"w", "b", "u"}));
  EXPECT_EQ(na, nb);
  EXPECT_EQ(a.scalar_count(), 6u + 2u + 9u);
}

TEST(ParameterStore, GradShapeAndZeroGrads) {
  ParameterStore s;
  Parameter& p = s.add("w", {2, 3});
  EXPECT_EQ(p.value.shape(), p.grad.shape());
  p.grad.fill(3.0);
  s.zero_grads();
  for (double g : p.grad.values()) EXPECT_EQ(g, 0.0);
}

TEST(ParameterStore, InitUniformRangesAndZeroBiases) {
  ParameterStore s;
  Parameter& w = s.add("w", {20, 20});
  Parameter& b = s.add("b", {20});
  Rng rng(3);
  s.init_uniform(rng, 0.08);
  double lo = 1, hi = -1;
  for (double e : w.value.values()) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  EXPECT_GE(lo, -0.08);
  EXPECT_LT(hi, 0.08);
  EXPECT_LT(lo, -0.07);
  EXPECT_GT(hi, 0.07);
  for (double e : b.value.values()) EXPECT_EQ(e, 0.0);
}

TEST(ParameterStore, SnapshotRestoreRoundTrip) {
  ParameterStore s;
  Parameter& w = s.add("w", {2, 2});
  Rng rng(4);
  s.init_uniform(rng);
  const auto snap = s.snapshot();
  const Tensor before = w.value;
  w.value.fill(9.0);
  s.restore(snap);
  EXPECT_EQ(w.value, before);
}

TEST(Adam, ZeroLearningRateChangesNothing) {
  ParameterStore s;
  Parameter& w = s.add("w", {3});
  w.value = Tensor::vector({1, 2, 3});
  w.grad = Tensor::vector({0.5, -1, 2});
  Adam opt({&w}, AdamConfig{.lr = 0.0});
  opt.step();
  EXPECT_EQ(w.value, Tensor::vector({1, 2, 3}));
}

TEST(Adam, FirstStepMovesByLearningRateAgainstGradient) {
  ParameterStore s;
  Parameter& w = s.add("w", {2});
  w.value = Tensor::vector({1, 1});
  w.grad = Tensor::vector({3, -0.2});
  Adam opt({&w}, AdamConfig{.lr = 0.01});
  opt.step();
  // Bias-corrected first step is lr * g / (|g| + eps').
  EXPECT_NEAR(w.value[0], 0.99, 1e-8);
  EXPECT_NEAR(w.value[1], 1.01, 1e-7);
  EXPECT_EQ(opt.steps(), 1u);
}

TEST(Adam, MinimisesQuadratic) {
  ParameterStore s;
  Parameter& w = s.add("w", {2});
  w.value = Tensor::vector({4, -3});
  Adam opt({&w}, AdamConfig{.lr = 0.05});
  for (int i = 0; i < 2000; ++i) {
    for (std::size_t j = 0; j < 2; ++j) w.grad[j] = 2.0 * (w.value[j] - 1.0);
    opt.step();
  }
  EXPECT_NEAR(w.value[0], 1.0, 1e-3);
  EXPECT_NEAR(w.value[1], 1.0, 1e-3);
}

}  // namespace
}  // namespace semorder
