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

#include "semorder/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semorder/errors.hpp"

namespace semorder {

namespace {

void require_matrix(const Tensor& t, const char* what) {
  if (t.rank() != 2) throw DimensionError(std::string(what) + " must be a matrix, got " + shape_string(t.shape()));
}

void require_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                         std::to_string(got));
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul lhs");
  require_matrix(b, "matmul rhs");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul inner extents differ: " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    auto orow = out.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a.at(i, p);
      auto brow = b.row(p);
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return out;
}

Vec matvec(const Tensor& w, std::span<const double> x) {
  Vec y(w.rows(), 0.0);
  matvec_acc(w, x, y);
  return y;
}

void matvec_acc(const Tensor& w, std::span<const double> x, std::span<double> y) {
  require_matrix(w, "matvec weight");
  require_len(x.size(), w.cols(), "matvec input");
  require_len(y.size(), w.rows(), "matvec output");
  const std::size_t n = w.cols();
  const double* wp = w.values().data();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double* r = wp + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * x[j];
    y[i] += acc;
  }
}

void matvec_t_acc(const Tensor& w, std::span<const double> x, std::span<double> y) {
  require_matrix(w, "matvec_t weight");
  require_len(x.size(), w.rows(), "matvec_t input");
  require_len(y.size(), w.cols(), "matvec_t output");
  const std::size_t n = w.cols();
  const double* wp = w.values().data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* r = wp + i * n;
    for (std::size_t j = 0; j < n; ++j) y[j] += xi * r[j];
  }
}

void outer_acc(Tensor& g, std::span<const double> a, std::span<const double> b) {
  require_matrix(g, "outer target");
  require_len(a.size(), g.rows(), "outer lhs");
  require_len(b.size(), g.cols(), "outer rhs");
  const std::size_t n = g.cols();
  double* gp = g.values().data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* r = gp + i * n;
    for (std::size_t j = 0; j < n; ++j) r[j] += ai * b[j];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_len(b.size(), a.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_len(y.size(), x.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.values()) v = sigmoid(v);
  return out;
}

Tensor tanh(const Tensor& x) {
  Tensor out = x;
  for (auto& v : out.values()) v = std::tanh(v);
  return out;
}

Vec softmax(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax of an empty vector");
  const double mx = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    z += out[i];
  }
  for (auto& v : out) v /= z;
  return out;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

Vec l2_normalize(std::span<const double> x, double eps) {
  const double n = std::max(norm2(x), eps);
  Vec out(x.begin(), x.end());
  for (auto& v : out) v /= n;
  return out;
}

Vec l2_normalize_backward(std::span<const double> x, std::span<const double> grad_out, double eps) {
  require_len(grad_out.size(), x.size(), "l2_normalize_backward");
  const double n = norm2(x);
  Vec dx(x.size());
  if (n < eps) {
    // Clamped branch: y = x / eps is linear in x.
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = grad_out[i] / eps;
    return dx;
  }
  // dy/dx = (I - y y^T) / n
  const double proj = dot(x, grad_out) / (n * n);
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = (grad_out[i] - x[i] * proj) / n;
  return dx;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  require_len(b.size(), a.size(), "cosine");
  const double na = norm2(a), nb = norm2(b);
  if (na == 0.0 || nb == 0.0) throw DegenerateInputError("cosine of a zero vector");
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

CosineGrad cosine_backward(std::span<const double> a, std::span<const double> b, double upstream) {
  require_len(b.size(), a.size(), "cosine_backward");
  const double na = norm2(a), nb = norm2(b);
  if (na == 0.0 || nb == 0.0) throw DegenerateInputError("cosine of a zero vector");
  const double c = dot(a, b) / (na * nb);
  CosineGrad g{Vec(a.size()), Vec(b.size())};
  // d cos / da = b / (|a||b|) - cos a / |a|^2
  for (std::size_t i = 0; i < a.size(); ++i) {
    g.da[i] = upstream * (b[i] / (na * nb) - c * a[i] / (na * na));
    g.db[i] = upstream * (a[i] / (na * nb) - c * b[i] / (nb * nb));
  }
  return g;
}

}  // namespace semorder
