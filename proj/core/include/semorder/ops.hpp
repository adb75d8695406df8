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

#include <span>
#include <vector>

#include "semorder/tensor.hpp"

namespace semorder {

using Vec = std::vector<double>;

inline constexpr double kNormEps = 1e-8;

// Dense products. All throw DimensionError on mismatched extents.
Tensor matmul(const Tensor& a, const Tensor& b);
Vec matvec(const Tensor& w, std::span<const double> x);
// y += W x
void matvec_acc(const Tensor& w, std::span<const double> x, std::span<double> y);
// y += W^T x
void matvec_t_acc(const Tensor& w, std::span<const double> x, std::span<double> y);
// g += a b^T
void outer_acc(Tensor& g, std::span<const double> a, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double sigmoid(double x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
// Max-subtracted softmax; entries are nonnegative and sum to one.
Vec softmax(std::span<const double> logits);
// log(1 + e^x) without overflow.
double softplus(double x);

// x / max(||x||, eps). The zero vector maps to itself.
Vec l2_normalize(std::span<const double> x, double eps = kNormEps);
// Vector-Jacobian product of l2_normalize at x.
Vec l2_normalize_backward(std::span<const double> x, std::span<const double> grad_out,
                          double eps = kNormEps);

// Throws DegenerateInputError if either argument is the zero vector.
double cosine(std::span<const double> a, std::span<const double> b);

struct CosineGrad {
  Vec da;
  Vec db;
};
// Gradient of upstream * cosine(a, b) with respect to both arguments.
CosineGrad cosine_backward(std::span<const double> a, std::span<const double> b, double upstream);

}  // namespace semorder
