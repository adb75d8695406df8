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
#include <string>
#include <string_view>

#include "semorder/ops.hpp"
#include "semorder/parameter.hpp"

namespace semorder {

enum class FusionMode { Gate, Sum, ContextOnly, ConceptOnly };

std::string_view to_string(FusionMode mode);
// Accepts gate, sum, context, concept (and context-only / concept-only).
FusionMode parse_fusion_mode(std::string_view text);

struct FusedImageEmbedding {
  Vec v;
  Vec gate;  // per-coordinate weight on the concept branch; empty unless gated
};

struct FusionCache {
  Vec p, x;
  Vec wp, wx;        // W_l p and W_g x before normalization
  Vec p_hat, x_hat;  // normalized branches
  Vec t;             // gate
};

// Combines concept scores p (K) and a context vector x (I) into an H-dim
// image embedding. Gated form:
//   p_hat = norm(W_l p), x_hat = norm(W_g x), t = sigmoid(U_l p + U_g x)
//   v = t * p_hat + (1 - t) * x_hat
// All four matrices are registered whatever the mode so checkpoints of
// every ablation share one layout.
class FusionUnit {
 public:
  FusionUnit(ParameterStore& store, std::size_t hidden, std::size_t concepts, std::size_t context_dim,
             FusionMode mode, const std::string& prefix = "fusion");
  static FusionUnit bind(ParameterStore& store, FusionMode mode, const std::string& prefix = "fusion");

  FusionMode mode() const { return mode_; }
  std::size_t hidden() const { return w_l_->value.rows(); }
  std::size_t concepts() const { return w_l_->value.cols(); }
  std::size_t context_dim() const { return w_g_->value.cols(); }

  Parameter& w_l() { return *w_l_; }
  Parameter& w_g() { return *w_g_; }
  Parameter& u_l() { return *u_l_; }
  Parameter& u_g() { return *u_g_; }

  // Dispatches on mode().
  FusedImageEmbedding forward(std::span<const double> p, std::span<const double> x,
                              FusionCache* cache = nullptr) const;
  FusedImageEmbedding gated(std::span<const double> p, std::span<const double> x,
                            FusionCache* cache = nullptr) const;
  // v = p_hat + x_hat.
  FusedImageEmbedding summed(std::span<const double> p, std::span<const double> x,
                             FusionCache* cache = nullptr) const;

  // Accumulates parameter gradients for d loss / d v under mode().
  void backward(const FusionCache& cache, std::span<const double> grad_v);

 private:
  FusionUnit(Parameter* wl, Parameter* wg, Parameter* ul, Parameter* ug, FusionMode mode)
      : w_l_(wl), w_g_(wg), u_l_(ul), u_g_(ug), mode_(mode) {}
  void branches(std::span<const double> p, std::span<const double> x, FusionCache& k) const;

  Parameter* w_l_;
  Parameter* w_g_;
  Parameter* u_l_;
  Parameter* u_g_;
  FusionMode mode_;
};

}  // namespace semorder
