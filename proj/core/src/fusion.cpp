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

#include "semorder/fusion.hpp"

#include "semorder/errors.hpp"

namespace semorder {

std::string_view to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::Gate: return "gate";
    case FusionMode::Sum: return "sum";
    case FusionMode::ContextOnly: return "context";
    case FusionMode::ConceptOnly: return "concept";
  }
  return "gate";
}

FusionMode parse_fusion_mode(std::string_view text) {
  if (text == "gate") return FusionMode::Gate;
  if (text == "sum") return FusionMode::Sum;
  if (text == "context" || text == "context-only") return FusionMode::ContextOnly;
  if (text == "concept" || text == "concept-only") return FusionMode::ConceptOnly;
  throw std::invalid_argument("unknown fusion mode: " + std::string(text));
}

FusionUnit::FusionUnit(ParameterStore& store, std::size_t hidden, std::size_t concepts,
                       std::size_t context_dim, FusionMode mode, const std::string& prefix)
    : w_l_(&store.add(prefix + ".W_l", {hidden, concepts})),
      w_g_(&store.add(prefix + ".W_g", {hidden, context_dim})),
      u_l_(&store.add(prefix + ".U_l", {hidden, concepts})),
      u_g_(&store.add(prefix + ".U_g", {hidden, context_dim})),
      mode_(mode) {}

FusionUnit FusionUnit::bind(ParameterStore& store, FusionMode mode, const std::string& prefix) {
  return FusionUnit(&store.get(prefix + ".W_l"), &store.get(prefix + ".W_g"), &store.get(prefix + ".U_l"),
                    &store.get(prefix + ".U_g"), mode);
}

void FusionUnit::branches(std::span<const double> p, std::span<const double> x, FusionCache& k) const {
  if (p.size() != concepts()) {
    throw DimensionError("concept score vector has length " + std::to_string(p.size()) + ", fusion expects " +
                         std::to_string(concepts()));
  }
  if (x.size() != context_dim()) {
    throw DimensionError("context vector has length " + std::to_string(x.size()) + ", fusion expects " +
                         std::to_string(context_dim()));
  }
  k.p.assign(p.begin(), p.end());
  k.x.assign(x.begin(), x.end());
  k.wp = matvec(w_l_->value, p);
  k.wx = matvec(w_g_->value, x);
  k.p_hat = l2_normalize(k.wp);
  k.x_hat = l2_normalize(k.wx);
}

FusedImageEmbedding FusionUnit::gated(std::span<const double> p, std::span<const double> x,
                                      FusionCache* cache) const {
  FusionCache local;
  FusionCache& k = cache ? *cache : local;
  branches(p, x, k);
  const std::size_t H = hidden();
  k.t = matvec(u_l_->value, p);
  matvec_acc(u_g_->value, x, k.t);
  for (auto& v : k.t) v = sigmoid(v);
  FusedImageEmbedding out{Vec(H), k.t};
  for (std::size_t h = 0; h < H; ++h) out.v[h] = k.t[h] * k.p_hat[h] + (1.0 - k.t[h]) * k.x_hat[h];
  return out;
}

FusedImageEmbedding FusionUnit::summed(std::span<const double> p, std::span<const double> x,
                                       FusionCache* cache) const {
  FusionCache local;
  FusionCache& k = cache ? *cache : local;
  branches(p, x, k);
  k.t.clear();
  FusedImageEmbedding out{Vec(hidden()), {}};
  for (std::size_t h = 0; h < out.v.size(); ++h) out.v[h] = k.p_hat[h] + k.x_hat[h];
  return out;
}

FusedImageEmbedding FusionUnit::forward(std::span<const double> p, std::span<const double> x,
                                        FusionCache* cache) const {
  switch (mode_) {
    case FusionMode::Gate: return gated(p, x, cache);
    case FusionMode::Sum: return summed(p, x, cache);
    case FusionMode::ContextOnly:
    case FusionMode::ConceptOnly: {
      FusionCache local;
      FusionCache& k = cache ? *cache : local;
      branches(p, x, k);
      k.t.clear();
      return {mode_ == FusionMode::ContextOnly ? k.x_hat : k.p_hat, {}};
    }
  }
  throw std::logic_error("unhandled fusion mode");
}

void FusionUnit::backward(const FusionCache& k, std::span<const double> grad_v) {
  const std::size_t H = hidden();
  if (grad_v.size() != H) throw DimensionError("fusion gradient dimension mismatch");
  Vec d_phat(H, 0.0), d_xhat(H, 0.0);
  switch (mode_) {
    case FusionMode::Gate: {
      Vec da(H);
      for (std::size_t h = 0; h < H; ++h) {
        d_phat[h] = grad_v[h] * k.t[h];
        d_xhat[h] = grad_v[h] * (1.0 - k.t[h]);
        const double dt = grad_v[h] * (k.p_hat[h] - k.x_hat[h]);
        da[h] = dt * k.t[h] * (1.0 - k.t[h]);
      }
      outer_acc(u_l_->grad, da, k.p);
      outer_acc(u_g_->grad, da, k.x);
      break;
    }
    case FusionMode::Sum:
      d_phat.assign(grad_v.begin(), grad_v.end());
      d_xhat.assign(grad_v.begin(), grad_v.end());
      break;
    case FusionMode::ContextOnly: d_xhat.assign(grad_v.begin(), grad_v.end()); break;
    case FusionMode::ConceptOnly: d_phat.assign(grad_v.begin(), grad_v.end()); break;
  }
  if (mode_ != FusionMode::ContextOnly) outer_acc(w_l_->grad, l2_normalize_backward(k.wp, d_phat), k.p);
  if (mode_ != FusionMode::ConceptOnly) outer_acc(w_g_->grad, l2_normalize_backward(k.wx, d_xhat), k.x);
}

}  // namespace semorder
