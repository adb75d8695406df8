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

#include "semorder/ops.hpp"
#include "semorder/parameter.hpp"

namespace semorder {

// Gate pre-activations are stacked row-wise in the order input, forget,
// output, candidate: Wx is 4H x In, Wh is 4H x H, b is 4H.
class LstmCell {
 public:
  LstmCell(ParameterStore& store, const std::string& prefix, std::size_t input_dim, std::size_t hidden);
  static LstmCell bind(ParameterStore& store, const std::string& prefix);

  std::size_t hidden() const { return wh_->value.cols(); }
  std::size_t input_dim() const { return wx_->value.cols(); }

  Parameter& wx() { return *wx_; }
  Parameter& wh() { return *wh_; }
  Parameter& bias() { return *b_; }
  const Parameter& wx() const { return *wx_; }
  const Parameter& wh() const { return *wh_; }
  const Parameter& bias() const { return *b_; }

 private:
  LstmCell(Parameter* wx, Parameter* wh, Parameter* b) : wx_(wx), wh_(wh), b_(b) {}
  Parameter* wx_;
  Parameter* wh_;
  Parameter* b_;
};

struct LstmState {
  Vec h;
  Vec c;
};

// Everything the backward pass needs from one forward step.
struct LstmStepCache {
  Vec x, h_prev, c_prev;
  Vec i, f, o, g;  // gate activations; g is the candidate memory
  Vec c, tanh_c;
};

LstmState lstm_step(const LstmCell& cell, std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, LstmStepCache* cache = nullptr);

struct LstmStepGrad {
  Vec dx;
  Vec dh_prev;
  Vec dc_prev;
};

// Backpropagates d loss / d h_t and d loss / d c_t through one step,
// accumulating parameter gradients into the cell.
LstmStepGrad lstm_step_backward(LstmCell& cell, const LstmStepCache& cache, std::span<const double> dh,
                                std::span<const double> dc);

}  // namespace semorder
