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

#include "semorder/lstm.hpp"

#include <cmath>

#include "semorder/errors.hpp"

namespace semorder {

LstmCell::LstmCell(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                   std::size_t hidden)
    : wx_(&store.add(prefix + ".Wx", {4 * hidden, input_dim})),
      wh_(&store.add(prefix + ".Wh", {4 * hidden, hidden})),
      b_(&store.add(prefix + ".b", {4 * hidden})) {}

LstmCell LstmCell::bind(ParameterStore& store, const std::string& prefix) {
  return LstmCell(&store.get(prefix + ".Wx"), &store.get(prefix + ".Wh"), &store.get(prefix + ".b"));
}

LstmState lstm_step(const LstmCell& cell, std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, LstmStepCache* cache) {
  const std::size_t H = cell.hidden();
  if (x.size() != cell.input_dim()) {
    throw DimensionError("lstm input has dimension " + std::to_string(x.size()) + ", cell expects " +
                         std::to_string(cell.input_dim()));
  }
  if (h_prev.size() != H || c_prev.size() != H) throw DimensionError("lstm state dimension mismatch");

  Vec z(cell.bias().value.values().begin(), cell.bias().value.values().end());
  matvec_acc(cell.wx().value, x, z);
  matvec_acc(cell.wh().value, h_prev, z);

  LstmStepCache local;
  LstmStepCache& k = cache ? *cache : local;
  k.i.resize(H);
  k.f.resize(H);
  k.o.resize(H);
  k.g.resize(H);
  k.c.resize(H);
  k.tanh_c.resize(H);
  LstmState out{Vec(H), Vec(H)};
  for (std::size_t j = 0; j < H; ++j) {
    k.i[j] = sigmoid(z[j]);
    k.f[j] = sigmoid(z[H + j]);
    k.o[j] = sigmoid(z[2 * H + j]);
    k.g[j] = std::tanh(z[3 * H + j]);
    k.c[j] = k.f[j] * c_prev[j] + k.i[j] * k.g[j];
    k.tanh_c[j] = std::tanh(k.c[j]);
    out.c[j] = k.c[j];
    out.h[j] = k.o[j] * k.tanh_c[j];
  }
  if (cache) {
    k.x.assign(x.begin(), x.end());
    k.h_prev.assign(h_prev.begin(), h_prev.end());
    k.c_prev.assign(c_prev.begin(), c_prev.end());
  }
  return out;
}

LstmStepGrad lstm_step_backward(LstmCell& cell, const LstmStepCache& k, std::span<const double> dh,
                                std::span<const double> dc_in) {
  const std::size_t H = cell.hidden();
  if (dh.size() != H || dc_in.size() != H) throw DimensionError("lstm gradient dimension mismatch");

  Vec dz(4 * H);
  LstmStepGrad out{Vec(cell.input_dim(), 0.0), Vec(H, 0.0), Vec(H)};
  for (std::size_t j = 0; j < H; ++j) {
    const double d_o = dh[j] * k.tanh_c[j];
    const double dc = dc_in[j] + dh[j] * k.o[j] * (1.0 - k.tanh_c[j] * k.tanh_c[j]);
    const double d_i = dc * k.g[j];
    const double d_f = dc * k.c_prev[j];
    const double d_g = dc * k.i[j];
    out.dc_prev[j] = dc * k.f[j];
    dz[j] = d_i * k.i[j] * (1.0 - k.i[j]);
    dz[H + j] = d_f * k.f[j] * (1.0 - k.f[j]);
    dz[2 * H + j] = d_o * k.o[j] * (1.0 - k.o[j]);
    dz[3 * H + j] = d_g * (1.0 - k.g[j] * k.g[j]);
  }
  outer_acc(cell.wx().grad, dz, k.x);
  outer_acc(cell.wh().grad, dz, k.h_prev);
  axpy(1.0, dz, cell.bias().grad.values());
  matvec_t_acc(cell.wx().value, dz, out.dx);
  matvec_t_acc(cell.wh().value, dz, out.dh_prev);
  return out;
}

}  // namespace semorder
