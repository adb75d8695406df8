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

#include <cstdint>
#include <map>
#include <string>

#include "semorder/concept.hpp"
#include "semorder/fusion.hpp"

namespace semorder {

// Everything that shapes a model and its training run. Defaults are a
// small setting that trains in seconds; full-scale runs (hidden 1024,
// 256 concepts, word dim 300, length 50, 50 regions) only need the
// dimensions overridden.
struct TrainConfig {
  // dimensions
  std::size_t hidden = 32;       // H
  std::size_t context_dim = 32;  // I
  std::size_t concepts = 20;     // K
  std::size_t word_dim = 16;     // D, encoder embedding width when not shared
  std::size_t vocab = 26;        // G
  std::size_t max_len = 12;      // J
  std::size_t regions = 5;       // r

  // objective
  double margin = 0.2;
  double lambda = 1.0;
  std::size_t negatives = 128;

  // optimisation
  double lr = 1e-3;
  std::size_t epochs = 30;
  std::size_t batch_size = 160;
  std::uint64_t seed = 1;
  double init_range = 0.08;

  // ablation switches
  FusionMode fusion = FusionMode::Gate;
  bool generation = true;
  bool shared_embedding = false;

  HeadTrainConfig head;

  // Throws std::invalid_argument if an invariant is violated.
  void validate() const;
};

// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
TrainConfig parse_config(const std::string& text, TrainConfig base = {});
TrainConfig load_config_file(const std::string& path, TrainConfig base = {});
void apply_config_value(TrainConfig& config, const std::string& key, const std::string& value);
std::map<std::string, std::string> config_to_map(const TrainConfig& config);
std::string config_to_text(const TrainConfig& config);

}  // namespace semorder
