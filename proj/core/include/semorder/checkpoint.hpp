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
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "semorder/model.hpp"

namespace semorder {

// Binary layout, all integers and reals little-endian:
//   "SEMORDCK"                     8-byte magic
//   u32 version                    currently 1
//   u32 n, n bytes                 metadata as "key=value\n" lines
//   u32 count                      number of parameters
//   per parameter:
//     u32 n, n bytes               name
//     u32 rank, u64 extent[rank]   shape
//     f64 value[product(shape)]    row-major values
struct Checkpoint {
  std::map<std::string, std::string> metadata;
  std::vector<std::pair<std::string, Tensor>> params;

  static Checkpoint capture(const ParameterStore& store, std::map<std::string, std::string> metadata = {});
  // Copies every stored tensor into the parameter of the same name. Throws
  // DataError on missing names, extra names, or shape mismatches.
  void apply_to(ParameterStore& store) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Whole-model convenience: the training config travels in the metadata.
void save_model(const std::string& path, const MatchingModel& model);
std::unique_ptr<MatchingModel> load_model(const std::string& path);
std::unique_ptr<MatchingModel> model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace semorder
