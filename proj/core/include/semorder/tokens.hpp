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

#include <cstddef>
#include <span>
#include <vector>

namespace semorder {

inline constexpr int kPadToken = 0;
inline constexpr int kBosToken = 1;
inline constexpr int kEosToken = 2;
inline constexpr int kFirstWordToken = 3;

// A caption as word ids, zero-padded to a fixed width. Only the first
// `length` ids are real tokens; everything after is padding and is never
// read by the encoder or the generator.
struct TokenSequence {
  std::vector<int> ids;
  std::size_t length = 0;

  // Pads `tokens` with kPadToken up to `width` (>= tokens.size()).
  static TokenSequence padded(std::vector<int> tokens, std::size_t width);
  static TokenSequence unpadded(std::vector<int> tokens);

  std::span<const int> real() const { return std::span<const int>(ids).first(length); }
  bool operator==(const TokenSequence& o) const;
};

// Throws DimensionError when empty or any real id falls outside [0, vocab).
void validate_tokens(const TokenSequence& tokens, std::size_t vocab);

}  // namespace semorder
