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

#include "semorder/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "semorder/errors.hpp"

namespace semorder {

namespace {

constexpr std::array<char, 8> kMagic{'S', 'E', 'M', 'O', 'R', 'D', 'C', 'K'};
constexpr std::uint32_t kMaxRank = 8;

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> b;
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), b.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size())) throw DataError("truncated checkpoint");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is, std::size_t limit) {
  const auto n = get_le<std::uint32_t>(is);
  if (n > limit) throw DataError("checkpoint string length out of range");
  std::string s(n, '\0');
  if (n && !is.read(s.data(), n)) throw DataError("truncated checkpoint");
  return s;
}

}  // namespace

Checkpoint Checkpoint::capture(const ParameterStore& store, std::map<std::string, std::string> metadata) {
  Checkpoint c;
  c.metadata = std::move(metadata);
  for (const auto& p : store) c.params.emplace_back(p.name, p.value);
  return c;
}

void Checkpoint::apply_to(ParameterStore& store) const {
  if (params.size() != store.size()) {
    throw DataError("checkpoint holds " + std::to_string(params.size()) + " parameters, model has " +
                    std::to_string(store.size()));
  }
  for (const auto& [name, t] : params) {
    auto* p = store.find(name);
    if (!p) throw DataError("checkpoint parameter " + name + " not in model");
    if (p->value.shape() != t.shape()) {
      throw DataError("checkpoint parameter " + name + " has shape " + shape_string(t.shape()) + ", model expects " +
                      shape_string(p->value.shape()));
    }
    p->value = t;
  }
}

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kCheckpointVersion);
  std::string meta;
  for (const auto& [k, v] : ckpt.metadata) meta += k + "=" + v + "\n";
  put_string(os, meta);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& [name, t] : ckpt.params) {
    put_string(os, name);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) put_le<std::uint64_t>(os, e);
    for (double v : t.values()) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  }
  if (!os) throw DataError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw DataError("not a checkpoint file (bad magic)");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint c;
  std::istringstream meta(get_string(is, 1u << 20));
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("malformed checkpoint metadata line: " + line);
    c.metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }

  const auto count = get_le<std::uint32_t>(is);
  for (std::uint32_t n = 0; n < count; ++n) {
    std::string name = get_string(is, 4096);
    const auto rank = get_le<std::uint32_t>(is);
    if (rank == 0 || rank > kMaxRank) throw DataError("checkpoint parameter " + name + " has bad rank");
    Shape shape(rank);
    std::uint64_t total = 1;
    for (auto& e : shape) {
      e = get_le<std::uint64_t>(is);
      if (e == 0 || e > (1ull << 32)) throw DataError("checkpoint parameter " + name + " has bad extent");
      total *= e;
      if (total > (1ull << 32)) throw DataError("checkpoint parameter " + name + " too large");
    }
    std::vector<double> data(total);
    for (auto& v : data) v = std::bit_cast<double>(get_le<std::uint64_t>(is));
    c.params.emplace_back(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open " + path + " for writing");
  write_checkpoint(os, ckpt);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint " + path);
  return read_checkpoint(is);
}

void save_model(const std::string& path, const MatchingModel& model) {
  save_checkpoint(path, Checkpoint::capture(model.store(), config_to_map(model.config())));
}

std::unique_ptr<MatchingModel> model_from_checkpoint(const Checkpoint& ckpt) {
  TrainConfig cfg;
  for (const auto& [k, v] : ckpt.metadata) apply_config_value(cfg, k, v);
  auto model = std::make_unique<MatchingModel>(cfg);
  ckpt.apply_to(model->store());
  return model;
}

std::unique_ptr<MatchingModel> load_model(const std::string& path) { return model_from_checkpoint(load_checkpoint(path)); }

}  // namespace semorder
