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

#include "semorder/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "semorder/errors.hpp"

namespace semorder {

void TrainConfig::validate() const {
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (negatives < 1) throw std::invalid_argument("negatives must be at least 1");
  if (batch_size < 2) throw std::invalid_argument("batch_size must be at least 2");
  if (!(lr >= 0.0)) throw std::invalid_argument("lr must be nonnegative");
  for (auto d : {hidden, context_dim, concepts, word_dim, vocab, max_len, regions}) {
    if (d == 0) throw std::invalid_argument("dimensions must be positive");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw DataError("config key " + key + ": not an integer: " + v);
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw DataError("config key " + key + ": not a number: " + v);
  }
}

bool to_switch(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "shared") return true;
  if (v == "off" || v == "false" || v == "0" || v == "non-shared") return false;
  throw DataError("config key " + key + ": expected on/off: " + v);
}

std::string fmt_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void apply_config_value(TrainConfig& c, const std::string& key, const std::string& value) {
  if (key == "hidden" || key == "H") c.hidden = to_size(key, value);
  else if (key == "context_dim" || key == "I") c.context_dim = to_size(key, value);
  else if (key == "concepts" || key == "K") c.concepts = to_size(key, value);
  else if (key == "word_dim" || key == "D") c.word_dim = to_size(key, value);
  else if (key == "vocab" || key == "G") c.vocab = to_size(key, value);
  else if (key == "max_len" || key == "J") c.max_len = to_size(key, value);
  else if (key == "regions" || key == "r") c.regions = to_size(key, value);
  else if (key == "margin" || key == "m") c.margin = to_real(key, value);
  else if (key == "lambda") c.lambda = to_real(key, value);
  else if (key == "negatives") c.negatives = to_size(key, value);
  else if (key == "lr") c.lr = to_real(key, value);
  else if (key == "epochs") c.epochs = to_size(key, value);
  else if (key == "batch_size") c.batch_size = to_size(key, value);
  else if (key == "seed") c.seed = to_size(key, value);
  else if (key == "init_range") c.init_range = to_real(key, value);
  else if (key == "fusion") {
    try {
      c.fusion = parse_fusion_mode(value);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
  } else if (key == "generation") c.generation = to_switch(key, value);
  else if (key == "embedding") c.shared_embedding = to_switch(key, value);
  else if (key == "head_lr") c.head.lr = to_real(key, value);
  else if (key == "head_epochs") c.head.epochs = to_size(key, value);
  else if (key == "head_batch_size") c.head.batch_size = to_size(key, value);
  else throw DataError("unknown config key: " + key);
}

TrainConfig parse_config(const std::string& text, TrainConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("config line " + std::to_string(lineno) + ": expected key=value");
    apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

TrainConfig load_config_file(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::map<std::string, std::string> config_to_map(const TrainConfig& c) {
  return {
      {"hidden", std::to_string(c.hidden)},
      {"context_dim", std::to_string(c.context_dim)},
      {"concepts", std::to_string(c.concepts)},
      {"word_dim", std::to_string(c.word_dim)},
      {"vocab", std::to_string(c.vocab)},
      {"max_len", std::to_string(c.max_len)},
      {"regions", std::to_string(c.regions)},
      {"margin", fmt_real(c.margin)},
      {"lambda", fmt_real(c.lambda)},
      {"negatives", std::to_string(c.negatives)},
      {"lr", fmt_real(c.lr)},
      {"epochs", std::to_string(c.epochs)},
      {"batch_size", std::to_string(c.batch_size)},
      {"seed", std::to_string(c.seed)},
      {"init_range", fmt_real(c.init_range)},
      {"fusion", std::string(to_string(c.fusion))},
      {"generation", c.generation ? "on" : "off"},
      {"embedding", c.shared_embedding ? "shared" : "non-shared"},
      {"head_lr", fmt_real(c.head.lr)},
      {"head_epochs", std::to_string(c.head.epochs)},
      {"head_batch_size", std::to_string(c.head.batch_size)},
  };
}

std::string config_to_text(const TrainConfig& c) {
  std::string out;
  for (const auto& [k, v] : config_to_map(c)) out += k + " = " + v + "\n";
  return out;
}

}  // namespace semorder
