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

#include "semorder/model.hpp"

#include "semorder/errors.hpp"

namespace semorder {

namespace {

const TrainConfig& validated(const TrainConfig& c) {
  c.validate();
  if (c.vocab <= static_cast<std::size_t>(kFirstWordToken)) {
    throw std::invalid_argument("vocabulary must contain words beyond the special tokens");
  }
  return c;
}

SentenceEncoder make_encoder(ParameterStore& store, const TrainConfig& c) {
  if (c.shared_embedding) {
    Parameter& f = store.add("gen.F", {c.hidden, c.vocab});
    return SentenceEncoder(f, LstmCell(store, "enc", c.hidden, c.hidden));
  }
  Parameter& e = store.add("enc.embed", {c.word_dim, c.vocab});
  return SentenceEncoder(e, LstmCell(store, "enc", c.word_dim, c.hidden));
}

Generator make_generator(ParameterStore& store, const TrainConfig& c) {
  Parameter* f = store.find("gen.F");
  if (!f) f = &store.add("gen.F", {c.hidden, c.vocab});
  LstmCell cell(store, "gen", c.hidden, c.hidden);
  Parameter& bp = store.add("gen.b_p", {c.vocab});
  return Generator(*f, cell, bp);
}

}  // namespace

MatchingModel::MatchingModel(const TrainConfig& config)
    : config_(validated(config)),
      head_(store_, config_.context_dim, config_.concepts),
      encoder_(make_encoder(store_, config_)),
      fusion_(store_, config_.hidden, config_.concepts, config_.context_dim, config_.fusion),
      generator_(make_generator(store_, config_)) {
  Rng rng(config_.seed);
  store_.init_uniform(rng, config_.init_range);
}

bool MatchingModel::is_trainable(const Parameter& p) { return p.name.rfind("concept.", 0) != 0; }

std::vector<Parameter*> MatchingModel::trainable() {
  std::vector<Parameter*> out;
  for (auto& p : store_) {
    if (is_trainable(p)) out.push_back(&p);
  }
  return out;
}

double MatchingModel::similarity(std::span<const double> concepts, std::span<const double> context,
                                 const TokenSequence& tokens) const {
  const auto v = embed_image(concepts, context);
  const auto s = embed_sentence(tokens);
  return cosine(v.v, s);
}

}  // namespace semorder
