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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semorder/concept.hpp"
#include "semorder/tokens.hpp"

namespace semorder {

enum class ConceptRole { Object, Property, Action };

struct Concept {
  std::string name;
  ConceptRole role;
};

// Words are laid out as: <pad> <bos> <eos>, the function words "a", "the",
// "is", then one word per concept in concept order.
struct Vocabulary {
  std::vector<Concept> concepts;
  std::vector<std::string> words;

  // Splits K concepts into objects (40%), properties (30%) and actions.
  // Throws DataError when K leaves fewer than two objects or no property
  // or action.
  static Vocabulary build(std::size_t concepts);

  std::size_t size() const { return words.size(); }
  int word_for_concept(std::size_t concept_id) const { return kConceptWordBase + static_cast<int>(concept_id); }
  std::optional<std::size_t> concept_for_word(int word) const;
  std::optional<int> word_id(const std::string& word) const;
  std::vector<std::size_t> concepts_with_role(ConceptRole role) const;

  static constexpr int kA = kFirstWordToken;
  static constexpr int kThe = kFirstWordToken + 1;
  static constexpr int kIs = kFirstWordToken + 2;
  static constexpr int kConceptWordBase = kFirstWordToken + 3;
};

// One noun phrase: determiner, optional property, object.
struct NounPhrase {
  int determiner = Vocabulary::kA;
  std::optional<std::size_t> property;
  std::size_t object = 0;

  bool operator==(const NounPhrase&) const = default;
};

// "<subject> is <action> <object>" with concept ids for each slot.
struct SceneSemantics {
  NounPhrase subject;
  std::size_t action = 0;
  NounPhrase object;

  bool operator==(const SceneSemantics&) const = default;
  // Subject and object phrases exchanged: same words, different meaning.
  SceneSemantics role_swapped() const { return {object, action, subject}; }
  // Sorted, de-duplicated concept ids.
  std::vector<std::size_t> concept_set() const;
};

// Linearises semantics in the canonical template order.
std::vector<int> realize_caption(const Vocabulary& vocab, const SceneSemantics& sem);
// Inverse of realize_caption; nullopt if the tokens are not a sentence of
// the template grammar.
std::optional<SceneSemantics> parse_caption(const Vocabulary& vocab, std::span<const int> tokens);
std::string caption_text(const Vocabulary& vocab, std::span<const int> tokens);
// Space-separated words to ids; throws DataError on unknown words.
std::vector<int> caption_from_text(const Vocabulary& vocab, const std::string& text);

struct SceneRecord {
  std::string id;
  std::vector<std::size_t> concept_ids;  // sorted
  Vec context;
  RegionFeatureSet regions;
  TokenSequence caption;
  TokenSequence corrupted;  // role-swapped caption

  ConceptLabels labels(std::size_t concepts) const;
  bool operator==(const SceneRecord& o) const;
};

struct CorpusManifest {
  std::size_t scenes = 0;
  std::size_t concepts = 0;     // K
  std::size_t context_dim = 0;  // I
  std::size_t word_dim = 0;     // D
  std::size_t vocab = 0;        // G
  std::size_t max_len = 0;      // J
  std::size_t regions = 0;      // r
  std::uint64_t seed = 0;
  std::vector<std::size_t> train, val, test;

  bool operator==(const CorpusManifest&) const = default;
};

struct Corpus {
  CorpusManifest manifest;
  Vocabulary vocab;
  std::vector<SceneRecord> scenes;

  // Throws DataError if splits overlap or any record disagrees with the
  // recorded dimensions.
  void validate() const;
};

struct CorpusConfig {
  std::size_t concepts = 20;
  std::size_t context_dim = 32;
  std::size_t word_dim = 16;
  std::size_t max_len = 12;
  std::size_t regions = 5;
  double property_prob = 0.6;      // chance each noun phrase carries a property
  double mirror_prob = 0.5;        // chance a scene is followed by its role-swapped twin
  double region_noise = 0.3;       // relative noise norm on region features
  double context_noise = 1.0;      // relative noise norm on contexts
  double clutter_prob = 0.5;       // chance a scene's context shows distractor objects
  std::size_t clutter_objects = 3; // distractors added to a cluttered context
};

// Random vectors the features are built from; kept for consistency checks.
struct CorpusPrototypes {
  Tensor region;                 // K x I, region feature per concept
  Tensor bag;                    // K x I, role-free context component
  std::array<Tensor, 5> binding; // per slot (subject, subject property, action, object, object property), K x I
};

// n >= 2 distinct scenes, fully determined by the seed. About 10% go to each
// of test and val and the rest to train; a scene and its role-swapped twin
// always share a split.
// Throws DataError when the vocabulary cannot supply n distinct scenes or
// a caption would exceed max_len.
Corpus generate_corpus(std::size_t n, const CorpusConfig& config, std::uint64_t seed,
                       CorpusPrototypes* prototypes = nullptr);

// Directory layout: manifest.txt, concepts.txt, words.txt, records.tsv.
void write_corpus(const std::string& dir, const Corpus& corpus);
Corpus read_corpus(const std::string& dir);

}  // namespace semorder
