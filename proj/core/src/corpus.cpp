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

#include "semorder/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "semorder/errors.hpp"
#include "semorder/random.hpp"

namespace semorder {

namespace {

constexpr const char* kObjectNames[] = {"dog",  "cat",  "man",  "woman", "horse", "child", "bird",
                                        "ball", "car",  "tree", "boy",   "girl",  "kite",  "bike",
                                        "boat", "fish", "cow",  "sheep", "table", "chair"};
constexpr const char* kPropertyNames[] = {"red",   "small", "young", "black", "white", "big",
                                          "old",   "brown", "happy", "tall",  "green", "yellow",
                                          "dirty", "wet",   "tiny",  "shiny"};
constexpr const char* kActionNames[] = {"chasing",   "holding", "watching", "riding",  "pushing",
                                        "carrying",  "kicking", "feeding",  "pulling", "following",
                                        "touching",  "biting",  "hugging",  "washing", "painting",
                                        "lifting"};

template <std::size_t N>
std::string pick_name(const char* const (&names)[N], std::size_t i, const char* fallback) {
  if (i < N) return names[i];
  return std::string(fallback) + std::to_string(i);
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Vocabulary Vocabulary::build(std::size_t k) {
  const std::size_t objects = (2 * k + 4) / 5;
  const std::size_t properties = (3 * k) / 10;
  if (objects < 2 || properties < 1 || k < objects + properties + 1) {
    throw DataError("vocabulary of " + std::to_string(k) +
                    " concepts is too small: need two objects, a property and an action");
  }
  Vocabulary v;
  for (std::size_t i = 0; i < objects; ++i) v.concepts.push_back({pick_name(kObjectNames, i, "object"), ConceptRole::Object});
  for (std::size_t i = 0; i < properties; ++i) {
    v.concepts.push_back({pick_name(kPropertyNames, i, "property"), ConceptRole::Property});
  }
  for (std::size_t i = 0; i < k - objects - properties; ++i) {
    v.concepts.push_back({pick_name(kActionNames, i, "action"), ConceptRole::Action});
  }
  v.words = {"<pad>", "<bos>", "<eos>", "a", "the", "is"};
  for (const auto& c : v.concepts) v.words.push_back(c.name);
  return v;
}

std::optional<std::size_t> Vocabulary::concept_for_word(int word) const {
  if (word < kConceptWordBase) return std::nullopt;
  const auto c = static_cast<std::size_t>(word - kConceptWordBase);
  if (c >= concepts.size()) return std::nullopt;
  return c;
}

std::optional<int> Vocabulary::word_id(const std::string& word) const {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == word) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::vector<std::size_t> Vocabulary::concepts_with_role(ConceptRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    if (concepts[i].role == role) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> SceneSemantics::concept_set() const {
  std::set<std::size_t> s{subject.object, action, object.object};
  if (subject.property) s.insert(*subject.property);
  if (object.property) s.insert(*object.property);
  return {s.begin(), s.end()};
}

std::vector<int> realize_caption(const Vocabulary& vocab, const SceneSemantics& sem) {
  std::vector<int> out;
  auto phrase = [&](const NounPhrase& np) {
    out.push_back(np.determiner);
    if (np.property) out.push_back(vocab.word_for_concept(*np.property));
    out.push_back(vocab.word_for_concept(np.object));
  };
  phrase(sem.subject);
  out.push_back(Vocabulary::kIs);
  out.push_back(vocab.word_for_concept(sem.action));
  phrase(sem.object);
  return out;
}

std::optional<SceneSemantics> parse_caption(const Vocabulary& vocab, std::span<const int> tokens) {
  std::size_t pos = 0;
  auto role_at = [&](std::size_t p) -> std::optional<std::pair<std::size_t, ConceptRole>> {
    if (p >= tokens.size()) return std::nullopt;
    auto c = vocab.concept_for_word(tokens[p]);
    if (!c) return std::nullopt;
    return std::make_pair(*c, vocab.concepts[*c].role);
  };
  auto phrase = [&]() -> std::optional<NounPhrase> {
    if (pos >= tokens.size() || (tokens[pos] != Vocabulary::kA && tokens[pos] != Vocabulary::kThe)) {
      return std::nullopt;
    }
    NounPhrase np;
    np.determiner = tokens[pos++];
    auto w = role_at(pos);
    if (w && w->second == ConceptRole::Property) {
      np.property = w->first;
      ++pos;
      w = role_at(pos);
    }
    if (!w || w->second != ConceptRole::Object) return std::nullopt;
    np.object = w->first;
    ++pos;
    return np;
  };

  SceneSemantics sem;
  auto subj = phrase();
  if (!subj) return std::nullopt;
  sem.subject = *subj;
  if (pos >= tokens.size() || tokens[pos] != Vocabulary::kIs) return std::nullopt;
  ++pos;
  auto act = role_at(pos);
  if (!act || act->second != ConceptRole::Action) return std::nullopt;
  sem.action = act->first;
  ++pos;
  auto obj = phrase();
  if (!obj || pos != tokens.size()) return std::nullopt;
  sem.object = *obj;
  return sem;
}

std::string caption_text(const Vocabulary& vocab, std::span<const int> tokens) {
  std::string out;
  for (int t : tokens) {
    if (!out.empty()) out += ' ';
    out += (t >= 0 && static_cast<std::size_t>(t) < vocab.words.size()) ? vocab.words[t] : "<unk>";
  }
  return out;
}

std::vector<int> caption_from_text(const Vocabulary& vocab, const std::string& text) {
  std::istringstream in(text);
  std::vector<int> out;
  std::string w;
  while (in >> w) {
    auto id = vocab.word_id(w);
    if (!id) throw DataError("unknown word: " + w);
    out.push_back(*id);
  }
  return out;
}

ConceptLabels SceneRecord::labels(std::size_t concepts) const {
  ConceptLabels y(concepts, 0);
  for (auto c : concept_ids) y.at(c) = 1;
  return y;
}

bool SceneRecord::operator==(const SceneRecord& o) const {
  return id == o.id && concept_ids == o.concept_ids && context == o.context && regions.image_id == o.regions.image_id &&
         regions.regions == o.regions.regions && caption == o.caption && caption.ids == o.caption.ids &&
         corrupted == o.corrupted && corrupted.ids == o.corrupted.ids;
}

void Corpus::validate() const {
  const auto& m = manifest;
  if (scenes.size() != m.scenes) throw DataError("manifest scene count disagrees with records");
  if (vocab.concepts.size() != m.concepts || vocab.size() != m.vocab) {
    throw DataError("manifest dimensions disagree with vocabulary");
  }
  std::vector<int> seen(scenes.size(), 0);
  for (const auto* split : {&m.train, &m.val, &m.test}) {
    for (auto i : *split) {
      if (i >= scenes.size()) throw DataError("split index out of range");
      if (seen[i]++) throw DataError("splits are not disjoint at scene " + std::to_string(i));
    }
  }
  for (const auto& s : scenes) {
    if (s.context.size() != m.context_dim) throw DataError(s.id + ": context has wrong dimension");
    if (s.regions.regions.size() != m.regions) throw DataError(s.id + ": wrong region count");
    for (const auto& r : s.regions.regions) {
      if (r.size() != m.context_dim) throw DataError(s.id + ": region feature has wrong dimension");
    }
    for (auto c : s.concept_ids) {
      if (c >= m.concepts) throw DataError(s.id + ": concept id out of range");
    }
    for (const auto* t : {&s.caption, &s.corrupted}) {
      if (t->ids.size() != m.max_len || t->length == 0 || t->length > m.max_len) {
        throw DataError(s.id + ": caption does not fit max_len");
      }
      for (int id : t->real()) {
        if (id < kFirstWordToken || static_cast<std::size_t>(id) >= m.vocab) throw DataError(s.id + ": bad word id");
      }
    }
  }
}

namespace {

Tensor random_rows(Rng& rng, std::size_t rows, std::size_t dim) {
  Tensor t({rows, dim});
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& v : t.values()) v = rng.normal() * scale;
  return t;
}

Vec noise_vector(Rng& rng, std::size_t dim, double norm) {
  Vec n(dim);
  const double scale = norm / std::sqrt(static_cast<double>(dim));
  for (auto& v : n) v = rng.normal() * scale;
  return n;
}

using SemanticKey = std::tuple<std::size_t, long, std::size_t, std::size_t, long>;

SemanticKey key_of(const SceneSemantics& s) {
  auto p = [](const std::optional<std::size_t>& o) { return o ? static_cast<long>(*o) : -1L; };
  return {s.subject.object, p(s.subject.property), s.action, s.object.object, p(s.object.property)};
}

}  // namespace

Corpus generate_corpus(std::size_t n, const CorpusConfig& cfg, std::uint64_t seed, CorpusPrototypes* prototypes) {
  if (n < 2) throw DataError("a corpus needs at least two scenes");
  if (cfg.regions == 0 || cfg.context_dim == 0) throw DataError("regions and context_dim must be positive");
  Corpus corpus;
  corpus.vocab = Vocabulary::build(cfg.concepts);
  const auto& vocab = corpus.vocab;
  const auto objects = vocab.concepts_with_role(ConceptRole::Object);
  const auto props = vocab.concepts_with_role(ConceptRole::Property);
  const auto actions = vocab.concepts_with_role(ConceptRole::Action);
  if (cfg.max_len < 8) throw DataError("max_len must be at least 8 for the caption template");

  const double capacity = static_cast<double>(objects.size()) * static_cast<double>(objects.size() - 1) *
                          static_cast<double>(actions.size()) * std::pow(static_cast<double>(props.size() + 1), 2);
  if (static_cast<double>(n) > capacity) {
    throw DataError("vocabulary too small: " + std::to_string(n) + " scenes requested, only " +
                    std::to_string(static_cast<long long>(capacity)) + " distinct scenes exist");
  }

  Rng rng(seed);
  CorpusPrototypes protos;
  protos.region = random_rows(rng, cfg.concepts, cfg.context_dim);
  protos.bag = random_rows(rng, cfg.concepts, cfg.context_dim);
  for (auto& b : protos.binding) b = random_rows(rng, cfg.concepts, cfg.context_dim);

  auto draw_phrase = [&](std::size_t object) {
    NounPhrase np;
    np.determiner = rng.bernoulli(0.5) ? Vocabulary::kA : Vocabulary::kThe;
    if (rng.bernoulli(cfg.property_prob)) np.property = props[rng.below(props.size())];
    np.object = object;
    return np;
  };
  auto draw_scene = [&]() {
    const std::size_t s = rng.below(objects.size());
    std::size_t o = rng.below(objects.size() - 1);
    if (o >= s) ++o;
    SceneSemantics sem;
    sem.subject = draw_phrase(objects[s]);
    sem.action = actions[rng.below(actions.size())];
    sem.object = draw_phrase(objects[o]);
    return sem;
  };

  // Distinct meanings; determiners do not count towards distinctness.
  std::vector<SceneSemantics> sems;
  std::vector<std::vector<std::size_t>> groups;  // a scene and its twin, if any
  std::set<SemanticKey> used;
  const std::size_t max_attempts = 1000 * n + 100000;
  std::size_t attempts = 0;
  while (sems.size() < n) {
    if (++attempts > max_attempts) throw DataError("vocabulary too small to draw distinct scenes");
    SceneSemantics sem = draw_scene();
    if (!used.insert(key_of(sem)).second) continue;
    groups.push_back({sems.size()});
    sems.push_back(sem);
    if (sems.size() < n && rng.bernoulli(cfg.mirror_prob)) {
      SceneSemantics twin = sem.role_swapped();
      if (used.insert(key_of(twin)).second) {
        groups.back().push_back(sems.size());
        sems.push_back(twin);
      }
    }
  }

  const std::size_t I = cfg.context_dim;
  corpus.scenes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sem = sems[i];
    SceneRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "scene%05zu", i);
    rec.id = id;
    rec.concept_ids = sem.concept_set();

    // Regions: the first covers the whole scene, the rest one or two concepts.
    rec.regions.image_id = rec.id;
    for (std::size_t r = 0; r < cfg.regions; ++r) {
      std::vector<std::size_t> subset;
      if (r == 0) {
        subset = rec.concept_ids;
      } else {
        subset = rng.sample(rec.concept_ids, 1 + rng.below(2));
      }
      Vec f = noise_vector(rng, I, cfg.region_noise);
      for (auto c : subset) axpy(1.0, protos.region.row(c), f);
      rec.regions.regions.push_back(std::move(f));
    }

    // Context: role-free description of every concept plus slot-bound terms.
    Vec x(I, 0.0);
    auto add_slot = [&](std::size_t slot, std::size_t c) {
      axpy(1.0, protos.bag.row(c), x);
      axpy(1.0, protos.binding[slot].row(c), x);
    };
    add_slot(0, sem.subject.object);
    if (sem.subject.property) add_slot(1, *sem.subject.property);
    add_slot(2, sem.action);
    add_slot(3, sem.object.object);
    if (sem.object.property) add_slot(4, *sem.object.property);
    // Clutter: background objects that are visible globally but play no role.
    if (rng.bernoulli(cfg.clutter_prob)) {
      std::vector<std::size_t> others;
      for (auto o : objects) {
        if (o != sem.subject.object && o != sem.object.object) others.push_back(o);
      }
      for (auto o : rng.sample(others, cfg.clutter_objects)) axpy(1.0, protos.bag.row(o), x);
    }
    axpy(1.0, noise_vector(rng, I, cfg.context_noise * norm2(x)), x);
    rec.context = l2_normalize(x);

    rec.caption = TokenSequence::padded(realize_caption(vocab, sem), cfg.max_len);
    rec.corrupted = TokenSequence::padded(realize_caption(vocab, sem.role_swapped()), cfg.max_len);
    corpus.scenes.push_back(std::move(rec));
  }

  // Twins never straddle splits, so held-out retrieval has to tell them apart.
  rng.shuffle(groups);
  auto& m = corpus.manifest;
  const std::size_t n_test = n / 10, n_val = n / 10;
  for (const auto& g : groups) {
    auto* split = m.test.size() < n_test ? &m.test : m.val.size() < n_val ? &m.val : &m.train;
    split->insert(split->end(), g.begin(), g.end());
  }
  for (auto* s : {&m.train, &m.val, &m.test}) std::sort(s->begin(), s->end());
  m.scenes = n;
  m.concepts = cfg.concepts;
  m.context_dim = I;
  m.word_dim = cfg.word_dim;
  m.vocab = vocab.size();
  m.max_len = cfg.max_len;
  m.regions = cfg.regions;
  m.seed = seed;

  if (prototypes) *prototypes = std::move(protos);
  corpus.validate();
  return corpus;
}

// ---------------------------------------------------------------------------
// Text I/O

namespace {

std::string join_ids(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_reals(const Vec& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_real(v[i]);
  }
  return out;
}

std::string join_tokens(const TokenSequence& t) {
  std::string out;
  for (std::size_t i = 0; i < t.length; ++i) {
    if (i) out += ' ';
    out += std::to_string(t.ids[i]);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::size_t> parse_ids(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::size_t> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw DataError("bad integer in corpus: " + tok);
    }
  }
  return out;
}

Vec parse_reals(const std::string& s) {
  std::istringstream in(s);
  Vec out;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw DataError("bad real in corpus: " + tok);
    out.push_back(v);
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  return out;
}

const char* role_name(ConceptRole r) {
  switch (r) {
    case ConceptRole::Object: return "object";
    case ConceptRole::Property: return "property";
    case ConceptRole::Action: return "action";
  }
  return "object";
}

ConceptRole parse_role(const std::string& s) {
  if (s == "object") return ConceptRole::Object;
  if (s == "property") return ConceptRole::Property;
  if (s == "action") return ConceptRole::Action;
  throw DataError("unknown concept role: " + s);
}

}  // namespace

void write_corpus(const std::string& dir, const Corpus& corpus) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto& m = corpus.manifest;
  {
    auto out = open_out(fs::path(dir) / "manifest.txt");
    out << "format=semorder-corpus-1\n"
        << "scenes=" << m.scenes << "\n"
        << "concepts=" << m.concepts << "\n"
        << "context_dim=" << m.context_dim << "\n"
        << "word_dim=" << m.word_dim << "\n"
        << "vocab=" << m.vocab << "\n"
        << "max_len=" << m.max_len << "\n"
        << "regions=" << m.regions << "\n"
        << "seed=" << m.seed << "\n"
        << "train=" << join_ids(m.train) << "\n"
        << "val=" << join_ids(m.val) << "\n"
        << "test=" << join_ids(m.test) << "\n";
  }
  {
    auto out = open_out(fs::path(dir) / "concepts.txt");
    for (std::size_t i = 0; i < corpus.vocab.concepts.size(); ++i) {
      out << i << '\t' << corpus.vocab.concepts[i].name << '\t' << role_name(corpus.vocab.concepts[i].role) << '\n';
    }
  }
  {
    auto out = open_out(fs::path(dir) / "words.txt");
    for (std::size_t i = 0; i < corpus.vocab.words.size(); ++i) out << i << '\t' << corpus.vocab.words[i] << '\n';
  }
  {
    auto out = open_out(fs::path(dir) / "records.tsv");
    for (const auto& s : corpus.scenes) {
      std::string regions;
      for (std::size_t r = 0; r < s.regions.regions.size(); ++r) {
        if (r) regions += " | ";
        regions += join_reals(s.regions.regions[r]);
      }
      out << s.id << '\t' << join_ids(s.concept_ids) << '\t' << join_reals(s.context) << '\t' << regions << '\t'
          << join_tokens(s.caption) << '\t' << join_tokens(s.corrupted) << '\n';
    }
  }
}

Corpus read_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  Corpus corpus;
  auto& m = corpus.manifest;
  {
    auto in = open_in(fs::path(dir) / "manifest.txt");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw DataError("malformed manifest line: " + line);
      kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    if (kv["format"] != "semorder-corpus-1") throw DataError("unknown corpus format in " + dir);
    auto num = [&](const char* k) {
      auto ids = parse_ids(kv[k]);
      if (ids.size() != 1) throw DataError(std::string("manifest field ") + k + " missing");
      return ids[0];
    };
    m.scenes = num("scenes");
    m.concepts = num("concepts");
    m.context_dim = num("context_dim");
    m.word_dim = num("word_dim");
    m.vocab = num("vocab");
    m.max_len = num("max_len");
    m.regions = num("regions");
    m.seed = num("seed");
    m.train = parse_ids(kv["train"]);
    m.val = parse_ids(kv["val"]);
    m.test = parse_ids(kv["test"]);
  }
  {
    auto in = open_in(fs::path(dir) / "concepts.txt");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = split(line, '\t');
      if (f.size() != 3) throw DataError("malformed concepts line: " + line);
      corpus.vocab.concepts.push_back({f[1], parse_role(f[2])});
    }
  }
  {
    auto in = open_in(fs::path(dir) / "words.txt");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = split(line, '\t');
      if (f.size() != 2) throw DataError("malformed words line: " + line);
      corpus.vocab.words.push_back(f[1]);
    }
  }
  {
    auto in = open_in(fs::path(dir) / "records.tsv");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto f = split(line, '\t');
      if (f.size() != 6) throw DataError("records.tsv line " + std::to_string(lineno) + ": expected 6 fields");
      SceneRecord rec;
      rec.id = f[0];
      rec.concept_ids = parse_ids(f[1]);
      rec.context = parse_reals(f[2]);
      rec.regions.image_id = rec.id;
      for (const auto& r : split(f[3], '|')) rec.regions.regions.push_back(parse_reals(r));
      auto to_tokens = [&](const std::string& s) {
        auto ids = parse_ids(s);
        if (ids.size() > m.max_len) throw DataError(rec.id + ": caption longer than max_len");
        std::vector<int> t(ids.begin(), ids.end());
        return TokenSequence::padded(std::move(t), m.max_len);
      };
      rec.caption = to_tokens(f[4]);
      rec.corrupted = to_tokens(f[5]);
      corpus.scenes.push_back(std::move(rec));
    }
  }
  corpus.validate();
  return corpus;
}

}  // namespace semorder
