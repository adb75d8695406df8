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

#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "semorder/checkpoint.hpp"
#include "semorder/errors.hpp"
#include "semorder/pipeline.hpp"

namespace semorder::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kGradTolerance = 1e-4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  std::string checkpoint;
  double lambda = 1.0;
  std::string fusion;
  std::string generation;
  std::size_t epochs = 0;
  std::string data;
  std::size_t n = 500;
  std::string split = "test";
  std::size_t points = 10;
  std::string image;
  std::string caption;
  std::string caption_of;
};

bool given(const CLI::App& cmd, const std::string& flag) {
  const auto* opt = cmd.get_option_no_throw(flag);
  return opt && opt->count() > 0;
}

// Config file first, then explicit flags on top.
TrainConfig resolve_config(const Options& o, const CLI::App& cmd) {
  TrainConfig cfg = o.config.empty() ? TrainConfig{} : load_config_file(o.config);
  if (given(cmd, "--seed")) {
    cfg.seed = o.seed;
    cfg.head.seed = o.seed;
  }
  if (given(cmd, "--lambda")) cfg.lambda = o.lambda;
  if (given(cmd, "--fusion")) cfg.fusion = parse_fusion_mode(o.fusion);
  if (given(cmd, "--generation")) cfg.generation = o.generation == "on";
  if (given(cmd, "--epochs")) cfg.epochs = o.epochs;
  if (given(cmd, "--generation") && !cfg.generation && given(cmd, "--lambda") && o.lambda != 0.0) {
    throw UsageError("--lambda weights the generation loss and conflicts with --generation off");
  }
  return cfg;
}

std::vector<std::size_t> split_indices(const Corpus& corpus, const std::string& split) {
  const auto& m = corpus.manifest;
  if (split == "train") return m.train;
  if (split == "val") return m.val;
  if (split == "test") return m.test;
  std::vector<std::size_t> all(corpus.scenes.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

std::size_t find_scene(const Corpus& corpus, const std::string& key) {
  for (std::size_t i = 0; i < corpus.scenes.size(); ++i) {
    if (corpus.scenes[i].id == key) return i;
  }
  std::size_t pos = 0;
  std::size_t idx = 0;
  try {
    idx = std::stoull(key, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != key.size() || idx >= corpus.scenes.size()) throw DataError("no scene " + key + " in corpus");
  return idx;
}

int cmd_datagen(const Options& o, const CLI::App& cmd, std::ostream& out) {
  const TrainConfig dims = resolve_config(o, cmd);
  CorpusConfig cc;
  cc.concepts = dims.concepts;
  cc.context_dim = dims.context_dim;
  cc.word_dim = dims.word_dim;
  cc.max_len = dims.max_len;
  cc.regions = dims.regions;
  const Corpus corpus = generate_corpus(o.n, cc, o.seed);
  write_corpus(o.out, corpus);
  const auto& m = corpus.manifest;
  out << "wrote " << m.scenes << " scenes to " << o.out << " (train " << m.train.size() << ", val " << m.val.size()
      << ", test " << m.test.size() << "; K=" << m.concepts << " G=" << m.vocab << ")\n";
  return kOk;
}

int cmd_train(const Options& o, const CLI::App& cmd, std::ostream& out) {
  const Corpus corpus = read_corpus(o.data);
  const TrainConfig cfg = config_for_corpus(corpus.manifest, resolve_config(o, cmd));
  MatchingModel model(cfg);
  const auto result = run_experiment(model, corpus, [&](const EpochMetrics& m, MatchingModel&) {
    out << "epoch " << m.epoch << "  L " << m.loss << "  L_mat " << m.l_mat << "  L_gen " << m.l_gen << "  val mR "
        << m.val_mr << '\n';
    return false;
  });

  fs::create_directories(o.out);
  const std::string ckpt = o.checkpoint.empty() ? (fs::path(o.out) / "model.ckpt").string() : o.checkpoint;
  save_model(ckpt, model);
  {
    std::ofstream csv(fs::path(o.out) / "metrics.csv");
    write_metrics_csv(csv, result.train.epochs);
  }
  {
    std::ofstream rep(fs::path(o.out) / "report.csv");
    rep << report_csv_header() << '\n' << report_csv_row(result.test) << '\n';
  }
  out << "best val mR " << result.train.best_val_mr << " at epoch " << result.train.best_epoch << '\n'
      << report_table(result.test, "test") << "checkpoint " << ckpt << '\n';
  return kOk;
}

int cmd_eval(const Options& o, const CLI::App& cmd, std::ostream& out) {
  const Corpus corpus = read_corpus(o.data);
  std::unique_ptr<MatchingModel> model;
  if (!o.checkpoint.empty()) {
    model = load_model(o.checkpoint);
  } else {
    model = std::make_unique<MatchingModel>(config_for_corpus(corpus.manifest, resolve_config(o, cmd)));
  }
  const auto idx = split_indices(corpus, o.split);
  if (idx.empty()) throw DataError("split " + o.split + " is empty");
  const PairSet pairs = make_pairs(*model, corpus, idx);
  const auto report = evaluate_retrieval(similarity_matrix(*model, pairs));
  out << report_table(report, o.split) << report_csv_header() << '\n' << report_csv_row(report) << '\n';
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream rep(fs::path(o.out) / "report.csv");
    rep << report_csv_header() << '\n' << report_csv_row(report) << '\n';
  }
  return kOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  const auto suites = run_gradcheck_suites(o.seed, o.points);
  double worst = 0.0;
  out << std::left << std::setw(16) << "module" << std::setw(8) << "points" << "max_rel_err\n";
  for (const auto& s : suites) {
    out << std::setw(16) << s.module << std::setw(8) << s.points << std::scientific << std::setprecision(3)
        << s.max_relative_error << std::defaultfloat << '\n';
    worst = std::max(worst, s.max_relative_error);
  }
  const bool ok = worst < kGradTolerance;
  out << (ok ? "PASS" : "FAIL") << " max relative error " << std::scientific << std::setprecision(3) << worst
      << std::defaultfloat << " (tolerance " << kGradTolerance << ")\n";
  return ok ? kOk : kNumericFailure;
}

int cmd_similarity(const Options& o, std::ostream& out) {
  const Corpus corpus = read_corpus(o.data);
  const auto model = load_model(o.checkpoint);
  const auto& scene = corpus.scenes.at(find_scene(corpus, o.image));
  TokenSequence tokens;
  if (!o.caption_of.empty()) {
    tokens = corpus.scenes.at(find_scene(corpus, o.caption_of)).caption;
  } else {
    auto ids = caption_from_text(corpus.vocab, o.caption);
    if (ids.empty()) throw DataError("caption is empty");
    if (ids.size() > model->config().max_len) throw DataError("caption longer than max_len");
    tokens = TokenSequence::padded(std::move(ids), model->config().max_len);
  }
  const double score = model->similarity(model->concept_scores(scene.regions), scene.context, tokens);
  out << std::setprecision(10) << score << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic-order image-sentence matching: data generation, training and evaluation"};
  app.require_subcommand(1);
  Options o;

  auto add_model_flags = [&](CLI::App* c) {
    c->add_option("--config", o.config, "flat key=value config file");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--lambda", o.lambda, "weight of the generation loss")->check(CLI::NonNegativeNumber);
    c->add_option("--fusion", o.fusion, "fusion mode")->check(CLI::IsMember({"gate", "sum", "context", "concept"}));
    c->add_option("--generation", o.generation, "generation supervision")->check(CLI::IsMember({"on", "off"}));
    c->add_option("--epochs", o.epochs, "training epochs")->check(CLI::PositiveNumber);
  };

  auto* datagen = app.add_subcommand("datagen", "write a synthetic corpus");
  datagen->add_option("--config", o.config, "dimensions from a config file");
  datagen->add_option("--seed", o.seed, "random seed");
  datagen->add_option("--n", o.n, "number of scenes")->check(CLI::Range(2, 1000000));
  datagen->add_option("--out", o.out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train a model and write checkpoint, metrics and report");
  train->add_option("--data", o.data, "corpus directory")->required();
  train->add_option("--out", o.out, "run directory")->required();
  train->add_option("--checkpoint", o.checkpoint, "checkpoint path (default OUT/model.ckpt)");
  add_model_flags(train);

  auto* eval = app.add_subcommand("eval", "retrieval report for a checkpoint on a corpus split");
  eval->add_option("--data", o.data, "corpus directory")->required();
  auto* eval_ckpt = eval->add_option("--checkpoint", o.checkpoint, "trained checkpoint");
  eval->add_option("--split", o.split, "split to score")->check(CLI::IsMember({"train", "val", "test", "all"}));
  eval->add_option("--out", o.out, "directory for report.csv");
  add_model_flags(eval);
  for (const char* flag : {"--config", "--seed", "--lambda", "--fusion", "--generation", "--epochs"}) {
    eval_ckpt->excludes(eval->get_option(flag));
  }

  auto* grad = app.add_subcommand("gradcheck", "run every finite-difference suite");
  grad->add_option("--seed", o.seed, "random seed");
  grad->add_option("--points", o.points, "seeded points per suite")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("similarity", "cosine score of one image against one caption");
  sim->add_option("--data", o.data, "corpus directory")->required();
  sim->add_option("--checkpoint", o.checkpoint, "trained checkpoint")->required();
  sim->add_option("--image", o.image, "scene id or index")->required();
  auto* cap = sim->add_option("--caption", o.caption, "caption text");
  auto* cap_of = sim->add_option("--caption-of", o.caption_of, "use the caption of this scene");
  cap->excludes(cap_of);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
    if (*sim && !*cap && !*cap_of) throw UsageError("similarity needs --caption or --caption-of");
    if (*datagen) return cmd_datagen(o, *datagen, out);
    if (*train) return cmd_train(o, *train, out);
    if (*eval) return cmd_eval(o, *eval, out);
    if (*grad) return cmd_gradcheck(o, out);
    return cmd_similarity(o, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const EvaluationError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const DegenerateInputError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace semorder::cli
