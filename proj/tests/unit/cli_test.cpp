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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "semorder/corpus.hpp"
#include "test_util.hpp"

namespace semorder {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "semorder");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string last_line(const std::string& s) {
  std::string t = s;
  while (!t.empty() && t.back() == '\n') t.pop_back();
  return t.substr(t.rfind('\n') + 1);
}

double csv_field(const std::string& row, std::size_t field) {
  std::istringstream in(row);
  std::string cell;
  for (std::size_t i = 0; i <= field; ++i) std::getline(in, cell, ',');
  return std::stod(cell);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"datagen"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"eval", "--data", "x", "--split", "dev"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"gradcheck", "--points", "0"}).code, cli::kUsage);
}

TEST(Cli, HelpSucceeds) { EXPECT_EQ(run_cli({"--help"}).code, cli::kOk); }

TEST(Cli, MissingInputsAreDataErrors) {
  const auto dir = testing::scratch_dir("cli_missing");
  const auto r = run_cli({"eval", "--data", dir + "/nothing"});
  EXPECT_EQ(r.code, cli::kDataError);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run_cli({"train", "--data", dir + "/nothing", "--out", dir + "/run"}).code, cli::kDataError);
}

TEST(Cli, DatagenWritesCorpus) {
  const auto dir = testing::scratch_dir("cli_datagen");
  const auto r = run_cli({"datagen", "--seed", "3", "--n", "30", "--out", dir});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto c = read_corpus(dir);
  EXPECT_EQ(c.manifest.scenes, 30u);
  EXPECT_EQ(c.manifest.seed, 3u);
}

TEST(Cli, ConflictingFlagsAreUsageErrors) {
  const auto dir = testing::scratch_dir("cli_conflict");
  ASSERT_EQ(run_cli({"datagen", "--n", "20", "--out", dir + "/data"}).code, cli::kOk);
  EXPECT_EQ(run_cli({"train", "--data", dir + "/data", "--out", dir + "/run", "--generation", "off", "--lambda", "1"})
                .code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"similarity", "--data", dir + "/data", "--checkpoint", "x", "--image", "0", "--caption", "a dog",
                     "--caption-of", "1"})
                .code,
            cli::kUsage);
}

TEST(Cli, GradcheckPasses) {
  const auto r = run_cli({"gradcheck", "--seed", "2", "--points", "2"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_NE(r.out.find("joint-loss"), std::string::npos);
}

TEST(Cli, UntrainedModelScoresNearChance) {
  const auto dir = testing::scratch_dir("cli_chance");
  ASSERT_EQ(run_cli({"datagen", "--seed", "4", "--n", "100", "--out", dir}).code, cli::kOk);
  // Chance over 100 candidates: R@1, R@5, R@10 of 1, 5 and 10 percent.
  const double chance = (1.0 + 5.0 + 10.0) / 3.0;
  double mean = 0;
  for (int seed = 1; seed <= 5; ++seed) {
    const auto r = run_cli({"eval", "--data", dir, "--split", "all", "--seed", std::to_string(seed)});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    mean += csv_field(last_line(r.out), 6) / 5.0;
  }
  EXPECT_NEAR(mean, chance, 5.0);
}

TEST(Cli, TrainEvalAndSimilarity) {
  const auto dir = testing::scratch_dir("cli_train");
  const std::string data = dir + "/data", run = dir + "/run";
  ASSERT_EQ(run_cli({"datagen", "--seed", "5", "--n", "40", "--out", data}).code, cli::kOk);
  {
    std::ofstream cfg(dir + "/run.conf");
    cfg << "lr = 0.005\nbatch_size = 40\nhead_epochs = 30\n";
  }
  const auto t = run_cli({"train", "--data", data, "--out", run, "--config", dir + "/run.conf", "--epochs", "60"});
  ASSERT_EQ(t.code, cli::kOk) << t.err;
  for (const char* f : {"model.ckpt", "metrics.csv", "report.csv"}) EXPECT_TRUE(fs::exists(fs::path(run) / f)) << f;
  {
    std::ifstream in(fs::path(run) / "metrics.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "epoch,L,L_mat,L_gen,val_mR");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 60u);
  }

  const std::string ckpt = run + "/model.ckpt";
  const auto e = run_cli({"eval", "--data", data, "--checkpoint", ckpt, "--split", "train", "--out", dir + "/eval"});
  ASSERT_EQ(e.code, cli::kOk) << e.err;
  EXPECT_GT(csv_field(last_line(e.out), 6), 40.0);
  EXPECT_EQ(run_cli({"eval", "--data", data, "--checkpoint", ckpt, "--seed", "2"}).code, cli::kUsage);

  // A trained model prefers a scene's own caption over the same words shuffled.
  const auto corpus = read_corpus(data);
  Rng rng(6);
  std::size_t wins = 0, tried = 0;
  for (auto i : corpus.manifest.train) {
    const auto& s = corpus.scenes[i];
    std::vector<int> words(s.caption.real().begin(), s.caption.real().end());
    auto shuffled = words;
    while (shuffled == words) rng.shuffle(shuffled);
    auto score = [&](const std::vector<int>& ids) {
      const auto r = run_cli({"similarity", "--data", data, "--checkpoint", ckpt, "--image", s.id, "--caption",
                              caption_text(corpus.vocab, ids)});
      EXPECT_EQ(r.code, cli::kOk) << r.err;
      return std::stod(r.out);
    };
    wins += score(words) > score(shuffled);
    ++tried;
  }
  EXPECT_GE(static_cast<double>(wins), 0.8 * static_cast<double>(tried));

  const auto own = run_cli({"similarity", "--data", data, "--checkpoint", ckpt, "--image", "0", "--caption-of", "0"});
  EXPECT_EQ(own.code, cli::kOk);
  EXPECT_EQ(run_cli({"similarity", "--data", data, "--checkpoint", ckpt, "--image", "999", "--caption-of", "0"}).code,
            cli::kDataError);
  EXPECT_EQ(run_cli({"similarity", "--data", data, "--checkpoint", ckpt, "--image", "0", "--caption", "a unicorn"}).code,
            cli::kDataError);
}

}  // namespace
}  // namespace semorder
