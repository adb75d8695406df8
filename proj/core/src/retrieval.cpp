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

#include "semorder/retrieval.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "semorder/errors.hpp"

namespace semorder {

namespace {

// Position of `target` when `scores` are sorted descending with ties broken
// by lower index.
std::size_t rank_of(std::span<const double> scores, std::size_t target) {
  const double t = scores[target];
  std::size_t rank = 0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c] > t || (scores[c] == t && c < target)) ++rank;
  }
  return rank;
}

void check_shape(const SimilarityMatrix& s, std::size_t cpi) {
  if (cpi == 0) throw std::invalid_argument("captions_per_image must be positive");
  if (s.sentences() != s.images() * cpi) {
    throw DimensionError("similarity matrix has " + std::to_string(s.sentences()) + " sentences for " +
                         std::to_string(s.images()) + " images at " + std::to_string(cpi) + " captions each");
  }
}

}  // namespace

double recall_at_k(const SimilarityMatrix& s, std::size_t k, Direction direction, std::size_t cpi) {
  check_shape(s, cpi);
  const std::size_t candidates = direction == Direction::Annotation ? s.sentences() : s.images();
  if (k == 0 || k > candidates) {
    throw std::invalid_argument("k = " + std::to_string(k) + " outside [1, " + std::to_string(candidates) + "]");
  }
  std::size_t hits = 0;
  std::size_t queries = 0;
  if (direction == Direction::Annotation) {
    for (std::size_t i = 0; i < s.images(); ++i) {
      auto row = s.scores.row(i);
      std::size_t best = candidates;
      for (std::size_t j = i * cpi; j < (i + 1) * cpi; ++j) best = std::min(best, rank_of(row, j));
      hits += best < k;
      ++queries;
    }
  } else {
    std::vector<double> col(s.images());
    for (std::size_t j = 0; j < s.sentences(); ++j) {
      for (std::size_t i = 0; i < s.images(); ++i) col[i] = s(i, j);
      hits += rank_of(col, j / cpi) < k;
      ++queries;
    }
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(queries);
}

RetrievalReport evaluate_retrieval(const SimilarityMatrix& s, std::size_t cpi) {
  check_shape(s, cpi);
  auto ann = [&](std::size_t k) { return recall_at_k(s, std::min(k, s.sentences()), Direction::Annotation, cpi); };
  auto ret = [&](std::size_t k) { return recall_at_k(s, std::min(k, s.images()), Direction::Retrieval, cpi); };
  RetrievalReport r;
  r.r1_ann = ann(1);
  r.r5_ann = ann(5);
  r.r10_ann = ann(10);
  r.r1_ret = ret(1);
  r.r5_ret = ret(5);
  r.r10_ret = ret(10);
  const auto all = r.recalls();
  double sum = 0.0;
  for (double v : all) sum += v;
  r.mr = sum / 6.0;
  return r;
}

RetrievalReport average_reports(std::span<const RetrievalReport> reports) {
  if (reports.empty()) throw DegenerateInputError("no folds to average");
  RetrievalReport out;
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    out.r1_ann += r.r1_ann / n;
    out.r5_ann += r.r5_ann / n;
    out.r10_ann += r.r10_ann / n;
    out.r1_ret += r.r1_ret / n;
    out.r5_ret += r.r5_ret / n;
    out.r10_ret += r.r10_ret / n;
    out.mr += r.mr / n;
  }
  return out;
}

RetrievalReport crossval_report(std::span<const SimilarityMatrix> folds, std::size_t cpi) {
  if (folds.empty()) throw DegenerateInputError("no folds to average");
  std::vector<RetrievalReport> reports;
  reports.reserve(folds.size());
  for (const auto& f : folds) reports.push_back(evaluate_retrieval(f, cpi));
  return average_reports(reports);
}

std::string report_csv_header() { return "ann_r1,ann_r5,ann_r10,ret_r1,ret_r5,ret_r10,mR"; }

std::string report_csv_row(const RetrievalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  const auto all = r.recalls();
  for (double v : all) os << v << ',';
  os << r.mr;
  return os.str();
}

std::string report_table(const RetrievalReport& r, const std::string& label) {
  std::ostringstream os;
  const int w = 8;
  const std::size_t lw = std::max<std::size_t>(label.size(), 6);
  os << std::left << std::setw(static_cast<int>(lw)) << "" << " |" << std::right << std::setw(3 * w)
     << "Image Annotation" << " |" << std::setw(3 * w) << "Image Retrieval" << " |" << std::setw(w) << ""
     << '\n';
  os << std::left << std::setw(static_cast<int>(lw)) << "Method" << " |" << std::right;
  for (const char* h : {"R@1", "R@5", "R@10"}) os << std::setw(w) << h;
  os << " |";
  for (const char* h : {"R@1", "R@5", "R@10"}) os << std::setw(w) << h;
  os << " |" << std::setw(w) << "mR" << '\n';
  os << std::left << std::setw(static_cast<int>(lw)) << label << " |" << std::right << std::fixed
     << std::setprecision(1);
  os << std::setw(w) << r.r1_ann << std::setw(w) << r.r5_ann << std::setw(w) << r.r10_ann << " |";
  os << std::setw(w) << r.r1_ret << std::setw(w) << r.r5_ret << std::setw(w) << r.r10_ret << " |";
  os << std::setw(w) << r.mr << '\n';
  return os.str();
}

}  // namespace semorder
