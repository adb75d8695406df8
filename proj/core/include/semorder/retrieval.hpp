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
#include <span>
#include <string>
#include <vector>

#include "semorder/matching.hpp"

namespace semorder {

enum class Direction {
  Annotation,  // image -> sentence
  Retrieval,   // sentence -> image
};

// Recall percentages at k = 1, 5, 10 in both directions.
struct RetrievalReport {
  double r1_ann = 0, r5_ann = 0, r10_ann = 0;
  double r1_ret = 0, r5_ret = 0, r10_ret = 0;
  double mr = 0;  // mean of the six recalls

  std::array<double, 6> recalls() const { return {r1_ann, r5_ann, r10_ann, r1_ret, r5_ret, r10_ret}; }
};

// Percentage of queries whose groundtruth is ranked within the top k.
// Sentences of image i are columns [i * cpi, (i + 1) * cpi). Candidates
// with equal scores rank by lower index first. Throws std::invalid_argument
// if k is zero or exceeds the candidate count, DimensionError if the column
// count is not images * captions_per_image.
double recall_at_k(const SimilarityMatrix& s, std::size_t k, Direction direction,
                   std::size_t captions_per_image = 1);

// R@1/5/10 in both directions. k values larger than the candidate count are
// clamped to it, so tiny evaluation sets still produce a report.
RetrievalReport evaluate_retrieval(const SimilarityMatrix& s, std::size_t captions_per_image = 1);

// Arithmetic mean of per-fold reports. Throws DegenerateInputError if empty.
RetrievalReport average_reports(std::span<const RetrievalReport> reports);
RetrievalReport crossval_report(std::span<const SimilarityMatrix> folds, std::size_t captions_per_image = 1);

// Column order: R@1 R@5 R@10 (annotation), R@1 R@5 R@10 (retrieval), mR.
std::string report_csv_header();
std::string report_csv_row(const RetrievalReport& r);
std::string report_table(const RetrievalReport& r, const std::string& label = "model");

}  // namespace semorder
