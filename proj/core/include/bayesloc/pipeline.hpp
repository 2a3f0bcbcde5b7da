// Copyright 2026 The bayesloc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BAYESLOC_PIPELINE_HPP_
#define BAYESLOC_PIPELINE_HPP_

// End-to-end inference: score vectors -> (optional) temporal-order
// refinement -> top-1 interval extraction -> Recall@1 evaluation, plus the
// alpha/beta grid sweep built on it.

#include <map>
#include <span>
#include <vector>

#include "bayesloc/evaluation.hpp"
#include "bayesloc/extraction.hpp"
#include "bayesloc/ground_truth.hpp"
#include "bayesloc/prior.hpp"
#include "bayesloc/video.hpp"

namespace bayesloc {

struct VideoRecord {
  VideoMeta meta;
  std::vector<QueryAnnotation> queries;

  void validate() const;
};

using Dataset = std::vector<VideoRecord>;

// Validates every record and rejects duplicate video ids.
void validate_dataset(const Dataset& dataset);

// Raw (unrefined) per-query scores keyed by (video_id, query_id).
using ScoreTable = std::map<QueryKey, ScoreVector>;

struct PipelineConfig {
  ExtractionConfig extraction;
  PriorConfig prior;
  bool use_prior = true;
  std::vector<double> thresholds = kDefaultThresholds;
  int jobs = 1;

  void validate() const;
};

struct QueryPrediction {
  QueryKey key;
  IntervalPrediction interval;
};

struct PipelineResult {
  std::vector<QueryPrediction> predictions;  // dataset order
  EvalResult eval;

  double mean_interval_seconds() const;
  double mean_interval_segments() const;
};

// Scores of every video, index-aligned with each video's annotations.
// Throws ValidationError on missing or unexpected keys and on length
// mismatches with the video's segment count.
std::vector<std::vector<ScoreVector>> align_scores(const Dataset& dataset,
                                                   const ScoreTable& scores);

// Ground-truth intervals of every annotation in dataset order.
std::vector<KeyedInterval> annotation_intervals(const Dataset& dataset);

PipelineResult run_pipeline(const Dataset& dataset, const ScoreTable& scores,
                            const PipelineConfig& cfg);

struct SweepRow {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> recalls;  // aligned with SweepTable::thresholds
  double mean_interval_seconds = 0.0;
  double mean_interval_segments = 0.0;
};

struct SweepTable {
  std::vector<double> thresholds;
  std::vector<SweepRow> rows;  // alpha outer, beta inner
  std::size_t best = 0;        // highest recall at thresholds[0], then [1], ...
};

// Evaluates the refined pipeline over the Cartesian product of the grids.
// `base` supplies spread mode, use_prior, thresholds and jobs. Without the
// prior every beta in the grid yields the same row.
SweepTable sweep(const Dataset& dataset, const ScoreTable& scores,
                 std::span<const double> alpha_grid,
                 std::span<const double> beta_grid,
                 const PipelineConfig& base);

}  // namespace bayesloc

#endif  // BAYESLOC_PIPELINE_HPP_
