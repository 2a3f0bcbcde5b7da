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

#ifndef BAYESLOC_EVALUATION_HPP_
#define BAYESLOC_EVALUATION_HPP_

#include <compare>
#include <span>
#include <string>
#include <vector>

namespace bayesloc {

// Identifies one annotation across a dataset.
struct QueryKey {
  std::string video_id;
  std::string query_id;

  auto operator<=>(const QueryKey&) const = default;
  bool operator==(const QueryKey&) const = default;
};

std::string to_string(const QueryKey& key);

// Closed time interval in seconds.
struct TimeInterval {
  double start = 0.0;
  double end = 0.0;
};

struct KeyedInterval {
  QueryKey key;
  TimeInterval interval;
};

// Temporal intersection over union. Two equal degenerate intervals score 1.
double iou(const TimeInterval& a, const TimeInterval& b);

struct QueryEval {
  QueryKey key;
  double iou = 0.0;
  std::vector<bool> hits;  // one flag per threshold
};

struct EvalResult {
  std::vector<double> thresholds;
  std::vector<double> recalls;      // fractions, aligned with thresholds
  std::vector<QueryEval> per_query;  // sorted by key

  std::size_t count() const { return per_query.size(); }
  // Recall at a threshold that was evaluated. Throws RangeError otherwise.
  double recall(double threshold) const;
};

inline const std::vector<double> kDefaultThresholds{0.3, 0.5};

// Recall@1: the fraction of queries whose single prediction reaches IoU >= t
// against the query's own annotated span. Predictions and annotations must
// cover the same keys.
EvalResult recall_at_1(std::span<const KeyedInterval> predictions,
                       std::span<const KeyedInterval> annotations,
                       std::span<const double> thresholds = kDefaultThresholds);

}  // namespace bayesloc

#endif  // BAYESLOC_EVALUATION_HPP_
