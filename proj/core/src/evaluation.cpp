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

#include "bayesloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bayesloc/errors.hpp"

namespace bayesloc {
namespace {

void check_interval(const TimeInterval& a) {
  if (!std::isfinite(a.start) || !std::isfinite(a.end) || a.start > a.end) {
    std::ostringstream err;
    err << "malformed interval [" << a.start << ", " << a.end << "]";
    throw ValidationError(err.str());
  }
}

std::map<QueryKey, TimeInterval> index_by_key(
    std::span<const KeyedInterval> items, const char* what) {
  std::map<QueryKey, TimeInterval> out;
  for (const auto& item : items) {
    if (!out.emplace(item.key, item.interval).second) {
      throw ValidationError(std::string("duplicate ") + what + " for " +
                            to_string(item.key));
    }
  }
  return out;
}

void append_keys(std::ostringstream& err, const char* label,
                 const std::vector<QueryKey>& keys) {
  constexpr std::size_t kMaxListed = 20;
  err << " " << label << " (" << keys.size() << "):";
  for (std::size_t i = 0; i < keys.size() && i < kMaxListed; ++i) {
    err << " " << to_string(keys[i]);
  }
  if (keys.size() > kMaxListed) err << " ...";
}

}  // namespace

std::string to_string(const QueryKey& key) {
  return key.video_id + "/" + key.query_id;
}

double iou(const TimeInterval& a, const TimeInterval& b) {
  check_interval(a);
  check_interval(b);
  const double inter =
      std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = (a.end - a.start) + (b.end - b.start) - inter;
  if (uni <= 0.0) {
    // Both degenerate.
    return (a.start == b.start && a.end == b.end) ? 1.0 : 0.0;
  }
  return inter / uni;
}

double EvalResult::recall(double threshold) const {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - threshold) < 1e-12) return recalls[i];
  }
  throw RangeError("threshold " + std::to_string(threshold) + " not evaluated");
}

EvalResult recall_at_1(std::span<const KeyedInterval> predictions,
                       std::span<const KeyedInterval> annotations,
                       std::span<const double> thresholds) {
  for (const double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ValidationError("IoU threshold " + std::to_string(t) +
                            " outside [0, 1]");
    }
  }
  const auto pred = index_by_key(predictions, "prediction");
  const auto gt = index_by_key(annotations, "annotation");

  std::vector<QueryKey> missing;
  std::vector<QueryKey> extra;
  for (const auto& [key, _] : gt) {
    if (!pred.contains(key)) missing.push_back(key);
  }
  for (const auto& [key, _] : pred) {
    if (!gt.contains(key)) extra.push_back(key);
  }
  if (!missing.empty() || !extra.empty()) {
    std::ostringstream err;
    err << "prediction/annotation key mismatch:";
    if (!missing.empty()) append_keys(err, "missing predictions", missing);
    if (!extra.empty()) append_keys(err, "unknown predictions", extra);
    throw ValidationError(err.str());
  }

  EvalResult result;
  result.thresholds.assign(thresholds.begin(), thresholds.end());
  std::vector<std::size_t> hit_counts(thresholds.size(), 0);
  result.per_query.reserve(gt.size());
  for (const auto& [key, truth] : gt) {
    QueryEval q{key, iou(pred.at(key), truth), {}};
    q.hits.reserve(thresholds.size());
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      const bool hit = q.iou >= thresholds[t];
      q.hits.push_back(hit);
      if (hit) ++hit_counts[t];
    }
    result.per_query.push_back(std::move(q));
  }
  result.recalls.reserve(thresholds.size());
  for (const auto hits : hit_counts) {
    result.recalls.push_back(
        gt.empty() ? 0.0
                   : static_cast<double>(hits) / static_cast<double>(gt.size()));
  }
  return result;
}

}  // namespace bayesloc
