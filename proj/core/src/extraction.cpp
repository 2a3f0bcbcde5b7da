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

#include "bayesloc/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bayesloc/errors.hpp"

namespace bayesloc {

void ExtractionConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 100.0)) {
    std::ostringstream err;
    err << "alpha must lie in (0, 100) (got " << alpha << ")";
    throw ValidationError(err.str());
  }
}

double percentile_threshold(std::span<const double> p, double alpha) {
  if (p.empty()) throw ValidationError("percentile of an empty score vector");
  ExtractionConfig{alpha}.validate();
  std::vector<double> sorted(p.begin(), p.end());
  const auto n = static_cast<double>(sorted.size());
  // alpha * n / 100 keeps integer products exact (85 * 20 / 100 == 17).
  auto rank = static_cast<std::size_t>(std::ceil(alpha * n / 100.0 - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  return sorted[rank - 1];
}

SegmentInterval extract_segment(std::span<const double> p,
                                const ExtractionConfig& cfg) {
  if (p.empty()) throw ValidationError("cannot extract from an empty score vector");
  const double threshold = percentile_threshold(p, cfg.alpha);
  // max_element returns the first maximum.
  const auto seed =
      static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());

  std::size_t lo = seed;
  while (lo > 0 && p[lo - 1] >= threshold) --lo;
  std::size_t hi = seed;
  while (hi + 1 < p.size() && p[hi + 1] >= threshold) ++hi;
  return {static_cast<int>(lo) + 1, static_cast<int>(hi) + 1};
}

std::vector<IntervalPrediction> predict_intervals(
    std::span<const ScoreVector> scores, const VideoMeta& meta,
    const ExtractionConfig& cfg) {
  cfg.validate();
  const auto num_segments = static_cast<std::size_t>(segment_count(meta));
  std::vector<IntervalPrediction> out;
  out.reserve(scores.size());
  for (const auto& p : scores) {
    if (p.size() != num_segments) {
      throw ValidationError("video '" + meta.video_id + "': score vector has " +
                            std::to_string(p.size()) + " entries, expected " +
                            std::to_string(num_segments));
    }
    const auto seg = extract_segment(p, cfg);
    const auto [start, end] = segment_to_interval_seconds(seg, meta);
    out.push_back({seg, start, end});
  }
  return out;
}

}  // namespace bayesloc
