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

#ifndef BAYESLOC_EXTRACTION_HPP_
#define BAYESLOC_EXTRACTION_HPP_

#include <span>
#include <vector>

#include "bayesloc/prior.hpp"
#include "bayesloc/video.hpp"

namespace bayesloc {

struct ExtractionConfig {
  // Percentile level in (0, 100).
  double alpha = 85.0;

  void validate() const;
};

// Nearest-rank percentile: the element at 1-based rank ceil(alpha/100 * n)
// of the ascending-sorted values. Always an element of `p`.
double percentile_threshold(std::span<const double> p, double alpha);

// Seeds at the first argmax of `p` and grows the interval in both directions
// while neighbouring scores stay >= the alpha-percentile threshold.
SegmentInterval extract_segment(std::span<const double> p,
                                const ExtractionConfig& cfg);

struct IntervalPrediction {
  SegmentInterval segments;
  double start_s = 0.0;
  double end_s = 0.0;
};

// One top-1 interval per score vector, converted to seconds.
std::vector<IntervalPrediction> predict_intervals(
    std::span<const ScoreVector> scores, const VideoMeta& meta,
    const ExtractionConfig& cfg);

}  // namespace bayesloc

#endif  // BAYESLOC_EXTRACTION_HPP_
