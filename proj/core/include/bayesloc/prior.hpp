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

#ifndef BAYESLOC_PRIOR_HPP_
#define BAYESLOC_PRIOR_HPP_

// Temporal-order prior and posterior rescaling.
//
// Annotation j of a video with m annotations and S_i segments is expected
// near segment mu = j * S_i / m. The prior is a normal density over the
// segment index with spread S_i * beta, and the refined score is
//
//   p'^k = p^k * q^k / max_k(q^k).

#include <span>
#include <vector>

#include "bayesloc/ground_truth.hpp"

namespace bayesloc {

// Per-segment probabilities in [0, 1].
using ScoreVector = std::vector<double>;

struct PriorConfig {
  double beta = 0.1;
  // When true the spread S_i * beta is the standard deviation, otherwise
  // it is the variance.
  bool spread_is_std = true;

  void validate() const;
  double sigma(int num_segments) const;
};

// Throws ValidationError if `p` is empty or has an entry outside [0, 1].
void validate_scores(std::span<const double> p);

// Prior density at a (possibly fractional) segment position.
double prior_density(double k, int j, int m, int num_segments,
                     const PriorConfig& cfg);

// q^k = N(k; j * S_i / m, sigma) for k = 1..S_i (index 0 holds k = 1).
std::vector<double> gaussian_prior(int j, int m, int num_segments,
                                   const PriorConfig& cfg);

// out^k = p^k * q^k / max(q).
ScoreVector apply_posterior(std::span<const double> p,
                            std::span<const double> q);

// 1-based rank of each annotation in temporal order (start, then end,
// then text, then id), index-aligned with `queries`.
std::vector<int> temporal_order(std::span<const QueryAnnotation> queries);

// Applies the prior for each annotation of one video. `scores` is
// index-aligned with `queries`; all vectors must share one length S_i.
std::vector<ScoreVector> refine_video(std::span<const ScoreVector> scores,
                                      std::span<const QueryAnnotation> queries,
                                      const PriorConfig& cfg);

}  // namespace bayesloc

#endif  // BAYESLOC_PRIOR_HPP_
