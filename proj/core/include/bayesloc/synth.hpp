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

#ifndef BAYESLOC_SYNTH_HPP_
#define BAYESLOC_SYNTH_HPP_

// Deterministic cyclic procedural-activity scenarios.
//
// Each video is a left-to-right sequence of step occurrences separated by
// background gaps. A step may reuse the text of an earlier step in the same
// video, producing the repeated ("cyclic") annotations that a single
// argmax cannot tell apart. Clip features are the step's text embedding
// plus isotropic noise inside a step span and a background prototype plus
// noise elsewhere.
//
// Seed splitting: video v is generated from its own stream seeded with
// split_seed(seed, v), so videos are independent of generation order.

#include <cstdint>
#include <utility>

#include "bayesloc/pipeline.hpp"
#include "bayesloc/scorer.hpp"

namespace bayesloc {

struct SynthConfig {
  int num_videos = 32;
  // Range of clip-feature counts n_i; S_i = min(n_i, max_segments), so the
  // default range covers both the identity and the pooling path.
  std::pair<int, int> feature_range{64, 1024};
  int max_segments = kDefaultMaxSegments;
  std::pair<int, int> steps_per_video{2, 8};
  double repeat_probability = 0.3;
  double noise_sigma = 0.1;    // oracle score noise
  double feature_noise = 0.5;  // clip feature noise
  int feature_dim = 16;
  double fps = kDefaultFps;
  int feature_stride = kDefaultFeatureStride;
  std::uint64_t seed = 42;
  // Place occurrence j of k so that it ends at segment round(j * S_i / k).
  bool align_to_prior = false;
  // Permute annotation order within each video record.
  bool shuffle_file_order = false;

  // Throws GenerationError naming the violated bound.
  void validate() const;
};

struct SynthDataset {
  Dataset videos;
  FeatureTable features;
};

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

SynthDataset generate_scenario(const SynthConfig& cfg);

// clamp(event vector + N(0, noise_sigma), 0, 1) for every annotation.
ScoreTable oracle_scores(const Dataset& dataset, double noise_sigma,
                         std::uint64_t seed);

}  // namespace bayesloc

#endif  // BAYESLOC_SYNTH_HPP_
