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

#ifndef BAYESLOC_SCORER_HPP_
#define BAYESLOC_SCORER_HPP_

// Minimal trainable per-segment scorer.
//
// Each segment feature is concatenated with the query embedding, projected
// linearly to H units, and fed through a single forward GRU cell
//
//   z = sigmoid(Wz x + Uz h + bz)          update gate
//   r = sigmoid(Wr x + Ur h + br)          reset gate
//   c = tanh(Wc x + Uc (r * h) + bc)       candidate
//   h' = (1 - z) * h + z * c
//
// followed by a logistic readout y = sigmoid(w . h' + b). The output at
// segment k depends only on segments 1..k. Training minimises the mean
// binary cross entropy against event vectors with full-batch gradient
// descent; gradients are computed by hand-written backpropagation through
// time.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bayesloc/ground_truth.hpp"
#include "bayesloc/pipeline.hpp"
#include "bayesloc/prior.hpp"
#include "bayesloc/video.hpp"

namespace bayesloc {

struct ScorerConfig {
  int feature_dim = 16;
  int hidden_dim = 32;
  double learning_rate = 0.01;
  int epochs = 200;
  std::uint64_t seed = 0;

  void validate() const;
};

// Named slice of the flat parameter vector; weights are row-major.
struct ParameterBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
};

struct TrainingSample {
  FeatureMatrix features;         // S_i x d, already downsampled
  std::vector<double> query;      // d
  std::vector<double> target;     // event vector as 0/1 doubles
};

class ScorerModel {
 public:
  // All parameters zero: the output is 0.5 everywhere.
  explicit ScorerModel(const ScorerConfig& cfg);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  static ScorerModel initialize(const ScorerConfig& cfg);

  const ScorerConfig& config() const { return config_; }
  const std::vector<ParameterBlock>& layout() const { return layout_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

  // Per-segment probabilities, each strictly inside (0, 1).
  ScoreVector forward(const FeatureMatrix& features,
                      std::span<const double> query) const;

  // bce_loss(forward(sample)) and its gradient with respect to every
  // parameter, accumulated into `grad` scaled by `weight`.
  double loss_and_gradient(const TrainingSample& sample,
                           std::span<double> grad, double weight = 1.0) const;

  bool operator==(const ScorerModel& other) const {
    return params_ == other.params_;
  }

 private:
  ScorerConfig config_;
  std::vector<ParameterBlock> layout_;
  std::vector<double> params_;
};

// Parameter layout for a configuration (names, shapes, offsets).
std::vector<ParameterBlock> scorer_layout(const ScorerConfig& cfg);

inline constexpr double kBceEpsilon = 1e-7;

// Mean over segments of -[p log y + (1 - p) log(1 - y)], y clamped to
// [eps, 1 - eps].
double bce_loss(std::span<const double> p_hat, std::span<const double> p);

struct TrainResult {
  ScorerModel model;
  std::vector<double> loss_curve;  // loss after 0..epochs updates
};

// Full-batch gradient descent on the mean per-sample BCE. Per-sample
// gradients may be computed on `jobs` threads; they are summed in sample
// order, so the result does not depend on `jobs`.
TrainResult train(std::span<const TrainingSample> dataset,
                  const ScorerConfig& cfg, int jobs = 1);

// Central finite differences over every parameter against the analytic
// gradient; returns max |g_a - g_fd| / max(|g_a|, |g_fd|, kGradCheckFloor).
// The floor keeps round-off in the difference quotient (about 1e-11 at
// epsilon 1e-5) from dominating near-zero gradient entries.
inline constexpr double kGradCheckFloor = 1e-6;
double grad_check(const ScorerModel& model, const TrainingSample& sample,
                  double epsilon);

// Deterministic unit vector seeded by a hash of the normalized text.
std::vector<double> query_embedding(std::string_view text, int dim);

// Per-video raw features keyed by video_id (n_i rows each).
using FeatureTable = std::map<std::string, FeatureMatrix>;

// One sample per annotation: downsampled features, text embedding and the
// annotation's event vector.
std::vector<TrainingSample> build_training_set(const Dataset& dataset,
                                               const FeatureTable& features,
                                               int feature_dim);

// Runs the model on every annotation of the dataset.
ScoreTable score_dataset(const ScorerModel& model, const Dataset& dataset,
                         const FeatureTable& features, int jobs = 1);

}  // namespace bayesloc

#endif  // BAYESLOC_SCORER_HPP_
