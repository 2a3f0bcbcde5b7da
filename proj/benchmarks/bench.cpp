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

#include <benchmark/benchmark.h>

#include <random>

#include "bayesloc/extraction.hpp"
#include "bayesloc/ground_truth.hpp"
#include "bayesloc/pipeline.hpp"
#include "bayesloc/prior.hpp"
#include "bayesloc/scorer.hpp"
#include "bayesloc/synth.hpp"

namespace {

using namespace bayesloc;

ScoreVector random_scores(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ScoreVector p(n);
  for (double& v : p) v = unit(rng);
  return p;
}

void BM_ExtractSegment(benchmark::State& state) {
  const auto p = random_scores(static_cast<std::size_t>(state.range(0)), 1);
  const ExtractionConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(extract_segment(p, cfg));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExtractSegment)->Arg(64)->Arg(512);

void BM_Posterior(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const auto p = random_scores(static_cast<std::size_t>(s), 2);
  const PriorConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_posterior(p, gaussian_prior(2, 4, s, cfg)));
  }
}
BENCHMARK(BM_Posterior)->Arg(64)->Arg(512);

void BM_EventVectors(benchmark::State& state) {
  SynthConfig cfg;
  cfg.num_videos = 1;
  cfg.feature_range = {512, 512};
  cfg.steps_per_video = {8, 8};
  cfg.repeat_probability = 0.5;
  cfg.feature_dim = 1;
  const auto data = generate_scenario(cfg);
  const auto& video = data.videos.front();
  for (auto _ : state) benchmark::DoNotOptimize(build_event_vectors(video.queries, video.meta));
}
BENCHMARK(BM_EventVectors);

void BM_RunPipeline(benchmark::State& state) {
  SynthConfig cfg;
  cfg.num_videos = 32;
  cfg.feature_dim = 1;
  const auto data = generate_scenario(cfg);
  const auto scores = oracle_scores(data.videos, 0.1, 42);
  PipelineConfig pc;
  pc.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(data.videos, scores, pc));
}
BENCHMARK(BM_RunPipeline)->Arg(1)->Arg(4)->UseRealTime();

void BM_ScorerForward(benchmark::State& state) {
  ScorerConfig cfg;
  cfg.hidden_dim = static_cast<int>(state.range(0));
  const auto model = ScorerModel::initialize(cfg);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  FeatureMatrix features(512, static_cast<std::size_t>(cfg.feature_dim));
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (double& v : features.row(r)) v = normal(rng);
  }
  const auto query = query_embedding("stir the soup", cfg.feature_dim);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(features, query));
}
BENCHMARK(BM_ScorerForward)->Arg(16)->Arg(32);

void BM_ScorerGradient(benchmark::State& state) {
  ScorerConfig cfg;
  const auto model = ScorerModel::initialize(cfg);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  TrainingSample sample;
  sample.features = FeatureMatrix(512, static_cast<std::size_t>(cfg.feature_dim));
  for (std::size_t r = 0; r < 512; ++r) {
    for (double& v : sample.features.row(r)) v = normal(rng);
    sample.target.push_back(r % 7 == 0 ? 1.0 : 0.0);
  }
  sample.query = query_embedding("stir the soup", cfg.feature_dim);
  std::vector<double> grad(model.parameters().size());
  for (auto _ : state) {
    std::fill(grad.begin(), grad.end(), 0.0);
    benchmark::DoNotOptimize(model.loss_and_gradient(sample, grad));
  }
}
BENCHMARK(BM_ScorerGradient);

}  // namespace

BENCHMARK_MAIN();
