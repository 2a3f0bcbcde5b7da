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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bayesloc/evaluation.hpp"
#include "bayesloc/extraction.hpp"
#include "bayesloc/ground_truth.hpp"
#include "bayesloc/pipeline.hpp"
#include "bayesloc/prior.hpp"
#include "bayesloc/scorer.hpp"
#include "bayesloc/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using namespace bayesloc;
namespace fs = std::filesystem;

// Pinned tolerances and budgets.
constexpr double kEventVectorSeconds = 10.0;
constexpr double kExtractionSeconds = 30.0;
constexpr double kFailureModeSeconds = 5.0;
constexpr double kPosteriorArgmaxTol = 1e-12;
constexpr double kSigmaRatioTol = 1e-9;
constexpr double kIouTol = 1e-12;
constexpr double kGradTol = 1e-4;
constexpr double kGradEpsilon = 1e-5;
constexpr int kTrainEpochs = 500;
constexpr double kTrainLearningRate = 0.5;

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Verdict()>& body,
               double budget_seconds = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_seconds > 0.0 && secs >= budget_seconds) {
    v.pass = false;
    v.detail += " (over budget " + std::to_string(budget_seconds) + " s)";
  }
  char timing[32];
  std::snprintf(timing, sizeof(timing), "%.2fs", secs);
  std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << name << " (" << timing << ") "
            << v.detail << std::endl;
  if (!v.pass) ++failures;
}

Verdict event_vectors() {
  SynthConfig cfg;
  cfg.num_videos = 1000;
  cfg.repeat_probability = 0.5;
  cfg.feature_dim = 1;
  cfg.seed = 2024;
  const auto data = generate_scenario(cfg);
  std::size_t bits = 0, mismatched = 0, queries = 0;
  for (const auto& v : data.videos) {
    const auto fast = build_event_vectors(v.queries, v.meta);
    std::vector<SegmentInterval> spans;
    for (const auto& q : v.queries) spans.push_back(annotation_to_segment_span(q, v.meta));
    const std::vector<QueryAnnotation> qs(v.queries.begin(), v.queries.end());
    for (std::size_t j = 1; j <= qs.size(); ++j) {
      const auto slow = oracle::event_vector(qs, spans, static_cast<int>(j), segment_count(v.meta));
      for (std::size_t k = 0; k < slow.size(); ++k) mismatched += fast[j - 1][k] != slow[k];
      bits += slow.size();
      ++queries;
    }
  }
  return {mismatched == 0, std::to_string(queries) + " queries, " + std::to_string(bits) +
                               " bits, " + std::to_string(mismatched) + " mismatched"};
}

Verdict extraction() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t mismatched = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 512)(rng);
    std::vector<double> p(n);
    const int style = trial % 3;
    for (double& v : p) {
      v = unit(rng);
      if (style == 1) v = std::round(v * 5.0) / 5.0;
      if (style == 2) v = v < 0.85 ? 0.0 : 1.0;
    }
    const double alpha = std::uniform_real_distribution<double>(1.0, 99.0)(rng);
    const auto got = extract_segment(p, ExtractionConfig{alpha});
    const auto want = oracle::maximal_interval(p, oracle::nearest_rank(p, alpha));
    mismatched += !(got == want);
  }
  return {mismatched == 0, "10000 vectors, " + std::to_string(mismatched) + " mismatched"};
}

Verdict posterior() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_argmax = 0.0, worst_ratio = 0.0;
  std::size_t increases = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const int s = std::uniform_int_distribution<int>(1, 512)(rng);
    const int m = std::uniform_int_distribution<int>(1, 8)(rng);
    const int j = std::uniform_int_distribution<int>(1, m)(rng);
    PriorConfig cfg;
    cfg.beta = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
    std::vector<double> p(s);
    for (double& v : p) v = unit(rng);
    const auto q = gaussian_prior(j, m, s, cfg);
    const auto out = apply_posterior(p, q);
    const auto k = std::max_element(q.begin(), q.end()) - q.begin();
    worst_argmax = std::max(worst_argmax, std::abs(out[k] - p[k]));
    for (int i = 0; i < s; ++i) increases += out[i] > p[i];

    const double mu = static_cast<double>(j) * s / m;
    const double sigma = cfg.sigma(s);
    const double at_mu = prior_density(mu, j, m, s, cfg);
    for (const double x : {mu - sigma, mu + sigma}) {
      worst_ratio = std::max(worst_ratio,
                             std::abs(prior_density(x, j, m, s, cfg) / at_mu - std::exp(-0.5)));
    }
  }
  std::ostringstream d;
  d << "max |out-p| at argmax q " << worst_argmax << ", increases " << increases
    << ", max ratio error " << worst_ratio;
  return {worst_argmax <= kPosteriorArgmaxTol && increases == 0 && worst_ratio <= kSigmaRatioTol,
          d.str()};
}

Verdict analytic_cases() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* what) {
    if (!ok) failed.emplace_back(what);
  };
  const ExtractionConfig a50{50}, a76{76}, a85{85}, a95{95};
  check(percentile_threshold(std::vector<double>{0.1, 0.1, 0.2, 0.8, 0.9}, 50) == 0.2,
        "percentile nearest rank");
  check(percentile_threshold(std::vector<double>(7, 0.3), 85) == 0.3, "percentile constant");
  check(percentile_threshold(std::vector<double>{0.2, 0.7, 0.4}, 99.999) == 0.7,
        "percentile top rank");
  check(extract_segment(std::vector<double>{0.1, 0.2, 0.9, 0.8, 0.1}, a50) ==
            SegmentInterval{2, 4},
        "extract hand trace");
  check(extract_segment(std::vector<double>{0, 0, 1, 0}, a76) == SegmentInterval{3, 3},
        "extract one-hot");
  check(extract_segment(std::vector<double>(9, 0.4), a85) == SegmentInterval{1, 9},
        "extract constant");
  const auto meta = testing::meta_with_segments(12);
  std::vector<ScoreVector> one_hot{ScoreVector(12, 0.0)};
  one_hot[0][6] = 1.0;
  const auto pred = predict_intervals(one_hot, meta, a95);
  const auto secs = segment_to_interval_seconds({7, 7}, meta);
  check(pred.size() == 1 && pred[0].start_s == secs.first && pred[0].end_s == secs.second,
        "predict one-hot seconds");
  check(predict_intervals(std::vector<ScoreVector>{}, meta, a85).empty(), "predict empty");

  check(std::abs(iou({0, 10}, {5, 15}) - 1.0 / 3.0) <= kIouTol, "iou overlap");
  check(iou({1, 4}, {1, 4}) == 1.0, "iou identical");
  check(iou({0, 1}, {2, 3}) == 0.0, "iou disjoint");
  const std::vector<KeyedInterval> truth{{{"v", "a"}, {0, 10}}, {{"v", "b"}, {0, 10}}};
  check(recall_at_1(truth, truth).recalls == std::vector<double>{1.0, 1.0}, "recall perfect");
  const std::vector<KeyedInterval> pred2{{{"v", "a"}, {0, 4}}, {{"v", "b"}, {0, 6}}};
  const auto r = recall_at_1(pred2, truth);
  check(r.recall(0.3) == 1.0 && r.recall(0.5) == 0.5, "recall counting");

  std::string detail = "17 cases";
  for (const auto& f : failed) detail += "; failed: " + f;
  return {failed.empty(), detail};
}

Verdict failure_mode() {
  SynthConfig cfg;
  cfg.num_videos = 16;
  cfg.repeat_probability = 1.0;
  cfg.steps_per_video = {2, 4};
  cfg.align_to_prior = true;
  const auto data = generate_scenario(cfg);
  const auto scores = oracle_scores(data.videos, 0.0, cfg.seed);
  PipelineConfig pc;
  pc.use_prior = false;
  const auto base = run_pipeline(data.videos, scores, pc);
  pc.use_prior = true;
  const auto refined = run_pipeline(data.videos, scores, pc);

  std::size_t row = 0, identical = 0, ordered = 0, groups = 0;
  for (const auto& v : data.videos) {
    const auto k = v.queries.size();
    bool same = true;
    for (std::size_t i = 1; i < k; ++i) {
      same = same && base.predictions[row + i].interval.segments ==
                         base.predictions[row].interval.segments;
    }
    const auto order = temporal_order(v.queries);
    std::vector<SegmentInterval> by_rank(k);
    for (std::size_t i = 0; i < k; ++i) {
      by_rank[order[i] - 1] = refined.predictions[row + i].interval.segments;
    }
    bool increasing = true;
    for (std::size_t i = 1; i < k; ++i) {
      increasing = increasing && by_rank[i - 1].end_segment < by_rank[i].start_segment;
    }
    identical += same;
    ordered += increasing;
    ++groups;
    row += k;
  }
  const double rb = base.eval.recall(0.3), rp = refined.eval.recall(0.3);
  std::ostringstream d;
  d << groups << " repeated-text videos: baseline identical " << identical << ", prior ordered "
    << ordered << ", recall@0.3 " << 100 * rb << "% -> " << 100 * rp << "%";
  return {identical == groups && ordered == groups && rp > rb, d.str()};
}

Verdict gradients() {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (std::uint64_t m = 0; m < 20; ++m) {
    ScorerConfig cfg;
    cfg.feature_dim = 4;
    cfg.hidden_dim = 3;
    cfg.seed = 1000 + m;
    const auto model = ScorerModel::initialize(cfg);
    TrainingSample s;
    s.features = FeatureMatrix(5, 4);
    for (int k = 0; k < 5; ++k) {
      for (int c = 0; c < 4; ++c) s.features.row(k)[c] = normal(rng);
      s.target.push_back(static_cast<double>(rng() % 2));
    }
    s.query = query_embedding("query " + std::to_string(m), 4);
    worst = std::max(worst, grad_check(model, s, kGradEpsilon));
  }
  std::ostringstream d;
  d << "20 models, max relative error " << worst;
  return {worst <= kGradTol, d.str()};
}

Verdict training() {
  const auto data = testing::separable_fixture();
  ScorerConfig cfg;
  cfg.feature_dim = 4;
  cfg.hidden_dim = 8;
  cfg.learning_rate = kTrainLearningRate;
  cfg.epochs = kTrainEpochs;
  cfg.seed = 1;
  const auto a = train(data, cfg);
  const auto b = train(data, cfg, 4);
  const double target = 0.1 * std::log(2.0);
  std::ostringstream d;
  d << "loss " << a.loss_curve.front() << " -> " << a.loss_curve.back() << " (target < "
    << target << "), curves identical: " << (a.loss_curve == b.loss_curve ? "yes" : "no");
  return {a.loss_curve.back() < target && a.loss_curve == b.loss_curve, d.str()};
}

Verdict end_to_end() {
  const std::string cli = BAYESLOC_CLI_PATH;
  const std::vector<std::string> steps{
      "synth --videos 6 --feature-range 64 400 --feature-dim 8 --seed 11",
      "train --annotations annotations.jsonl --features features.jsonl --hidden 8 "
      "--epochs 20 --lr 0.2 --seed 11 --jobs 2",
      "run --annotations annotations.jsonl --scores scores.jsonl --jobs 2",
      "sweep --annotations annotations.jsonl --scores scores.jsonl --alphas 50,85,95 "
      "--betas 0.05,0.1 --jobs 3",
  };
  testing::TempDir a("accept"), b("accept");
  for (const auto* dir : {&a, &b}) {
    for (const auto& step : steps) {
      const std::string cmd = "cd '" + dir->path().string() + "' && '" + cli + "' " + step +
                              " > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + step};
    }
  }
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(a.path())) {
    const auto name = entry.path().filename().string();
    ++files;
    differing += testing::slurp(a / name) != testing::slurp(b / name);
  }
  return {files == 8 && differing == 0,
          std::to_string(files) + " files compared, " + std::to_string(differing) + " differ"};
}

Verdict alpha_monotonicity() {
  const auto data = generate_scenario(SynthConfig{});
  const auto scores = oracle_scores(data.videos, 0.1, 42);
  const auto aligned = align_scores(data.videos, scores);
  std::vector<std::vector<ScoreVector>> refined;
  for (std::size_t v = 0; v < data.videos.size(); ++v) {
    refined.push_back(refine_video(aligned[v], data.videos[v].queries, PriorConfig{}));
  }
  double prev = INFINITY;
  std::size_t violations = 0, steps = 0;
  std::ostringstream d;
  for (double alpha = 1.0; alpha < 100.0; alpha += 1.0) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t v = 0; v < refined.size(); ++v) {
      for (const auto& p : predict_intervals(refined[v], data.videos[v].meta, ExtractionConfig{alpha})) {
        total += p.end_s - p.start_s;
        ++count;
      }
    }
    const double mean = total / static_cast<double>(count);
    violations += mean > prev;
    prev = mean;
    ++steps;
    if (alpha == 1.0 || alpha == 50.0 || alpha == 99.0) d << "alpha " << alpha << ": " << mean << " s; ";
  }
  d << steps << " alphas, " << violations << " increases";
  return {violations == 0, d.str()};
}

}  // namespace

int main() {
  criterion("event-vector oracle equivalence on 1000 synthetic videos", event_vectors,
            kEventVectorSeconds);
  criterion("extraction oracle equivalence on 10000 score vectors", extraction,
            kExtractionSeconds);
  criterion("posterior identities", posterior);
  criterion("percentile and IoU analytic cases", analytic_cases);
  criterion("failure mode: prior separates repeated queries", failure_mode,
            kFailureModeSeconds);
  criterion("gradient check on 20 random small models", gradients);
  criterion("training sanity on the separable fixture", training);
  criterion("end-to-end determinism synth -> train -> run -> sweep", end_to_end);
  criterion("mean interval length non-increasing in alpha", alpha_monotonicity);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
