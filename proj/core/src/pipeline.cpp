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

#include "bayesloc/pipeline.hpp"

#include <set>
#include <sstream>

#include "bayesloc/errors.hpp"
#include "bayesloc/parallel.hpp"

namespace bayesloc {

void VideoRecord::validate() const {
  meta.validate();
  std::set<std::string> ids;
  for (const auto& q : queries) {
    q.validate(meta);
    if (!ids.insert(q.query_id).second) {
      throw ValidationError("video '" + meta.video_id +
                            "': duplicate query_id '" + q.query_id + "'");
    }
  }
}

void validate_dataset(const Dataset& dataset) {
  std::set<std::string> ids;
  for (const auto& video : dataset) {
    video.validate();
    if (!ids.insert(video.meta.video_id).second) {
      throw ValidationError("duplicate video_id '" + video.meta.video_id + "'");
    }
  }
}

void PipelineConfig::validate() const {
  extraction.validate();
  prior.validate();
  if (thresholds.empty()) throw ValidationError("no IoU thresholds given");
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
}

double PipelineResult::mean_interval_seconds() const {
  if (predictions.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : predictions) total += p.interval.end_s - p.interval.start_s;
  return total / static_cast<double>(predictions.size());
}

double PipelineResult::mean_interval_segments() const {
  if (predictions.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : predictions) total += p.interval.segments.length();
  return total / static_cast<double>(predictions.size());
}

std::vector<std::vector<ScoreVector>> align_scores(const Dataset& dataset,
                                                   const ScoreTable& scores) {
  std::vector<std::vector<ScoreVector>> out(dataset.size());
  std::vector<QueryKey> missing;
  std::size_t matched = 0;
  for (std::size_t v = 0; v < dataset.size(); ++v) {
    const auto& video = dataset[v];
    const auto num_segments = static_cast<std::size_t>(segment_count(video.meta));
    out[v].reserve(video.queries.size());
    for (const auto& q : video.queries) {
      QueryKey key{video.meta.video_id, q.query_id};
      const auto it = scores.find(key);
      if (it == scores.end()) {
        missing.push_back(std::move(key));
        out[v].emplace_back();
        continue;
      }
      ++matched;
      if (it->second.size() != num_segments) {
        throw ValidationError("scores for " + to_string(key) + " have " +
                              std::to_string(it->second.size()) +
                              " entries, video has " +
                              std::to_string(num_segments) + " segments");
      }
      validate_scores(it->second);
      out[v].push_back(it->second);
    }
  }
  if (!missing.empty() || matched != scores.size()) {
    std::ostringstream err;
    err << "score/annotation key mismatch: " << missing.size()
        << " annotations without scores";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
      err << " " << to_string(missing[i]);
    }
    err << "; " << scores.size() - matched << " scores without annotations";
    throw ValidationError(err.str());
  }
  return out;
}

std::vector<KeyedInterval> annotation_intervals(const Dataset& dataset) {
  std::vector<KeyedInterval> out;
  for (const auto& video : dataset) {
    for (const auto& q : video.queries) {
      out.push_back({{video.meta.video_id, q.query_id}, {q.start_s, q.end_s}});
    }
  }
  return out;
}

namespace {

PipelineResult run_aligned(const Dataset& dataset,
                           const std::vector<std::vector<ScoreVector>>& aligned,
                           const PipelineConfig& cfg, int jobs) {
  std::vector<std::vector<IntervalPrediction>> per_video(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t v) {
    const auto& video = dataset[v];
    if (cfg.use_prior) {
      const auto refined = refine_video(aligned[v], video.queries, cfg.prior);
      per_video[v] = predict_intervals(refined, video.meta, cfg.extraction);
    } else {
      per_video[v] = predict_intervals(aligned[v], video.meta, cfg.extraction);
    }
  });

  PipelineResult result;
  std::vector<KeyedInterval> keyed;
  for (std::size_t v = 0; v < dataset.size(); ++v) {
    const auto& video = dataset[v];
    for (std::size_t i = 0; i < video.queries.size(); ++i) {
      QueryKey key{video.meta.video_id, video.queries[i].query_id};
      const auto& pred = per_video[v][i];
      keyed.push_back({key, {pred.start_s, pred.end_s}});
      result.predictions.push_back({std::move(key), pred});
    }
  }
  const auto truth = annotation_intervals(dataset);
  result.eval = recall_at_1(keyed, truth, cfg.thresholds);
  return result;
}

}  // namespace

PipelineResult run_pipeline(const Dataset& dataset, const ScoreTable& scores,
                            const PipelineConfig& cfg) {
  cfg.validate();
  validate_dataset(dataset);
  const auto aligned = align_scores(dataset, scores);
  return run_aligned(dataset, aligned, cfg, cfg.jobs);
}

SweepTable sweep(const Dataset& dataset, const ScoreTable& scores,
                 std::span<const double> alpha_grid,
                 std::span<const double> beta_grid,
                 const PipelineConfig& base) {
  if (alpha_grid.empty() || beta_grid.empty()) {
    throw ValidationError("sweep grids must be non-empty");
  }
  base.validate();
  validate_dataset(dataset);
  const auto aligned = align_scores(dataset, scores);

  std::vector<PipelineConfig> grid;
  for (const double alpha : alpha_grid) {
    for (const double beta : beta_grid) {
      PipelineConfig cfg = base;
      cfg.extraction.alpha = alpha;
      cfg.prior.beta = beta;
      cfg.validate();
      grid.push_back(cfg);
    }
  }

  SweepTable table;
  table.thresholds = base.thresholds;
  table.rows.resize(grid.size());
  parallel_for(grid.size(), base.jobs, [&](std::size_t r) {
    const auto result = run_aligned(dataset, aligned, grid[r], 1);
    table.rows[r] = {grid[r].extraction.alpha, grid[r].prior.beta,
                     result.eval.recalls, result.mean_interval_seconds(),
                     result.mean_interval_segments()};
  });

  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    if (table.rows[r].recalls > table.rows[table.best].recalls) table.best = r;
  }
  return table;
}

}  // namespace bayesloc
