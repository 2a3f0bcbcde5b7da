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

#include "bayesloc/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "bayesloc/errors.hpp"

namespace bayesloc {
namespace {

constexpr std::array<const char*, 12> kVerbs = {
    "roll out", "cut", "stir", "pour", "knead", "wash",
    "peel", "fry", "mix", "season", "chop", "bake"};
constexpr std::array<const char*, 10> kObjects = {
    "the dough", "the onion", "the soup", "the flour", "the tomato",
    "the rice", "the batter", "the garlic", "the pan", "the carrots"};

constexpr std::uint64_t kOracleSalt = 0x6f7261636c65ULL;
constexpr const char* kBackgroundText = "<background>";

std::string fresh_text(std::mt19937_64& rng, const std::set<std::string>& used) {
  std::uniform_int_distribution<std::size_t> verb(0, kVerbs.size() - 1);
  std::uniform_int_distribution<std::size_t> object(0, kObjects.size() - 1);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::string text = std::string(kVerbs[verb(rng)]) + " " + kObjects[object(rng)];
    if (!used.contains(text)) return text;
  }
  // Vocabulary exhausted for this video.
  return "step " + std::to_string(used.size() + 1);
}

// Random-gap placement: 2k + 1 pieces (gap, step, gap, ..., step, gap) with
// steps and inner gaps at least one segment long.
std::vector<SegmentInterval> place_random(int num_segments, int k,
                                          std::mt19937_64& rng) {
  const int pieces = 2 * k + 1;
  std::vector<int> length(static_cast<std::size_t>(pieces), 1);
  length.front() = 0;
  length.back() = 0;
  int free_slots = num_segments - (2 * k - 1);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weight(static_cast<std::size_t>(pieces));
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    // Odd pieces are steps; give them more room than gaps on average.
    weight[i] = unit(rng) * (i % 2 == 1 ? 2.0 : 1.0);
    total += weight[i];
  }
  int assigned = 0;
  for (int i = 0; i < pieces; ++i) {
    const int extra = static_cast<int>(std::floor(free_slots * weight[i] / total));
    length[i] += extra;
    assigned += extra;
  }
  for (int i = 0; assigned < free_slots; i = (i + 1) % pieces, ++assigned) {
    ++length[i];
  }

  std::vector<SegmentInterval> spans;
  int cursor = 1;
  for (int i = 0; i < pieces; ++i) {
    if (i % 2 == 1) spans.push_back({cursor, cursor + length[i] - 1});
    cursor += length[i];
  }
  return spans;
}

// Occurrence j occupies the tail of slot j, ending at round(j * S_i / k),
// with a leading gap inside the slot.
std::vector<SegmentInterval> place_aligned(int num_segments, int k,
                                           std::mt19937_64& rng) {
  std::vector<SegmentInterval> spans;
  std::uniform_real_distribution<double> fraction(0.5, 0.8);
  for (int j = 1; j <= k; ++j) {
    const int slot_start =
        static_cast<int>(std::lround(static_cast<double>(j - 1) * num_segments / k)) + 1;
    const int slot_end =
        static_cast<int>(std::lround(static_cast<double>(j) * num_segments / k));
    const int slot = slot_end - slot_start + 1;
    const int len = std::clamp(static_cast<int>(std::lround(fraction(rng) * slot)),
                               1, slot - 1);
    spans.push_back({slot_end - len + 1, slot_end});
  }
  return spans;
}

VideoRecord generate_video(const SynthConfig& cfg, int index,
                           FeatureMatrix& features) {
  std::mt19937_64 rng(split_seed(cfg.seed, static_cast<std::uint64_t>(index)));

  std::uniform_int_distribution<int> n_dist(cfg.feature_range.first,
                                            cfg.feature_range.second);
  std::uniform_int_distribution<int> rem_dist(0, cfg.feature_stride - 1);
  std::uniform_int_distribution<int> k_dist(cfg.steps_per_video.first,
                                            cfg.steps_per_video.second);

  char id[32];
  std::snprintf(id, sizeof(id), "synth_%04d", index);
  VideoRecord video;
  video.meta.video_id = id;
  const int n = n_dist(rng);
  video.meta.num_frames =
      static_cast<std::int64_t>(n) * cfg.feature_stride + rem_dist(rng);
  video.meta.fps = cfg.fps;
  video.meta.feature_stride = cfg.feature_stride;
  video.meta.max_segments = cfg.max_segments;
  const int num_segments = segment_count(video.meta);

  const int k = k_dist(rng);
  std::vector<std::string> texts;
  std::set<std::string> used;
  std::bernoulli_distribution repeat(cfg.repeat_probability);
  for (int t = 0; t < k; ++t) {
    if (t > 0 && repeat(rng)) {
      std::uniform_int_distribution<int> pick(0, t - 1);
      texts.push_back(texts[pick(rng)]);
    } else {
      texts.push_back(fresh_text(rng, used));
      used.insert(texts.back());
    }
  }

  const auto spans = cfg.align_to_prior ? place_aligned(num_segments, k, rng)
                                        : place_random(num_segments, k, rng);
  for (int t = 0; t < k; ++t) {
    const auto [start, end] = segment_to_interval_seconds(spans[t], video.meta);
    char qid[16];
    std::snprintf(qid, sizeof(qid), "q%03d", t + 1);
    video.queries.push_back({qid, texts[t], start, end});
  }

  // Per-segment prototype, then per-clip noise. Clip r belongs to the
  // pooling chunk that contains it.
  const auto d = static_cast<std::size_t>(cfg.feature_dim);
  std::vector<std::vector<double>> proto(
      static_cast<std::size_t>(num_segments),
      query_embedding(kBackgroundText, cfg.feature_dim));
  for (int t = 0; t < k; ++t) {
    const auto emb = query_embedding(texts[t], cfg.feature_dim);
    for (int s = spans[t].start_segment; s <= spans[t].end_segment; ++s) {
      proto[s - 1] = emb;
    }
  }
  const auto rows = static_cast<std::size_t>(n);
  const auto bounds = chunk_boundaries(rows, static_cast<std::size_t>(num_segments));
  features = FeatureMatrix(rows, d);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::size_t segment = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (r >= bounds[segment + 1]) ++segment;
    auto row = features.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      row[c] = proto[segment][c] + cfg.feature_noise * noise(rng);
    }
  }

  if (cfg.shuffle_file_order) {
    std::shuffle(video.queries.begin(), video.queries.end(), rng);
  }
  return video;
}

}  // namespace

void SynthConfig::validate() const {
  std::ostringstream err;
  const auto bad_range = [](const std::pair<int, int>& r) {
    return r.first > r.second;
  };
  if (num_videos < 1) {
    err << "num_videos must be >= 1 (got " << num_videos << ")";
  } else if (bad_range(feature_range) || feature_range.first < 1) {
    err << "feature_range must satisfy 1 <= min <= max (got ["
        << feature_range.first << ", " << feature_range.second << "])";
  } else if (bad_range(steps_per_video) || steps_per_video.first < 1) {
    err << "steps_per_video must satisfy 1 <= min <= max (got ["
        << steps_per_video.first << ", " << steps_per_video.second << "])";
  } else if (!(repeat_probability >= 0.0 && repeat_probability <= 1.0)) {
    err << "repeat_probability must lie in [0, 1] (got " << repeat_probability
        << ")";
  } else if (!(noise_sigma >= 0.0) || !(feature_noise >= 0.0)) {
    err << "noise levels must be >= 0";
  } else if (feature_dim < 1) {
    err << "feature_dim must be >= 1";
  } else if (!(fps > 0.0) || feature_stride < 1 || max_segments < 1) {
    err << "fps, feature_stride and max_segments must be positive";
  } else {
    const int min_segments = std::min(feature_range.first, max_segments);
    const int k = steps_per_video.second;
    const int needed = align_to_prior ? 2 * k : 2 * k - 1;
    if (min_segments >= needed) return;
    err << "steps_per_video max " << k << " needs at least " << needed
        << " segments per video, but feature_range min " << feature_range.first
        << " with max_segments " << max_segments << " allows only "
        << min_segments;
  }
  throw GenerationError("synth config: " + err.str());
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over (seed, stream).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SynthDataset generate_scenario(const SynthConfig& cfg) {
  cfg.validate();
  SynthDataset out;
  out.videos.reserve(static_cast<std::size_t>(cfg.num_videos));
  for (int v = 0; v < cfg.num_videos; ++v) {
    FeatureMatrix features;
    out.videos.push_back(generate_video(cfg, v, features));
    out.features.emplace(out.videos.back().meta.video_id, std::move(features));
  }
  return out;
}

ScoreTable oracle_scores(const Dataset& dataset, double noise_sigma,
                         std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
  ScoreTable table;
  for (std::size_t v = 0; v < dataset.size(); ++v) {
    const auto& video = dataset[v];
    std::mt19937_64 rng(split_seed(seed ^ kOracleSalt, v));
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto events = build_event_vectors(video.queries, video.meta);
    for (std::size_t i = 0; i < video.queries.size(); ++i) {
      ScoreVector scores(events[i].begin(), events[i].end());
      if (noise_sigma > 0.0) {
        for (double& s : scores) s = std::clamp(s + noise_sigma * noise(rng), 0.0, 1.0);
      }
      table.emplace(QueryKey{video.meta.video_id, video.queries[i].query_id},
                    std::move(scores));
    }
  }
  return table;
}

}  // namespace bayesloc
