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

#ifndef BAYESLOC_TESTS_FIXTURES_HPP_
#define BAYESLOC_TESTS_FIXTURES_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "bayesloc/ground_truth.hpp"
#include "bayesloc/scorer.hpp"
#include "bayesloc/video.hpp"

namespace bayesloc::testing {

// A video with exactly `segments` segments, one clip feature per segment.
inline VideoMeta meta_with_segments(int segments, std::string id = "v") {
  VideoMeta meta;
  meta.video_id = std::move(id);
  meta.num_frames = static_cast<std::int64_t>(segments) * kDefaultFeatureStride;
  meta.max_segments = std::max(segments, 1);
  return meta;
}

// Annotation whose times cover exactly the segments of `span`.
inline QueryAnnotation annotation(std::string id, std::string text,
                                  SegmentInterval span, const VideoMeta& meta) {
  const auto [start, end] = segment_to_interval_seconds(span, meta);
  return {std::move(id), std::move(text), start, end};
}

// Targets equal the first feature coordinate, which is 0 or 1; the other
// coordinates are noise. A scorer that reads coordinate 0 fits it exactly.
inline std::vector<TrainingSample> separable_fixture(int feature_dim = 4,
                                                     int samples = 8,
                                                     int segments = 16,
                                                     std::uint64_t seed = 5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<TrainingSample> out;
  for (int i = 0; i < samples; ++i) {
    TrainingSample s;
    s.features = FeatureMatrix(segments, feature_dim);
    s.query.assign(feature_dim, 0.0);
    s.query[i % feature_dim] = 1.0;
    const int start = std::uniform_int_distribution<int>(0, segments - 4)(rng);
    const int len = std::uniform_int_distribution<int>(2, 4)(rng);
    for (int k = 0; k < segments; ++k) {
      const double y = (k >= start && k < start + len) ? 1.0 : 0.0;
      auto row = s.features.row(k);
      row[0] = y;
      for (int c = 1; c < feature_dim; ++c) row[c] = noise(rng);
      s.target.push_back(y);
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("bayesloc_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace bayesloc::testing

#endif  // BAYESLOC_TESTS_FIXTURES_HPP_
