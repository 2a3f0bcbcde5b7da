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

#ifndef BAYESLOC_VIDEO_HPP_
#define BAYESLOC_VIDEO_HPP_

// Time / frame / feature / segment arithmetic.
//
// A video of N frames at `fps` is described by n = floor(N / stride)
// clip features. Those are compressed into S_i = min(n, S) segments, the
// resolution at which scores and event vectors live. Segment indices are
// 1-based everywhere (k = 1..S_i).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bayesloc {

inline constexpr double kDefaultFps = 30.0;
inline constexpr int kDefaultFeatureStride = 16;
inline constexpr int kDefaultMaxSegments = 512;

struct VideoMeta {
  std::string video_id;
  std::int64_t num_frames = 0;
  double fps = kDefaultFps;
  int feature_stride = kDefaultFeatureStride;
  int max_segments = kDefaultMaxSegments;

  // Throws ValidationError if any invariant is broken.
  void validate() const;

  double duration() const { return static_cast<double>(num_frames) / fps; }
};

// Inclusive, 1-based pair of segment indices.
struct SegmentInterval {
  int start_segment = 1;
  int end_segment = 1;

  int length() const { return end_segment - start_segment + 1; }
  bool operator==(const SegmentInterval&) const = default;
};

// Row-major matrix of per-clip feature vectors.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t dim);
  FeatureMatrix(std::size_t rows, std::size_t dim, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * dim_, dim_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * dim_, dim_};
  }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// n_i = floor(num_frames / feature_stride).
std::int64_t feature_count(const VideoMeta& meta);

// S_i = min(n_i, max_segments).
int segment_count(const VideoMeta& meta);

// Duration of one segment in seconds. The last segment additionally absorbs
// the frames left over by the floor in feature_count.
double segment_duration(const VideoMeta& meta);

// Continuous position of time t in segment units (0 at the video start).
double segment_position(double t, const VideoMeta& meta);

// Segment containing time t, clamped to [1, S_i]. Throws RangeError when t
// lies outside [0, duration].
int time_to_segment(double t, const VideoMeta& meta);

// Last segment whose span starts strictly before t; the limit of
// time_to_segment(t - eps) as eps -> 0+. Used for exclusive end times.
int end_time_to_segment(double t, const VideoMeta& meta);

// Time span (seconds) covered by segments [k_s, k_e]. The last segment ends
// at the video duration.
std::pair<double, double> segment_to_interval_seconds(
    const SegmentInterval& seg, const VideoMeta& meta);

// Throws RangeError unless 1 <= k_s <= k_e <= S_i.
void check_segment_interval(const SegmentInterval& seg, const VideoMeta& meta);

// Chunk boundaries (0-based row offsets, size S_i + 1) used by sparse
// sampling: b_k = round_half_up(k * n_i / S_i).
std::vector<std::size_t> chunk_boundaries(std::size_t num_rows,
                                          std::size_t num_chunks);

// Mean-pools n_i feature rows into S_i uniform chunks. Identity when
// n_i <= max_segments.
FeatureMatrix downsample_features(const FeatureMatrix& feats,
                                  const VideoMeta& meta);

}  // namespace bayesloc

#endif  // BAYESLOC_VIDEO_HPP_
