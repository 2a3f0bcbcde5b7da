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

#include "bayesloc/video.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bayesloc/errors.hpp"

namespace bayesloc {
namespace {

// Absorbs floating-point noise when a time lands exactly on a segment
// boundary (e.g. the start time produced by segment_to_interval_seconds).
constexpr double kBoundaryTolerance = 1e-9;

}  // namespace

void VideoMeta::validate() const {
  std::ostringstream err;
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    err << "fps must be > 0 (got " << fps << ")";
  } else if (feature_stride < 1) {
    err << "feature_stride must be >= 1 (got " << feature_stride << ")";
  } else if (max_segments < 1) {
    err << "max_segments must be >= 1 (got " << max_segments << ")";
  } else if (num_frames < feature_stride) {
    err << "num_frames (" << num_frames << ") must be >= feature_stride ("
        << feature_stride << ")";
  } else {
    return;
  }
  throw ValidationError("video '" + video_id + "': " + err.str());
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t dim,
                             std::vector<double> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (data_.size() != rows * dim) {
    throw ValidationError("feature matrix: expected " +
                          std::to_string(rows * dim) + " values, got " +
                          std::to_string(data_.size()));
  }
}

std::int64_t feature_count(const VideoMeta& meta) {
  meta.validate();
  return meta.num_frames / meta.feature_stride;
}

int segment_count(const VideoMeta& meta) {
  return static_cast<int>(
      std::min<std::int64_t>(feature_count(meta), meta.max_segments));
}

double segment_duration(const VideoMeta& meta) {
  const auto n = static_cast<double>(feature_count(meta));
  const auto s = static_cast<double>(segment_count(meta));
  return meta.feature_stride * n / (s * meta.fps);
}

double segment_position(double t, const VideoMeta& meta) {
  const auto n = static_cast<double>(feature_count(meta));
  const auto s = static_cast<double>(segment_count(meta));
  return t * meta.fps * s / (meta.feature_stride * n);
}

namespace {

void check_time(double t, const VideoMeta& meta) {
  const double duration = meta.duration();
  if (!(t >= 0.0) || t > duration) {
    std::ostringstream err;
    err << "time " << t << " s outside video '" << meta.video_id
        << "' [0, " << duration << "]";
    throw RangeError(err.str());
  }
}

}  // namespace

int time_to_segment(double t, const VideoMeta& meta) {
  check_time(t, meta);
  const int s = segment_count(meta);
  const double k = std::floor(segment_position(t, meta) + kBoundaryTolerance) + 1.0;
  return static_cast<int>(std::clamp(k, 1.0, static_cast<double>(s)));
}

int end_time_to_segment(double t, const VideoMeta& meta) {
  check_time(t, meta);
  const int s = segment_count(meta);
  const double k = std::ceil(segment_position(t, meta) - kBoundaryTolerance);
  return static_cast<int>(std::clamp(k, 1.0, static_cast<double>(s)));
}

void check_segment_interval(const SegmentInterval& seg, const VideoMeta& meta) {
  const int s = segment_count(meta);
  if (seg.start_segment < 1 || seg.start_segment > seg.end_segment ||
      seg.end_segment > s) {
    std::ostringstream err;
    err << "segment interval (" << seg.start_segment << ", " << seg.end_segment
        << ") invalid for video '" << meta.video_id << "' with " << s
        << " segments";
    throw RangeError(err.str());
  }
}

std::pair<double, double> segment_to_interval_seconds(
    const SegmentInterval& seg, const VideoMeta& meta) {
  check_segment_interval(seg, meta);
  const double dur = segment_duration(meta);
  const double start = (seg.start_segment - 1) * dur;
  const double end = seg.end_segment == segment_count(meta)
                         ? meta.duration()
                         : seg.end_segment * dur;
  return {start, end};
}

std::vector<std::size_t> chunk_boundaries(std::size_t num_rows,
                                          std::size_t num_chunks) {
  std::vector<std::size_t> bounds(num_chunks + 1);
  for (std::size_t k = 0; k <= num_chunks; ++k) {
    // floor(k * n / S + 1/2) in exact integer arithmetic.
    bounds[k] = (2 * k * num_rows + num_chunks) / (2 * num_chunks);
  }
  return bounds;
}

FeatureMatrix downsample_features(const FeatureMatrix& feats,
                                  const VideoMeta& meta) {
  const auto n = static_cast<std::size_t>(feature_count(meta));
  if (feats.rows() != n) {
    throw ValidationError("video '" + meta.video_id + "': feature matrix has " +
                          std::to_string(feats.rows()) + " rows, expected " +
                          std::to_string(n));
  }
  if (feats.rows() == 0 || feats.dim() == 0) {
    throw ValidationError("video '" + meta.video_id + "': empty feature matrix");
  }
  const auto s = static_cast<std::size_t>(segment_count(meta));
  if (n <= s) return feats;

  const auto bounds = chunk_boundaries(n, s);
  FeatureMatrix out(s, feats.dim());
  for (std::size_t k = 0; k < s; ++k) {
    auto dst = out.row(k);
    const std::size_t begin = bounds[k];
    const std::size_t end = bounds[k + 1];
    for (std::size_t r = begin; r < end; ++r) {
      const auto src = feats.row(r);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
    }
    const auto count = static_cast<double>(end - begin);
    for (double& v : dst) v /= count;
  }
  return out;
}

}  // namespace bayesloc
