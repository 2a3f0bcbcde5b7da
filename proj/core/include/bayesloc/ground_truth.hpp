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

#ifndef BAYESLOC_GROUND_TRUTH_HPP_
#define BAYESLOC_GROUND_TRUTH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bayesloc/video.hpp"

namespace bayesloc {

// One annotated occurrence of a natural-language step.
struct QueryAnnotation {
  std::string query_id;
  std::string text;
  double start_s = 0.0;
  double end_s = 0.0;

  // Requires 0 <= start_s < end_s <= duration.
  void validate(const VideoMeta& meta) const;
};

// Binary per-segment indicator, one entry per segment (0 or 1).
using EventVector = std::vector<std::uint8_t>;

// Trims and collapses runs of whitespace to a single space. Case is kept.
std::string normalize_text(std::string_view text);

// Segment span covered by an annotation: the start time's segment through
// the last segment starting before the end time.
SegmentInterval annotation_to_segment_span(const QueryAnnotation& q,
                                           const VideoMeta& meta);

// Event vector for annotation `j` (1-based over all annotations of the
// video): segment k is 1 iff some annotation with the same normalized text
// covers k.
EventVector build_event_vector(std::span<const QueryAnnotation> queries, int j,
                               const VideoMeta& meta);

// All event vectors of one video, index-aligned with `queries`.
std::vector<EventVector> build_event_vectors(
    std::span<const QueryAnnotation> queries, const VideoMeta& meta);

struct QueryGroup {
  std::string text;          // normalized
  std::vector<int> members;  // 1-based indices, sorted by start_s
  int occurrences() const { return static_cast<int>(members.size()); }
};

// Partitions annotations by normalized text. Groups appear in order of first
// occurrence in the input.
std::vector<QueryGroup> group_identical_queries(
    std::span<const QueryAnnotation> queries);

}  // namespace bayesloc

#endif  // BAYESLOC_GROUND_TRUTH_HPP_
