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

#include "bayesloc/ground_truth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "bayesloc/errors.hpp"

namespace bayesloc {

void QueryAnnotation::validate(const VideoMeta& meta) const {
  const double duration = meta.duration();
  if (!std::isfinite(start_s) || !std::isfinite(end_s) || start_s < 0.0 ||
      start_s >= end_s || end_s > duration) {
    std::ostringstream err;
    err << "query '" << query_id << "' of video '" << meta.video_id
        << "': need 0 <= start_s < end_s <= " << duration << ", got ["
        << start_s << ", " << end_s << "]";
    throw ValidationError(err.str());
  }
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

SegmentInterval annotation_to_segment_span(const QueryAnnotation& q,
                                           const VideoMeta& meta) {
  q.validate(meta);
  const int start = time_to_segment(q.start_s, meta);
  const int end = std::max(start, end_time_to_segment(q.end_s, meta));
  return {start, end};
}

std::vector<EventVector> build_event_vectors(
    std::span<const QueryAnnotation> queries, const VideoMeta& meta) {
  const auto s = static_cast<std::size_t>(segment_count(meta));

  // One union mask per distinct text, then each annotation copies its own.
  std::map<std::string, EventVector> masks;
  std::vector<const EventVector*> owner(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto span = annotation_to_segment_span(queries[i], meta);
    auto [it, inserted] =
        masks.try_emplace(normalize_text(queries[i].text), EventVector(s, 0));
    std::fill(it->second.begin() + (span.start_segment - 1),
              it->second.begin() + span.end_segment, std::uint8_t{1});
    owner[i] = &it->second;
  }
  std::vector<EventVector> out;
  out.reserve(queries.size());
  for (const auto* mask : owner) out.push_back(*mask);
  return out;
}

EventVector build_event_vector(std::span<const QueryAnnotation> queries, int j,
                               const VideoMeta& meta) {
  if (j < 1 || j > static_cast<int>(queries.size())) {
    throw RangeError("query index " + std::to_string(j) + " outside [1, " +
                     std::to_string(queries.size()) + "]");
  }
  const std::string key = normalize_text(queries[j - 1].text);
  EventVector out(static_cast<std::size_t>(segment_count(meta)), 0);
  for (const auto& q : queries) {
    const auto span = annotation_to_segment_span(q, meta);
    if (normalize_text(q.text) != key) continue;
    std::fill(out.begin() + (span.start_segment - 1),
              out.begin() + span.end_segment, std::uint8_t{1});
  }
  return out;
}

std::vector<QueryGroup> group_identical_queries(
    std::span<const QueryAnnotation> queries) {
  std::vector<QueryGroup> groups;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto text = normalize_text(queries[i].text);
    auto [it, inserted] = index.try_emplace(text, groups.size());
    if (inserted) groups.push_back({std::move(text), {}});
    groups[it->second].members.push_back(static_cast<int>(i) + 1);
  }
  for (auto& g : groups) {
    std::stable_sort(g.members.begin(), g.members.end(), [&](int a, int b) {
      return queries[a - 1].start_s < queries[b - 1].start_s;
    });
  }
  return groups;
}

}  // namespace bayesloc
