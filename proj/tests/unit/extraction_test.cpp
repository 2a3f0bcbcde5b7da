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

#include "bayesloc/extraction.hpp"

#include <gtest/gtest.h>

#include <random>

#include "bayesloc/errors.hpp"
#include "bayesloc/prior.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace bayesloc {
namespace {

using testing::annotation;
using testing::meta_with_segments;

ExtractionConfig at(double alpha) { return ExtractionConfig{alpha}; }

TEST(PercentileThreshold, NearestRank) {
  EXPECT_DOUBLE_EQ(percentile_threshold(std::vector<double>{0.1, 0.1, 0.2, 0.8, 0.9}, 50), 0.2);
  EXPECT_DOUBLE_EQ(percentile_threshold(std::vector<double>{0.9, 0.2, 0.1, 0.8, 0.1}, 50), 0.2);
}

TEST(PercentileThreshold, ConstantVector) {
  const std::vector<double> p(17, 0.25);
  for (const double alpha : {0.5, 10.0, 50.0, 85.0, 99.9}) {
    EXPECT_DOUBLE_EQ(percentile_threshold(p, alpha), 0.25);
  }
}

TEST(PercentileThreshold, TopRankIsMax) {
  const std::vector<double> p{0.3, 0.7, 0.1, 0.65, 0.2};
  EXPECT_DOUBLE_EQ(percentile_threshold(p, 99.999), 0.7);
}

TEST(PercentileThreshold, RejectsEmptyAndBadAlpha) {
  EXPECT_THROW(percentile_threshold(std::vector<double>{}, 50), ValidationError);
  EXPECT_THROW(percentile_threshold(std::vector<double>{0.5}, 0.0), ValidationError);
  EXPECT_THROW(percentile_threshold(std::vector<double>{0.5}, 100.0), ValidationError);
}

TEST(PercentileThreshold, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 60)(rng);
    std::vector<double> p(n);
    // Coarse values force ties.
    for (double& v : p) v = std::round(unit(rng) * 8.0) / 8.0;
    const double alpha = std::uniform_real_distribution<double>(0.1, 99.9)(rng);
    ASSERT_DOUBLE_EQ(percentile_threshold(p, alpha), oracle::nearest_rank(p, alpha));
  }
  // Ranks that land exactly on an integer.
  const std::vector<double> p{4, 1, 3, 2};
  for (const double alpha : {25.0, 50.0, 75.0}) {
    EXPECT_DOUBLE_EQ(percentile_threshold(p, alpha), oracle::nearest_rank(p, alpha));
  }
}

TEST(ExtractSegment, Examples) {
  EXPECT_EQ(extract_segment(std::vector<double>{0.1, 0.2, 0.9, 0.8, 0.1}, at(50)),
            (SegmentInterval{2, 4}));
  for (const double alpha : {75.5, 85.0, 99.0}) {
    EXPECT_EQ(extract_segment(std::vector<double>{0, 0, 1, 0}, at(alpha)),
              (SegmentInterval{3, 3}));
  }
  // Rank ceil(0.75 * 4) = 3 is still a zero.
  EXPECT_EQ(extract_segment(std::vector<double>{0, 0, 1, 0}, at(75)), (SegmentInterval{1, 4}));
  EXPECT_EQ(extract_segment(std::vector<double>(9, 0.4), at(85)), (SegmentInterval{1, 9}));
}

TEST(ExtractSegment, SeedsAtFirstArgmax) {
  EXPECT_EQ(extract_segment(std::vector<double>{0.9, 0.1, 0.1, 0.9}, at(90)),
            (SegmentInterval{1, 1}));
}

TEST(ExtractSegment, RejectsEmpty) {
  EXPECT_THROW(extract_segment(std::vector<double>{}, at(85)), ValidationError);
}

std::vector<double> random_scores(std::mt19937_64& rng, int n) {
  std::vector<double> p(n);
  const int style = std::uniform_int_distribution<int>(0, 2)(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& v : p) {
    v = unit(rng);
    if (style == 1) v = std::round(v * 4.0) / 4.0;
    if (style == 2) v = v < 0.8 ? 0.0 : 1.0;
  }
  return p;
}

TEST(ExtractSegment, MatchesBruteForceInterval) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 80)(rng);
    const auto p = random_scores(rng, n);
    const double alpha = std::uniform_real_distribution<double>(1.0, 99.0)(rng);
    const double threshold = oracle::nearest_rank(p, alpha);
    ASSERT_EQ(extract_segment(p, at(alpha)), oracle::maximal_interval(p, threshold));
  }
}

TEST(ExtractSegment, Postconditions) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 300)(rng);
    const auto p = random_scores(rng, n);
    const double alpha = std::uniform_real_distribution<double>(1.0, 99.0)(rng);
    const auto seg = extract_segment(p, at(alpha));
    const double threshold = percentile_threshold(p, alpha);
    ASSERT_GE(seg.start_segment, 1);
    ASSERT_LE(seg.end_segment, n);
    ASSERT_LE(seg.start_segment, seg.end_segment);
    const auto k_star = std::max_element(p.begin(), p.end()) - p.begin() + 1;
    ASSERT_LE(seg.start_segment, k_star);
    ASSERT_GE(seg.end_segment, k_star);
    for (int k = seg.start_segment; k <= seg.end_segment; ++k) ASSERT_GE(p[k - 1], threshold);
    if (seg.start_segment > 1) ASSERT_LT(p[seg.start_segment - 2], threshold);
    if (seg.end_segment < n) ASSERT_LT(p[seg.end_segment], threshold);
  }
}

TEST(ExtractSegment, LengthNonIncreasingInAlpha) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 200)(rng);
    const auto p = random_scores(rng, n);
    int prev = n + 1;
    for (double alpha = 1.0; alpha < 100.0; alpha += 7.0) {
      const int len = extract_segment(p, at(alpha)).length();
      ASSERT_LE(len, prev);
      prev = len;
    }
  }
}

TEST(PredictIntervals, OneHotQueryMapsToSegmentSeconds) {
  const auto m = meta_with_segments(12);
  std::vector<ScoreVector> scores{ScoreVector(12, 0.0)};
  scores[0][4] = 1.0;
  // Rank ceil(0.95 * 12) = 12 is the single one.
  const auto out = predict_intervals(scores, m, at(95));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].segments, (SegmentInterval{5, 5}));
  const auto [start, end] = segment_to_interval_seconds({5, 5}, m);
  EXPECT_DOUBLE_EQ(out[0].start_s, start);
  EXPECT_DOUBLE_EQ(out[0].end_s, end);
}

TEST(PredictIntervals, BimodalFixtureGivesOrderedDisjointIntervals) {
  const auto m = meta_with_segments(10);
  const std::vector<QueryAnnotation> qs{annotation("a", "fold", {3, 3}, m),
                                        annotation("b", "fold", {8, 8}, m)};
  const ScoreVector p{0, 0, 1, 0, 0, 0, 0, 1, 0, 0};
  const auto refined = refine_video(std::vector<ScoreVector>{p, p}, qs, PriorConfig{});
  const auto out = predict_intervals(refined, m, at(85));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].segments, (SegmentInterval{3, 3}));
  EXPECT_EQ(out[1].segments, (SegmentInterval{8, 8}));
  EXPECT_LT(out[0].end_s, out[1].start_s);
}

TEST(PredictIntervals, EmptyAndMismatched) {
  const auto m = meta_with_segments(6);
  EXPECT_TRUE(predict_intervals(std::vector<ScoreVector>{}, m, at(85)).empty());
  EXPECT_THROW(predict_intervals(std::vector<ScoreVector>{ScoreVector(5, 0.5)}, m, at(85)),
               ValidationError);
}

}  // namespace
}  // namespace bayesloc
