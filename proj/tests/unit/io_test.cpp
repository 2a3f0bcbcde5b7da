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

#include "bayesloc/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <functional>

#include "bayesloc/errors.hpp"
#include "bayesloc/synth.hpp"
#include "fixtures.hpp"

namespace bayesloc {
namespace {

using testing::slurp;
using testing::TempDir;

void write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string validation_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected ValidationError";
  return {};
}

SynthDataset tiny_data() {
  SynthConfig cfg;
  cfg.num_videos = 3;
  cfg.feature_range = {20, 600};
  cfg.feature_dim = 3;
  cfg.seed = 4;
  return generate_scenario(cfg);
}

TEST(Io, AnnotationsRoundTrip) {
  TempDir dir("io");
  const auto data = tiny_data();
  const auto text = io::format_annotations(data.videos, R"({"seed":4,"alpha":85})");
  io::write_file_atomic(dir / "a.jsonl", text);
  const auto back = io::read_annotations(dir / "a.jsonl", 512);
  ASSERT_EQ(back.size(), data.videos.size());
  for (std::size_t v = 0; v < back.size(); ++v) {
    EXPECT_EQ(back[v].meta.video_id, data.videos[v].meta.video_id);
    EXPECT_EQ(back[v].meta.num_frames, data.videos[v].meta.num_frames);
    ASSERT_EQ(back[v].queries.size(), data.videos[v].queries.size());
    for (std::size_t q = 0; q < back[v].queries.size(); ++q) {
      EXPECT_EQ(back[v].queries[q].start_s, data.videos[v].queries[q].start_s);
      EXPECT_EQ(back[v].queries[q].end_s, data.videos[v].queries[q].end_s);
      EXPECT_EQ(back[v].queries[q].text, data.videos[v].queries[q].text);
    }
  }
  // The header keeps config keys in the given order.
  EXPECT_EQ(text.rfind(R"({"format":"bayesloc.annotations","version":1,"config":{"seed":4,"alpha":85}})", 0),
            0u);
  EXPECT_EQ(io::format_annotations(back, R"({"seed":4,"alpha":85})"), text);
}

TEST(Io, AnnotationsWithoutHeaderOrStride) {
  TempDir dir("io");
  write(dir / "a.jsonl",
        R"({"video_id":"v","num_frames":960,"fps":30,"queries":[{"query_id":"q","text":"x","start_s":2.0,"end_s":4.0}]})"
        "\n\n");
  const auto d = io::read_annotations(dir / "a.jsonl", 30);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].meta.feature_stride, 16);
  EXPECT_EQ(d[0].meta.max_segments, 30);
  EXPECT_EQ(annotation_to_segment_span(d[0].queries[0], d[0].meta), (SegmentInterval{2, 4}));
}

TEST(Io, FeaturesAndScoresRoundTrip) {
  TempDir dir("io");
  const auto data = tiny_data();
  io::write_file_atomic(dir / "f.jsonl", io::format_features(data.features, ""));
  EXPECT_EQ(io::read_features(dir / "f.jsonl"), data.features);

  const auto scores = oracle_scores(data.videos, 0.2, 9);
  io::write_file_atomic(dir / "s.jsonl", io::format_scores(data.videos, scores, ""));
  EXPECT_EQ(io::read_scores(dir / "s.jsonl"), scores);
}

TEST(Io, TsvScores) {
  TempDir dir("io");
  write(dir / "s.tsv", "v1\tq1\t0.1,0.5,1\nv1\tq2\t0,0, 0.25\n");
  const auto table = io::read_scores(dir / "s.tsv");
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table.at({"v1", "q1"}), (ScoreVector{0.1, 0.5, 1.0}));
  EXPECT_EQ(table.at({"v1", "q2"}), (ScoreVector{0.0, 0.0, 0.25}));

  write(dir / "bad.tsv", "v1\tq1\t0.1,x\nv1 q2 0.3\n");
  const auto msg = validation_message([&] { io::read_scores(dir / "bad.tsv"); });
  EXPECT_NE(msg.find("bad.tsv:1:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("bad.tsv:2:"), std::string::npos) << msg;
}

TEST(Io, DiagnosticsCarryLineNumbers) {
  TempDir dir("io");
  write(dir / "a.jsonl",
        R"({"format":"bayesloc.annotations","version":1,"config":{}})" "\n"
        R"({"video_id":"v","num_frames":960,"fps":30,"queries":[]})" "\n"
        R"({"video_id":"w","num_frames":960,"fps":30,"queries":[],"colour":1})" "\n"
        "{not json\n"
        R"({"video_id":"x","num_frames":960,"fps":30,"queries":[{"query_id":"q","text":"t","start_s":5,"end_s":4}]})" "\n"
        R"({"video_id":"v","num_frames":960,"fps":30,"queries":[]})" "\n");
  const auto msg = validation_message([&] { io::read_annotations(dir / "a.jsonl", 512); });
  EXPECT_NE(msg.find("4 invalid record(s)"), std::string::npos) << msg;
  EXPECT_NE(msg.find("a.jsonl:3: unknown field 'colour'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("a.jsonl:4: malformed JSON"), std::string::npos) << msg;
  EXPECT_NE(msg.find("a.jsonl:5:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("a.jsonl:6: duplicate video_id"), std::string::npos) << msg;
  EXPECT_EQ(msg.find("a.jsonl:2:"), std::string::npos) << msg;
}

TEST(Io, RejectsWrongFormatHeaderAndVersion) {
  TempDir dir("io");
  write(dir / "p.jsonl", R"({"format":"bayesloc.scores","version":1,"config":{}})" "\n");
  auto msg = validation_message([&] { io::read_predictions(dir / "p.jsonl"); });
  EXPECT_NE(msg.find("expected a 'bayesloc.predictions' file"), std::string::npos) << msg;
  write(dir / "p.jsonl", R"({"format":"bayesloc.predictions","version":2,"config":{}})" "\n");
  msg = validation_message([&] { io::read_predictions(dir / "p.jsonl"); });
  EXPECT_NE(msg.find("version 2"), std::string::npos) << msg;
  EXPECT_THROW(io::read_predictions(dir / "missing.jsonl"), ValidationError);
}

TEST(Io, PredictionsRoundTrip) {
  TempDir dir("io");
  const std::vector<QueryPrediction> preds{
      {{"v", "q1"}, {{1, 3}, 0.0, 3.2}},
      {{"v", "q2"}, {{4, 4}, 3.2, 4.2666666666666666}},
  };
  io::write_file_atomic(dir / "p.jsonl", io::format_predictions(preds, ""));
  const auto back = io::read_predictions(dir / "p.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].key, (QueryKey{"v", "q2"}));
  EXPECT_EQ(back[1].interval.end, 4.2666666666666666);
  write(dir / "bad.jsonl", R"({"video_id":"v","query_id":"q","start_s":3,"end_s":1})" "\n");
  EXPECT_THROW(io::read_predictions(dir / "bad.jsonl"), ValidationError);
}

TEST(Io, ModelRoundTrip) {
  TempDir dir("io");
  ScorerConfig cfg;
  cfg.feature_dim = 3;
  cfg.hidden_dim = 4;
  cfg.seed = 12345678901234567ull;
  const auto model = ScorerModel::initialize(cfg);
  io::write_file_atomic(dir / "m.json", io::format_model(model, R"({"k":1})"));
  const auto back = io::read_model(dir / "m.json");
  EXPECT_EQ(back, model);
  EXPECT_EQ(back.config().seed, cfg.seed);
  EXPECT_EQ(back.config().hidden_dim, 4);

  auto text = slurp(dir / "m.json");
  text.replace(text.find("bayesloc.scorer"), 15, "bayesloc.sweeps");
  write(dir / "bad.json", text);
  EXPECT_THROW(io::read_model(dir / "bad.json"), ValidationError);
}

TEST(Io, LossCurveCsv) {
  const auto csv = io::format_loss_curve({0.5, 0.25}, R"({"epochs":1})");
  EXPECT_EQ(csv,
            "# {\"format\":\"bayesloc.loss\",\"version\":1,\"config\":{\"epochs\":1}}\n"
            "epoch,loss\n0,0.5\n1,0.25\n");
}

TEST(Io, AtomicWriteReplacesWithoutLeftovers) {
  TempDir dir("io");
  const auto path = dir / "sub" / "out.json";
  io::write_file_atomic(path, "first");
  io::write_file_atomic(path, "second");
  EXPECT_EQ(slurp(path), "second");
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
    (void)entry;
    ++files;
  }
  EXPECT_EQ(files, 1u);
}

}  // namespace
}  // namespace bayesloc
