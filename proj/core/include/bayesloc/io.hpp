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

#ifndef BAYESLOC_IO_HPP_
#define BAYESLOC_IO_HPP_

// On-disk formats. Record files are JSON Lines; each may start with a
// header record {"format": ..., "version": ..., "config": {...}} that echoes
// the configuration that produced it. Times are always seconds; segment
// indices never appear in files.
//
//   annotations  {"video_id", "num_frames", "fps", ["feature_stride"],
//                 "queries": [{"query_id", "text", "start_s", "end_s"}]}
//   features     {"video_id", "rows", "dim", "data": [rows * dim reals]}
//   scores       {"video_id", "scores": {query_id: [S_i reals]}}
//                or TSV lines: video_id <TAB> query_id <TAB> v1,v2,...
//   predictions  {"video_id", "query_id", "start_s", "end_s"}
//
// Single-document outputs (evaluation, sweep, model) are JSON objects with
// the same "format"/"version"/"config" members. Readers report every
// malformed record with its line number in one ValidationError.

#include <filesystem>
#include <string>
#include <vector>

#include "bayesloc/evaluation.hpp"
#include "bayesloc/pipeline.hpp"
#include "bayesloc/scorer.hpp"

namespace bayesloc::io {

inline constexpr int kFormatVersion = 1;

inline constexpr const char* kAnnotationsFormat = "bayesloc.annotations";
inline constexpr const char* kFeaturesFormat = "bayesloc.features";
inline constexpr const char* kScoresFormat = "bayesloc.scores";
inline constexpr const char* kPredictionsFormat = "bayesloc.predictions";
inline constexpr const char* kEvalFormat = "bayesloc.eval";
inline constexpr const char* kSweepFormat = "bayesloc.sweep";
inline constexpr const char* kModelFormat = "bayesloc.scorer";
inline constexpr const char* kLossFormat = "bayesloc.loss";

// `config_json` arguments must hold a serialized JSON object (or be empty).

// Every video gets max_segments = `max_segments`.
Dataset read_annotations(const std::filesystem::path& path, int max_segments);
std::string format_annotations(const Dataset& dataset,
                               const std::string& config_json);

FeatureTable read_features(const std::filesystem::path& path);
std::string format_features(const FeatureTable& features,
                            const std::string& config_json);

// Either format; TSV is selected by a .tsv extension.
ScoreTable read_scores(const std::filesystem::path& path);
// Records follow dataset order; keys missing from `scores` are skipped.
std::string format_scores(const Dataset& dataset, const ScoreTable& scores,
                          const std::string& config_json);

std::vector<KeyedInterval> read_predictions(const std::filesystem::path& path);
std::string format_predictions(const std::vector<QueryPrediction>& predictions,
                               const std::string& config_json);

std::string format_eval(const EvalResult& result, const std::string& config_json);
std::string format_sweep(const SweepTable& table, const std::string& config_json);

std::string format_model(const ScorerModel& model, const std::string& config_json);
ScorerModel read_model(const std::filesystem::path& path);

// CSV "epoch,loss" preceded by a "# {header json}" comment line.
std::string format_loss_curve(const std::vector<double>& curve,
                              const std::string& config_json);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace bayesloc::io

#endif  // BAYESLOC_IO_HPP_
