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

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "bayesloc/errors.hpp"
#include "json.hpp"

namespace bayesloc::io {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kMaxDiagnostics = 50;

// Collects per-record problems so a single run reports all of them.
class Diagnostics {
 public:
  explicit Diagnostics(const std::filesystem::path& path) : path_(path.string()) {}

  void add(std::size_t line, const std::string& msg) {
    ++count_;
    if (messages_.size() < kMaxDiagnostics) {
      messages_.push_back(path_ + ":" + std::to_string(line) + ": " + msg);
    }
  }

  void throw_if_any() const {
    if (count_ == 0) return;
    std::ostringstream err;
    err << count_ << " invalid record(s) in " << path_;
    for (const auto& m : messages_) err << "\n  " << m;
    if (count_ > messages_.size()) err << "\n  ...";
    throw ValidationError(err.str());
  }

 private:
  std::string path_;
  std::vector<std::string> messages_;
  std::size_t count_ = 0;
};

// Thrown by the field helpers; caught per record and turned into a
// diagnostic.
struct RecordError {
  std::string message;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const char* what) {
  if (!obj.is_object()) throw RecordError{std::string(what) + " is not an object"};
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw RecordError{std::string("unknown field '") + item.key() + "' in " + what};
    }
  }
}

const json& field(const json& obj, const char* key, const char* what) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw RecordError{std::string("missing field '") + key + "' in " + what};
  }
  return *it;
}

std::string get_string(const json& obj, const char* key, const char* what) {
  const auto& v = field(obj, key, what);
  if (!v.is_string()) throw RecordError{std::string("'") + key + "' must be a string"};
  return v.get<std::string>();
}

double get_number(const json& v, const char* key) {
  if (!v.is_number()) throw RecordError{std::string("'") + key + "' must be a number"};
  return v.get<double>();
}

double get_number(const json& obj, const char* key, const char* what) {
  return get_number(field(obj, key, what), key);
}

std::int64_t get_integer(const json& obj, const char* key, const char* what) {
  const auto& v = field(obj, key, what);
  if (!v.is_number_integer()) {
    throw RecordError{std::string("'") + key + "' must be an integer"};
  }
  return v.get<std::int64_t>();
}

std::vector<double> get_reals(const json& v, const char* key) {
  if (!v.is_array()) throw RecordError{std::string("'") + key + "' must be an array"};
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(get_number(x, key));
  return out;
}

ordered_json parse_config(const std::string& config_json) {
  if (config_json.empty()) return ordered_json::object();
  return ordered_json::parse(config_json);
}

ordered_json header(const char* format, const std::string& config_json) {
  ordered_json h;
  h["format"] = format;
  h["version"] = kFormatVersion;
  h["config"] = parse_config(config_json);
  return h;
}

bool is_header(const json& record) {
  return record.is_object() && record.contains("format");
}

void check_header(const json& record, const char* format) {
  check_keys(record, {"format", "version", "config"}, "header");
  const auto name = get_string(record, "format", "header");
  if (name != format) {
    throw RecordError{"expected a '" + std::string(format) + "' file, found '" +
                      name + "'"};
  }
  const auto version = get_integer(record, "version", "header");
  if (version < 1 || version > kFormatVersion) {
    throw RecordError{"unsupported format version " + std::to_string(version)};
  }
}

// Calls fn(record, line_number) for every non-blank JSON line, handling the
// optional header and collecting errors.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, const char* format,
                     Fn&& fn) {
  auto in = open_input(path);
  Diagnostics diag(path);
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json record = json::parse(line);
      if (first && is_header(record)) {
        check_header(record, format);
      } else {
        fn(record, line_no);
      }
    } catch (const json::parse_error& e) {
      diag.add(line_no, std::string("malformed JSON: ") + e.what());
    } catch (const RecordError& e) {
      diag.add(line_no, e.message);
    } catch (const Error& e) {
      diag.add(line_no, e.what());
    }
    first = false;
  }
  diag.throw_if_any();
}

std::string join_lines(const std::vector<ordered_json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

Dataset read_annotations(const std::filesystem::path& path, int max_segments) {
  Dataset dataset;
  std::set<std::string> seen;
  for_each_record(path, kAnnotationsFormat, [&](const json& rec, std::size_t) {
    check_keys(rec, {"video_id", "num_frames", "fps", "feature_stride", "queries"},
               "annotation record");
    VideoRecord video;
    video.meta.video_id = get_string(rec, "video_id", "annotation record");
    video.meta.num_frames = get_integer(rec, "num_frames", "annotation record");
    video.meta.fps = get_number(rec, "fps", "annotation record");
    if (rec.contains("feature_stride")) {
      video.meta.feature_stride =
          static_cast<int>(get_integer(rec, "feature_stride", "annotation record"));
    }
    video.meta.max_segments = max_segments;
    const auto& queries = field(rec, "queries", "annotation record");
    if (!queries.is_array()) throw RecordError{"'queries' must be an array"};
    for (const auto& q : queries) {
      check_keys(q, {"query_id", "text", "start_s", "end_s"}, "query");
      video.queries.push_back({get_string(q, "query_id", "query"),
                               get_string(q, "text", "query"),
                               get_number(q, "start_s", "query"),
                               get_number(q, "end_s", "query")});
    }
    video.validate();
    if (!seen.insert(video.meta.video_id).second) {
      throw RecordError{"duplicate video_id '" + video.meta.video_id + "'"};
    }
    dataset.push_back(std::move(video));
  });
  return dataset;
}

std::string format_annotations(const Dataset& dataset,
                               const std::string& config_json) {
  std::vector<ordered_json> records{header(kAnnotationsFormat, config_json)};
  for (const auto& video : dataset) {
    ordered_json rec;
    rec["video_id"] = video.meta.video_id;
    rec["num_frames"] = video.meta.num_frames;
    rec["fps"] = video.meta.fps;
    rec["feature_stride"] = video.meta.feature_stride;
    auto& queries = rec["queries"] = ordered_json::array();
    for (const auto& q : video.queries) {
      ordered_json jq;
      jq["query_id"] = q.query_id;
      jq["text"] = q.text;
      jq["start_s"] = q.start_s;
      jq["end_s"] = q.end_s;
      queries.push_back(std::move(jq));
    }
    records.push_back(std::move(rec));
  }
  return join_lines(records);
}

FeatureTable read_features(const std::filesystem::path& path) {
  FeatureTable table;
  for_each_record(path, kFeaturesFormat, [&](const json& rec, std::size_t) {
    check_keys(rec, {"video_id", "rows", "dim", "data"}, "feature record");
    const auto id = get_string(rec, "video_id", "feature record");
    const auto rows = get_integer(rec, "rows", "feature record");
    const auto dim = get_integer(rec, "dim", "feature record");
    if (rows < 1 || dim < 1) throw RecordError{"'rows' and 'dim' must be >= 1"};
    auto data = get_reals(field(rec, "data", "feature record"), "data");
    FeatureMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(dim),
                    std::move(data));
    if (!table.emplace(id, std::move(m)).second) {
      throw RecordError{"duplicate video_id '" + id + "'"};
    }
  });
  return table;
}

std::string format_features(const FeatureTable& features,
                            const std::string& config_json) {
  std::vector<ordered_json> records{header(kFeaturesFormat, config_json)};
  for (const auto& [id, m] : features) {
    ordered_json rec;
    rec["video_id"] = id;
    rec["rows"] = m.rows();
    rec["dim"] = m.dim();
    rec["data"] = m.data();
    records.push_back(std::move(rec));
  }
  return join_lines(records);
}

namespace {

ScoreTable read_scores_tsv(const std::filesystem::path& path) {
  auto in = open_input(path);
  Diagnostics diag(path);
  ScoreTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      diag.add(line_no, "expected video_id<TAB>query_id<TAB>values");
      continue;
    }
    QueryKey key{line.substr(0, tab1), line.substr(tab1 + 1, tab2 - tab1 - 1)};
    ScoreVector values;
    std::stringstream cells(line.substr(tab2 + 1));
    std::string cell;
    bool ok = true;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || errno != 0 || *end != '\0') {
        diag.add(line_no, "not a number: '" + cell + "'");
        ok = false;
        break;
      }
      values.push_back(v);
    }
    if (!ok) continue;
    if (!table.emplace(key, std::move(values)).second) {
      diag.add(line_no, "duplicate scores for " + to_string(key));
    }
  }
  diag.throw_if_any();
  return table;
}

}  // namespace

ScoreTable read_scores(const std::filesystem::path& path) {
  if (path.extension() == ".tsv") return read_scores_tsv(path);
  ScoreTable table;
  for_each_record(path, kScoresFormat, [&](const json& rec, std::size_t) {
    check_keys(rec, {"video_id", "scores"}, "score record");
    const auto id = get_string(rec, "video_id", "score record");
    const auto& scores = field(rec, "scores", "score record");
    if (!scores.is_object()) throw RecordError{"'scores' must be an object"};
    for (const auto& item : scores.items()) {
      QueryKey key{id, item.key()};
      if (!table.emplace(key, get_reals(item.value(), "scores")).second) {
        throw RecordError{"duplicate scores for " + to_string(key)};
      }
    }
  });
  return table;
}

std::string format_scores(const Dataset& dataset, const ScoreTable& scores,
                          const std::string& config_json) {
  std::vector<ordered_json> records{header(kScoresFormat, config_json)};
  for (const auto& video : dataset) {
    ordered_json rec;
    rec["video_id"] = video.meta.video_id;
    auto& per_query = rec["scores"] = ordered_json::object();
    for (const auto& q : video.queries) {
      const auto it = scores.find({video.meta.video_id, q.query_id});
      if (it != scores.end()) per_query[q.query_id] = it->second;
    }
    records.push_back(std::move(rec));
  }
  return join_lines(records);
}

std::vector<KeyedInterval> read_predictions(const std::filesystem::path& path) {
  std::vector<KeyedInterval> out;
  for_each_record(path, kPredictionsFormat, [&](const json& rec, std::size_t) {
    check_keys(rec, {"video_id", "query_id", "start_s", "end_s"}, "prediction");
    KeyedInterval item{{get_string(rec, "video_id", "prediction"),
                        get_string(rec, "query_id", "prediction")},
                       {get_number(rec, "start_s", "prediction"),
                        get_number(rec, "end_s", "prediction")}};
    if (!(item.interval.start <= item.interval.end)) {
      throw RecordError{"start_s must not exceed end_s"};
    }
    out.push_back(std::move(item));
  });
  return out;
}

std::string format_predictions(const std::vector<QueryPrediction>& predictions,
                               const std::string& config_json) {
  std::vector<ordered_json> records{header(kPredictionsFormat, config_json)};
  for (const auto& p : predictions) {
    ordered_json rec;
    rec["video_id"] = p.key.video_id;
    rec["query_id"] = p.key.query_id;
    rec["start_s"] = p.interval.start_s;
    rec["end_s"] = p.interval.end_s;
    records.push_back(std::move(rec));
  }
  return join_lines(records);
}

namespace {

std::string threshold_label(double t) {
  std::ostringstream s;
  s << t;
  return s.str();
}

}  // namespace

std::string format_eval(const EvalResult& result, const std::string& config_json) {
  auto doc = header(kEvalFormat, config_json);
  doc["count"] = result.count();
  auto& recalls = doc["recall"] = ordered_json::object();
  for (std::size_t t = 0; t < result.thresholds.size(); ++t) {
    recalls[threshold_label(result.thresholds[t])] = result.recalls[t];
  }
  auto& per_query = doc["per_query"] = ordered_json::array();
  for (const auto& q : result.per_query) {
    ordered_json jq;
    jq["video_id"] = q.key.video_id;
    jq["query_id"] = q.key.query_id;
    jq["iou"] = q.iou;
    auto& hits = jq["hits"] = ordered_json::object();
    for (std::size_t t = 0; t < q.hits.size(); ++t) {
      hits[threshold_label(result.thresholds[t])] = static_cast<bool>(q.hits[t]);
    }
    per_query.push_back(std::move(jq));
  }
  return doc.dump(2) + "\n";
}

std::string format_sweep(const SweepTable& table, const std::string& config_json) {
  auto doc = header(kSweepFormat, config_json);
  doc["thresholds"] = table.thresholds;
  auto& rows = doc["rows"] = ordered_json::array();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ordered_json jr;
    jr["alpha"] = row.alpha;
    jr["beta"] = row.beta;
    auto& recalls = jr["recall"] = ordered_json::object();
    for (std::size_t t = 0; t < table.thresholds.size(); ++t) {
      recalls[threshold_label(table.thresholds[t])] = row.recalls[t];
    }
    jr["mean_interval_s"] = row.mean_interval_seconds;
    jr["mean_interval_segments"] = row.mean_interval_segments;
    jr["best"] = r == table.best;
    rows.push_back(std::move(jr));
  }
  doc["best"] = table.best;
  return doc.dump(2) + "\n";
}

std::string format_model(const ScorerModel& model, const std::string& config_json) {
  auto doc = header(kModelFormat, config_json);
  const auto& cfg = model.config();
  auto& scorer = doc["scorer"] = ordered_json::object();
  scorer["feature_dim"] = cfg.feature_dim;
  scorer["hidden_dim"] = cfg.hidden_dim;
  scorer["learning_rate"] = cfg.learning_rate;
  scorer["epochs"] = cfg.epochs;
  scorer["seed"] = cfg.seed;
  auto& params = doc["parameters"] = ordered_json::object();
  const auto flat = model.parameters();
  for (const auto& block : model.layout()) {
    auto& jb = params[block.name] = ordered_json::object();
    jb["shape"] = {block.rows, block.cols};
    jb["values"] = std::vector<double>(flat.begin() + block.offset,
                                       flat.begin() + block.offset + block.size());
  }
  return doc.dump(1) + "\n";
}

ScorerModel read_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  json doc;
  try {
    doc = json::parse(in);
    check_header(json{{"format", doc.value("format", "")},
                      {"version", doc.value("version", 0)},
                      {"config", json::object()}},
                 kModelFormat);
    check_keys(doc, {"format", "version", "config", "scorer", "parameters"},
               "model");
    const auto& js = field(doc, "scorer", "model");
    check_keys(js, {"feature_dim", "hidden_dim", "learning_rate", "epochs", "seed"},
               "scorer config");
    ScorerConfig cfg;
    cfg.feature_dim = static_cast<int>(get_integer(js, "feature_dim", "scorer config"));
    cfg.hidden_dim = static_cast<int>(get_integer(js, "hidden_dim", "scorer config"));
    cfg.learning_rate = get_number(js, "learning_rate", "scorer config");
    cfg.epochs = static_cast<int>(get_integer(js, "epochs", "scorer config"));
    const auto& seed = field(js, "seed", "scorer config");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
      throw RecordError{"'seed' must be an integer"};
    }
    cfg.seed = seed.get<std::uint64_t>();

    ScorerModel model(cfg);
    const auto& params = field(doc, "parameters", "model");
    if (!params.is_object() || params.size() != model.layout().size()) {
      throw RecordError{"'parameters' must hold exactly " +
                        std::to_string(model.layout().size()) + " blocks"};
    }
    auto flat = model.parameters();
    for (const auto& block : model.layout()) {
      const auto& jb = field(params, block.name.c_str(), "parameters");
      check_keys(jb, {"shape", "values"}, "parameter block");
      const auto values = get_reals(field(jb, "values", "parameter block"), "values");
      if (values.size() != block.size()) {
        throw RecordError{"block '" + block.name + "' has " +
                          std::to_string(values.size()) + " values, expected " +
                          std::to_string(block.size())};
      }
      std::copy(values.begin(), values.end(), flat.begin() + block.offset);
    }
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const RecordError& e) {
    throw ValidationError(path.string() + ": " + e.message);
  }
}

std::string format_loss_curve(const std::vector<double>& curve,
                              const std::string& config_json) {
  std::ostringstream out;
  out << "# " << header(kLossFormat, config_json).dump() << "\n";
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < curve.size(); ++e) {
    out << e << "," << json(curve[e]).dump() << "\n";
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bayesloc::io
