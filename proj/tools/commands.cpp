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

#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bayesloc/errors.hpp"
#include "bayesloc/io.hpp"
#include "bayesloc/pipeline.hpp"
#include "bayesloc/scorer.hpp"
#include "bayesloc/synth.hpp"
#include "json.hpp"

namespace bayesloc::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

// Options shared across subcommands; a config file may set any of them.
struct RunConfig {
  double alpha = 85.0;
  double beta = 0.1;
  bool beta_is_variance = false;
  int segments = kDefaultMaxSegments;
  std::vector<double> thresholds = kDefaultThresholds;
  std::uint64_t seed = 42;
  int jobs = 1;
  std::string out_dir;
};

// Maps config-file keys to the CLI option that sets the same value.
using OptionMap = std::map<std::string, CLI::Option*>;

const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{
      "alpha", "beta", "beta_is_variance", "segments", "thresholds",
      "seed",  "jobs", "out_dir"};
  return keys;
}

// Values from the file apply only where the flag was not given explicitly.
void apply_config_file(const std::string& path, const OptionMap& options,
                       RunConfig& rc) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config file " + path + " must hold an object");
  for (const auto& item : doc.items()) {
    if (!config_keys().contains(item.key())) {
      throw ValidationError("config file " + path + ": unknown field '" +
                            item.key() + "'");
    }
  }
  auto given = [&](const char* key) {
    const auto it = options.find(key);
    return doc.contains(key) && it != options.end() && it->second->count() == 0;
  };
  try {
    if (given("alpha")) rc.alpha = doc["alpha"].get<double>();
    if (given("beta")) rc.beta = doc["beta"].get<double>();
    if (given("beta_is_variance")) rc.beta_is_variance = doc["beta_is_variance"].get<bool>();
    if (given("segments")) rc.segments = doc["segments"].get<int>();
    if (given("thresholds")) rc.thresholds = doc["thresholds"].get<std::vector<double>>();
    if (given("seed")) rc.seed = doc["seed"].get<std::uint64_t>();
    if (given("jobs")) rc.jobs = doc["jobs"].get<int>();
    if (given("out_dir")) rc.out_dir = doc["out_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }
}

fs::path out_dir(const RunConfig& rc) {
  if (!rc.out_dir.empty()) return rc.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return ".";
}

PipelineConfig pipeline_config(const RunConfig& rc, bool use_prior) {
  PipelineConfig cfg;
  cfg.extraction.alpha = rc.alpha;
  cfg.prior.beta = rc.beta;
  cfg.prior.spread_is_std = !rc.beta_is_variance;
  cfg.use_prior = use_prior;
  cfg.thresholds = rc.thresholds;
  cfg.jobs = rc.jobs;
  cfg.validate();
  if (rc.segments < 1) throw ValidationError("--segments must be >= 1");
  return cfg;
}

std::string percent(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * fraction;
  return s.str();
}

std::string threshold_name(double t) {
  std::ostringstream s;
  s << "r@1 IoU" << t;
  return s.str();
}

void print_recall_table(std::ostream& out, const EvalResult& result) {
  out << std::setw(9) << "queries";
  for (const double t : result.thresholds) out << std::setw(14) << threshold_name(t);
  out << "\n" << std::setw(9) << result.count();
  for (const double r : result.recalls) out << std::setw(14) << percent(r);
  out << "\n";
}

// Common bookkeeping for every subcommand.
struct Command {
  explicit Command(CLI::App* sub) : app(sub) {}

  CLI::App* app;
  OptionMap options;
  std::string config_path;
};

void add_common(Command& cmd, RunConfig& rc) {
  cmd.app->add_option("--config", cmd.config_path,
                      "JSON file with run settings (alpha, beta, segments, ...)");
  cmd.options["out_dir"] = cmd.app->add_option(
      "--out-dir", rc.out_dir,
      std::string("Output directory (default: $") + kOutDirEnv + " or .)");
  cmd.options["jobs"] =
      cmd.app->add_option("--jobs", rc.jobs, "Worker threads")->capture_default_str();
}

void add_segments(Command& cmd, RunConfig& rc) {
  cmd.options["segments"] =
      cmd.app->add_option("--segments", rc.segments, "Maximum segments per video (S)")
          ->capture_default_str();
}

void add_thresholds(Command& cmd, RunConfig& rc) {
  cmd.options["thresholds"] =
      cmd.app->add_option("--thresholds", rc.thresholds, "IoU thresholds")
          ->delimiter(',')
          ->capture_default_str();
}

void add_prior(Command& cmd, RunConfig& rc) {
  cmd.options["beta_is_variance"] = cmd.app->add_flag(
      "--beta-is-variance", rc.beta_is_variance,
      "Treat S_i * beta as the prior variance instead of its standard deviation");
}

void finish_config(const Command& cmd, RunConfig& rc) {
  if (!cmd.config_path.empty()) apply_config_file(cmd.config_path, cmd.options, rc);
  if (rc.jobs < 1) throw ValidationError("--jobs must be >= 1");
}

ordered_json run_config_json(const RunConfig& rc) {
  ordered_json j;
  j["alpha"] = rc.alpha;
  j["beta"] = rc.beta;
  j["beta_is_variance"] = rc.beta_is_variance;
  j["segments"] = rc.segments;
  j["thresholds"] = rc.thresholds;
  j["seed"] = rc.seed;
  return j;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  SynthConfig cfg;
  std::optional<double> oracle_noise;
};

void do_synth(const RunConfig& rc, SynthArgs args, std::ostream& out) {
  auto& cfg = args.cfg;
  cfg.seed = rc.seed;
  cfg.max_segments = rc.segments;
  if (args.oracle_noise) cfg.noise_sigma = *args.oracle_noise;
  const auto data = generate_scenario(cfg);

  ordered_json resolved;
  resolved["command"] = "synth";
  resolved["num_videos"] = cfg.num_videos;
  resolved["feature_range"] = {cfg.feature_range.first, cfg.feature_range.second};
  resolved["segments"] = cfg.max_segments;
  resolved["steps_per_video"] = {cfg.steps_per_video.first, cfg.steps_per_video.second};
  resolved["repeat_probability"] = cfg.repeat_probability;
  resolved["oracle_noise"] = args.oracle_noise ? ordered_json(*args.oracle_noise)
                                               : ordered_json(nullptr);
  resolved["feature_noise"] = cfg.feature_noise;
  resolved["feature_dim"] = cfg.feature_dim;
  resolved["fps"] = cfg.fps;
  resolved["feature_stride"] = cfg.feature_stride;
  resolved["align_to_prior"] = cfg.align_to_prior;
  resolved["shuffle_file_order"] = cfg.shuffle_file_order;
  resolved["seed"] = cfg.seed;
  const auto config = resolved.dump();

  const auto dir = out_dir(rc);
  const auto annotations = io::format_annotations(data.videos, config);
  const auto features = io::format_features(data.features, config);
  std::optional<std::string> scores;
  if (args.oracle_noise) {
    scores = io::format_scores(
        data.videos, oracle_scores(data.videos, cfg.noise_sigma, cfg.seed), config);
  }
  io::write_file_atomic(dir / "annotations.jsonl", annotations);
  io::write_file_atomic(dir / "features.jsonl", features);
  if (scores) io::write_file_atomic(dir / "scores.jsonl", *scores);

  std::size_t queries = 0;
  for (const auto& v : data.videos) queries += v.queries.size();
  out << "wrote " << data.videos.size() << " videos, " << queries
      << " queries to " << dir.string() << "\n";
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string annotations;
  std::string features;
  int hidden = 32;
  double learning_rate = 0.01;
  int epochs = 200;
};

void do_train(const RunConfig& rc, const TrainArgs& args, std::ostream& out) {
  if (rc.segments < 1) throw ValidationError("--segments must be >= 1");
  const auto dataset = io::read_annotations(args.annotations, rc.segments);
  const auto features = io::read_features(args.features);
  if (features.empty()) throw ValidationError("feature file holds no videos");

  ScorerConfig cfg;
  cfg.feature_dim = static_cast<int>(features.begin()->second.dim());
  cfg.hidden_dim = args.hidden;
  cfg.learning_rate = args.learning_rate;
  cfg.epochs = args.epochs;
  cfg.seed = rc.seed;
  cfg.validate();
  // Dimension and coverage problems surface here, before any training.
  const auto samples = build_training_set(dataset, features, cfg.feature_dim);
  if (samples.empty()) throw ValidationError("annotation file holds no queries");

  const auto result = train(samples, cfg, rc.jobs);
  const auto scores = score_dataset(result.model, dataset, features, rc.jobs);

  ordered_json resolved;
  resolved["command"] = "train";
  resolved["annotations"] = args.annotations;
  resolved["features"] = args.features;
  resolved["segments"] = rc.segments;
  resolved["feature_dim"] = cfg.feature_dim;
  resolved["hidden_dim"] = cfg.hidden_dim;
  resolved["learning_rate"] = cfg.learning_rate;
  resolved["epochs"] = cfg.epochs;
  resolved["seed"] = cfg.seed;
  const auto config = resolved.dump();

  const auto dir = out_dir(rc);
  const auto model_text = io::format_model(result.model, config);
  const auto loss_text = io::format_loss_curve(result.loss_curve, config);
  const auto score_text = io::format_scores(dataset, scores, config);
  io::write_file_atomic(dir / "model.json", model_text);
  io::write_file_atomic(dir / "loss.csv", loss_text);
  io::write_file_atomic(dir / "scores.jsonl", score_text);

  out << "trained on " << samples.size() << " queries for " << cfg.epochs
      << " epochs: loss " << result.loss_curve.front() << " -> "
      << result.loss_curve.back() << "\n";
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string annotations;
  std::string scores;
  bool no_prior = false;
};

void do_run(const RunConfig& rc, const RunArgs& args, std::ostream& out) {
  const auto cfg = pipeline_config(rc, !args.no_prior);
  const auto dataset = io::read_annotations(args.annotations, rc.segments);
  const auto scores = io::read_scores(args.scores);
  const auto result = run_pipeline(dataset, scores, cfg);

  auto resolved = run_config_json(rc);
  resolved["command"] = "run";
  resolved["annotations"] = args.annotations;
  resolved["scores"] = args.scores;
  resolved["prior"] = !args.no_prior;
  const auto config = resolved.dump();

  const auto dir = out_dir(rc);
  const auto predictions = io::format_predictions(result.predictions, config);
  const auto eval = io::format_eval(result.eval, config);
  io::write_file_atomic(dir / "predictions.jsonl", predictions);
  io::write_file_atomic(dir / "eval.json", eval);

  out << (args.no_prior ? "baseline (no prior)" : "with temporal-order prior")
      << ", alpha=" << rc.alpha;
  if (!args.no_prior) out << ", beta=" << rc.beta;
  out << "\n";
  print_recall_table(out, result.eval);
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string annotations;
  std::string scores;
  std::vector<std::string> alphas{"50", "70", "85", "90", "95"};
  std::vector<std::string> betas{"0.05", "0.1", "0.2", "0.5"};
  bool no_prior = false;
};

// Empty cells are dropped so that `--alphas ""` yields an empty grid.
std::vector<double> parse_grid(const std::vector<std::string>& cells,
                               const char* flag) {
  std::vector<double> grid;
  for (const auto& cell : cells) {
    if (cell.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size()) {
      throw UsageError(std::string(flag) + ": not a number: '" + cell + "'");
    }
    grid.push_back(v);
  }
  if (grid.empty()) throw UsageError(std::string(flag) + " grid must be non-empty");
  return grid;
}

void do_sweep(const RunConfig& rc, const SweepArgs& args, std::ostream& out) {
  const auto alphas = parse_grid(args.alphas, "--alphas");
  const auto betas = parse_grid(args.betas, "--betas");
  const auto base = pipeline_config(rc, !args.no_prior);
  const auto dataset = io::read_annotations(args.annotations, rc.segments);
  const auto scores = io::read_scores(args.scores);
  const auto table = sweep(dataset, scores, alphas, betas, base);

  auto resolved = run_config_json(rc);
  resolved.erase("alpha");
  resolved.erase("beta");
  resolved["command"] = "sweep";
  resolved["annotations"] = args.annotations;
  resolved["scores"] = args.scores;
  resolved["alphas"] = alphas;
  resolved["betas"] = betas;
  resolved["prior"] = !args.no_prior;
  const auto text = io::format_sweep(table, resolved.dump());
  io::write_file_atomic(out_dir(rc) / "sweep.json", text);

  out << std::setw(8) << "alpha" << std::setw(8) << "beta";
  for (const double t : table.thresholds) out << std::setw(14) << threshold_name(t);
  out << std::setw(14) << "mean len (s)" << "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    out << std::setw(8) << row.alpha << std::setw(8) << row.beta;
    for (const double v : row.recalls) out << std::setw(14) << percent(v);
    out << std::setw(14) << std::fixed << std::setprecision(3)
        << row.mean_interval_seconds << std::defaultfloat
        << (r == table.best ? "  *" : "") << "\n";
  }
  const auto& best = table.rows[table.best];
  out << "best: alpha=" << best.alpha << " beta=" << best.beta << "\n";
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string annotations;
  std::string predictions;
};

void do_eval(const RunConfig& rc, const EvalArgs& args, std::ostream& out) {
  if (rc.thresholds.empty()) throw ValidationError("no IoU thresholds given");
  const auto dataset = io::read_annotations(args.annotations, rc.segments);
  const auto predictions = io::read_predictions(args.predictions);
  const auto truth = annotation_intervals(dataset);
  const auto result = recall_at_1(predictions, truth, rc.thresholds);

  ordered_json resolved;
  resolved["command"] = "eval";
  resolved["annotations"] = args.annotations;
  resolved["predictions"] = args.predictions;
  resolved["thresholds"] = rc.thresholds;
  io::write_file_atomic(out_dir(rc) / "eval.json",
                        io::format_eval(result, resolved.dump()));
  print_recall_table(out, result);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Temporal step grounding toolkit: event-vector ground truth, "
               "temporal-order prior refinement, percentile interval "
               "extraction and Recall@1 evaluation"};
  app.require_subcommand(1);
  RunConfig rc;

  Command synth{app.add_subcommand("synth", "Generate a synthetic cyclic-activity dataset")};
  SynthArgs synth_args;
  {
    auto& c = synth_args.cfg;
    auto* a = synth.app;
    add_common(synth, rc);
    add_segments(synth, rc);
    synth.options["seed"] = a->add_option("--seed", rc.seed, "Random seed")->capture_default_str();
    a->add_option("--videos", c.num_videos, "Number of videos")->capture_default_str();
    a->add_option("--feature-range", c.feature_range, "Min and max clip features per video")
        ->capture_default_str();
    a->add_option("--steps", c.steps_per_video, "Min and max step occurrences per video")
        ->capture_default_str();
    a->add_option("--repeat-probability", c.repeat_probability,
                  "Probability that a step reuses an earlier step's text")
        ->capture_default_str();
    a->add_option("--feature-dim", c.feature_dim, "Feature dimension")->capture_default_str();
    a->add_option("--feature-noise", c.feature_noise, "Clip feature noise")->capture_default_str();
    a->add_option("--oracle-noise", synth_args.oracle_noise,
                  "Also write oracle scores with this noise level");
    a->add_flag("--align-to-prior", c.align_to_prior,
                "End occurrence j of k at segment round(j * S_i / k)");
    a->add_flag("--shuffle", c.shuffle_file_order, "Shuffle annotation order in the file");
  }

  Command train_cmd{app.add_subcommand("train", "Train the recurrent scorer with BCE")};
  TrainArgs train_args;
  {
    auto* a = train_cmd.app;
    add_common(train_cmd, rc);
    add_segments(train_cmd, rc);
    train_cmd.options["seed"] =
        a->add_option("--seed", rc.seed, "Initialisation seed")->capture_default_str();
    a->add_option("--annotations", train_args.annotations, "Annotation file")->required();
    a->add_option("--features", train_args.features, "Feature file")->required();
    a->add_option("--hidden", train_args.hidden, "Hidden units")->capture_default_str();
    a->add_option("--lr", train_args.learning_rate, "Learning rate")->capture_default_str();
    a->add_option("--epochs", train_args.epochs, "Full-batch epochs")->capture_default_str();
  }

  Command run_cmd{app.add_subcommand("run", "Refine scores, extract intervals and evaluate")};
  RunArgs run_args;
  {
    auto* a = run_cmd.app;
    add_common(run_cmd, rc);
    add_segments(run_cmd, rc);
    add_thresholds(run_cmd, rc);
    add_prior(run_cmd, rc);
    run_cmd.options["alpha"] =
        a->add_option("--alpha", rc.alpha, "Percentile level in (0, 100)")->capture_default_str();
    run_cmd.options["beta"] =
        a->add_option("--beta", rc.beta, "Prior spread factor")->capture_default_str();
    a->add_option("--annotations", run_args.annotations, "Annotation file")->required();
    a->add_option("--scores", run_args.scores, "Score file (.jsonl or .tsv)")->required();
    a->add_flag("--no-prior", run_args.no_prior, "Skip the temporal-order prior");
  }

  Command sweep_cmd{app.add_subcommand("sweep", "Grid search over alpha and beta")};
  SweepArgs sweep_args;
  {
    auto* a = sweep_cmd.app;
    add_common(sweep_cmd, rc);
    add_segments(sweep_cmd, rc);
    add_thresholds(sweep_cmd, rc);
    add_prior(sweep_cmd, rc);
    a->add_option("--annotations", sweep_args.annotations, "Annotation file")->required();
    a->add_option("--scores", sweep_args.scores, "Score file (.jsonl or .tsv)")->required();
    a->add_option("--alphas", sweep_args.alphas, "Alpha grid")->delimiter(',')->capture_default_str();
    a->add_option("--betas", sweep_args.betas, "Beta grid")->delimiter(',')->capture_default_str();
    a->add_flag("--no-prior", sweep_args.no_prior,
                "Skip the temporal-order prior; beta then has no effect");
  }

  Command eval_cmd{app.add_subcommand("eval", "Evaluate precomputed intervals")};
  EvalArgs eval_args;
  {
    auto* a = eval_cmd.app;
    add_common(eval_cmd, rc);
    add_segments(eval_cmd, rc);
    add_thresholds(eval_cmd, rc);
    a->add_option("--annotations", eval_args.annotations, "Annotation file")->required();
    a->add_option("--predictions", eval_args.predictions, "Prediction file")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth.app) {
      finish_config(synth, rc);
      do_synth(rc, synth_args, out);
    } else if (*train_cmd.app) {
      finish_config(train_cmd, rc);
      do_train(rc, train_args, out);
    } else if (*run_cmd.app) {
      finish_config(run_cmd, rc);
      do_run(rc, run_args, out);
    } else if (*sweep_cmd.app) {
      finish_config(sweep_cmd, rc);
      do_sweep(rc, sweep_args, out);
    } else if (*eval_cmd.app) {
      finish_config(eval_cmd, rc);
      do_eval(rc, eval_args, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const RangeError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const GenerationError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace bayesloc::cli
