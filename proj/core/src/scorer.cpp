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

#include "bayesloc/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bayesloc/errors.hpp"
#include "bayesloc/parallel.hpp"

namespace bayesloc {
namespace {

// Block order in the flat parameter vector.
enum Block : std::size_t {
  kInputWeight,
  kInputBias,
  kUpdateX,
  kUpdateH,
  kUpdateBias,
  kResetX,
  kResetH,
  kResetBias,
  kCandidateX,
  kCandidateH,
  kCandidateBias,
  kReadoutWeight,
  kReadoutBias,
  kNumBlocks,
};

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

// out += W v, W is rows x cols row-major.
void matvec_add(std::span<double> out, const double* w, std::span<const double> v) {
  const std::size_t cols = v.size();
  for (std::size_t r = 0; r < out.size(); ++r) {
    double acc = 0.0;
    const double* row = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * v[c];
    out[r] += acc;
  }
}

// out += W^T v.
void matvec_t_add(std::span<double> out, const double* w, std::span<const double> v) {
  const std::size_t cols = out.size();
  for (std::size_t r = 0; r < v.size(); ++r) {
    const double* row = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * v[r];
  }
}

// G += scale * a b^T.
void outer_add(double* g, std::span<const double> a, std::span<const double> b,
               double scale) {
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double ar = scale * a[r];
    double* row = g + r * b.size();
    for (std::size_t c = 0; c < b.size(); ++c) row[c] += ar * b[c];
  }
}

void axpy(double* g, std::span<const double> a, double scale) {
  for (std::size_t i = 0; i < a.size(); ++i) g[i] += scale * a[i];
}

struct StepCache {
  std::vector<double> input;  // [feature ; query], 2d
  std::vector<double> x;      // projected input, H
  std::vector<double> h_prev, z, r, c, h;
  double y = 0.0;
};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void check_inputs(const ScorerConfig& cfg, const FeatureMatrix& features,
                  std::span<const double> query) {
  const auto d = static_cast<std::size_t>(cfg.feature_dim);
  if (features.rows() == 0) throw ValidationError("scorer: no segments");
  if (features.dim() != d || query.size() != d) {
    throw ValidationError("scorer: expected feature_dim " + std::to_string(d) +
                          ", got features of dim " +
                          std::to_string(features.dim()) +
                          " and query of dim " + std::to_string(query.size()));
  }
}

}  // namespace

void ScorerConfig::validate() const {
  std::ostringstream err;
  if (feature_dim < 1) {
    err << "feature_dim must be >= 1 (got " << feature_dim << ")";
  } else if (hidden_dim < 1) {
    err << "hidden_dim must be >= 1 (got " << hidden_dim << ")";
  } else if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    err << "learning_rate must be >= 0 (got " << learning_rate << ")";
  } else if (epochs < 0) {
    err << "epochs must be >= 0 (got " << epochs << ")";
  } else {
    return;
  }
  throw ValidationError("scorer config: " + err.str());
}

std::vector<ParameterBlock> scorer_layout(const ScorerConfig& cfg) {
  const auto d = static_cast<std::size_t>(cfg.feature_dim);
  const auto h = static_cast<std::size_t>(cfg.hidden_dim);
  const std::pair<const char*, std::pair<std::size_t, std::size_t>> shapes[] = {
      {"input.weight", {h, 2 * d}},    {"input.bias", {h, 1}},
      {"update.weight_x", {h, h}},     {"update.weight_h", {h, h}},
      {"update.bias", {h, 1}},         {"reset.weight_x", {h, h}},
      {"reset.weight_h", {h, h}},      {"reset.bias", {h, 1}},
      {"candidate.weight_x", {h, h}},  {"candidate.weight_h", {h, h}},
      {"candidate.bias", {h, 1}},      {"readout.weight", {1, h}},
      {"readout.bias", {1, 1}},
  };
  static_assert(std::size(shapes) == kNumBlocks);
  std::vector<ParameterBlock> layout;
  std::size_t offset = 0;
  for (const auto& [name, shape] : shapes) {
    layout.push_back({name, offset, shape.first, shape.second});
    offset += shape.first * shape.second;
  }
  return layout;
}

ScorerModel::ScorerModel(const ScorerConfig& cfg)
    : config_((cfg.validate(), cfg)), layout_(scorer_layout(cfg)) {
  params_.assign(layout_.back().offset + layout_.back().size(), 0.0);
}

ScorerModel ScorerModel::initialize(const ScorerConfig& cfg) {
  ScorerModel model(cfg);
  std::mt19937_64 rng(cfg.seed);
  for (const auto& block : model.layout_) {
    if (block.cols == 1 && block.name.ends_with("bias")) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(block.cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < block.size(); ++i) {
      model.params_[block.offset + i] = dist(rng);
    }
  }
  return model;
}

namespace {

// Shared forward pass; fills `cache` when non-null.
ScoreVector run_forward(const ScorerConfig& cfg,
                        const std::vector<ParameterBlock>& layout,
                        std::span<const double> params,
                        const FeatureMatrix& features,
                        std::span<const double> query,
                        std::vector<StepCache>* cache) {
  check_inputs(cfg, features, query);
  const auto d = static_cast<std::size_t>(cfg.feature_dim);
  const auto hd = static_cast<std::size_t>(cfg.hidden_dim);
  auto p = [&](Block b) { return params.data() + layout[b].offset; };

  std::vector<double> h(hd, 0.0);
  std::vector<double> input(2 * d);
  std::copy(query.begin(), query.end(), input.begin() + d);
  std::vector<double> x(hd), az(hd), ar(hd), ac(hd), rh(hd);
  ScoreVector out(features.rows());
  if (cache) cache->resize(features.rows());

  for (std::size_t k = 0; k < features.rows(); ++k) {
    const auto f = features.row(k);
    std::copy(f.begin(), f.end(), input.begin());

    std::copy(p(kInputBias), p(kInputBias) + hd, x.begin());
    matvec_add(x, p(kInputWeight), input);

    std::copy(p(kUpdateBias), p(kUpdateBias) + hd, az.begin());
    matvec_add(az, p(kUpdateX), x);
    matvec_add(az, p(kUpdateH), h);
    std::copy(p(kResetBias), p(kResetBias) + hd, ar.begin());
    matvec_add(ar, p(kResetX), x);
    matvec_add(ar, p(kResetH), h);

    std::vector<double> z(hd), r(hd), c(hd), h_next(hd);
    for (std::size_t i = 0; i < hd; ++i) {
      z[i] = sigmoid(az[i]);
      r[i] = sigmoid(ar[i]);
      rh[i] = r[i] * h[i];
    }
    std::copy(p(kCandidateBias), p(kCandidateBias) + hd, ac.begin());
    matvec_add(ac, p(kCandidateX), x);
    matvec_add(ac, p(kCandidateH), rh);
    double logit = *p(kReadoutBias);
    for (std::size_t i = 0; i < hd; ++i) {
      c[i] = std::tanh(ac[i]);
      h_next[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
      logit += p(kReadoutWeight)[i] * h_next[i];
    }
    out[k] = sigmoid(logit);

    if (cache) {
      auto& step = (*cache)[k];
      step.input = input;
      step.x = x;
      step.h_prev = h;
      step.z = std::move(z);
      step.r = std::move(r);
      step.c = std::move(c);
      step.h = h_next;
      step.y = out[k];
    }
    h = std::move(h_next);
  }
  return out;
}

}  // namespace

ScoreVector ScorerModel::forward(const FeatureMatrix& features,
                                 std::span<const double> query) const {
  return run_forward(config_, layout_, params_, features, query, nullptr);
}

double ScorerModel::loss_and_gradient(const TrainingSample& sample,
                                      std::span<double> grad,
                                      double weight) const {
  if (grad.size() != params_.size()) {
    throw ValidationError("gradient buffer has wrong size");
  }
  if (sample.target.size() != sample.features.rows()) {
    throw ValidationError("target length " + std::to_string(sample.target.size()) +
                          " != segment count " +
                          std::to_string(sample.features.rows()));
  }
  std::vector<StepCache> cache;
  const auto y = run_forward(config_, layout_, params_, sample.features,
                             sample.query, &cache);
  const double loss = bce_loss(y, sample.target);

  const auto hd = static_cast<std::size_t>(config_.hidden_dim);
  const auto steps = cache.size();
  auto p = [&](Block b) { return params_.data() + layout_[b].offset; };
  auto g = [&](Block b) { return grad.data() + layout_[b].offset; };

  std::vector<double> dh_next(hd, 0.0), dh(hd), daz(hd), dar(hd), dac(hd),
      drh(hd), dx(hd), rh(hd);
  for (std::size_t k = steps; k-- > 0;) {
    const auto& s = cache[k];
    // Gradient of the unclamped BCE with respect to the logit.
    const double dlogit =
        weight * (s.y - sample.target[k]) / static_cast<double>(steps);
    *g(kReadoutBias) += dlogit;
    axpy(g(kReadoutWeight), s.h, dlogit);

    for (std::size_t i = 0; i < hd; ++i) {
      dh[i] = p(kReadoutWeight)[i] * dlogit + dh_next[i];
      const double dz = dh[i] * (s.c[i] - s.h_prev[i]);
      daz[i] = dz * s.z[i] * (1.0 - s.z[i]);
      const double dc = dh[i] * s.z[i];
      dac[i] = dc * (1.0 - s.c[i] * s.c[i]);
      dh_next[i] = dh[i] * (1.0 - s.z[i]);
      rh[i] = s.r[i] * s.h_prev[i];
    }

    // Candidate.
    outer_add(g(kCandidateX), dac, s.x, 1.0);
    outer_add(g(kCandidateH), dac, rh, 1.0);
    axpy(g(kCandidateBias), dac, 1.0);
    std::fill(drh.begin(), drh.end(), 0.0);
    matvec_t_add(drh, p(kCandidateH), dac);
    for (std::size_t i = 0; i < hd; ++i) {
      dh_next[i] += drh[i] * s.r[i];
      dar[i] = drh[i] * s.h_prev[i] * s.r[i] * (1.0 - s.r[i]);
    }

    // Reset gate.
    outer_add(g(kResetX), dar, s.x, 1.0);
    outer_add(g(kResetH), dar, s.h_prev, 1.0);
    axpy(g(kResetBias), dar, 1.0);
    matvec_t_add(dh_next, p(kResetH), dar);

    // Update gate.
    outer_add(g(kUpdateX), daz, s.x, 1.0);
    outer_add(g(kUpdateH), daz, s.h_prev, 1.0);
    axpy(g(kUpdateBias), daz, 1.0);
    matvec_t_add(dh_next, p(kUpdateH), daz);

    // Input projection.
    std::fill(dx.begin(), dx.end(), 0.0);
    matvec_t_add(dx, p(kUpdateX), daz);
    matvec_t_add(dx, p(kResetX), dar);
    matvec_t_add(dx, p(kCandidateX), dac);
    outer_add(g(kInputWeight), dx, s.input, 1.0);
    axpy(g(kInputBias), dx, 1.0);
  }
  return loss;
}

double bce_loss(std::span<const double> p_hat, std::span<const double> p) {
  if (p_hat.size() != p.size()) {
    throw ValidationError("bce: prediction length " +
                          std::to_string(p_hat.size()) + " != target length " +
                          std::to_string(p.size()));
  }
  if (p.empty()) throw ValidationError("bce: empty vectors");
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double y = std::clamp(p_hat[k], kBceEpsilon, 1.0 - kBceEpsilon);
    total -= p[k] * std::log(y) + (1.0 - p[k]) * std::log(1.0 - y);
  }
  return total / static_cast<double>(p.size());
}

namespace {

// Mean loss over the dataset and its gradient. Each sample writes its own
// buffer; the reduction runs in sample order.
double dataset_loss_and_gradient(const ScorerModel& model,
                                 std::span<const TrainingSample> dataset,
                                 std::span<double> grad,
                                 std::vector<std::vector<double>>& scratch,
                                 std::vector<double>& losses, int jobs) {
  const double weight = 1.0 / static_cast<double>(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t i) {
    auto& g = scratch[i];
    std::fill(g.begin(), g.end(), 0.0);
    losses[i] = model.loss_and_gradient(dataset[i], g, weight);
  });
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    loss += weight * losses[i];
    for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += scratch[i][p];
  }
  return loss;
}

}  // namespace

TrainResult train(std::span<const TrainingSample> dataset,
                  const ScorerConfig& cfg, int jobs) {
  cfg.validate();
  if (dataset.empty()) throw ValidationError("training set is empty");
  for (const auto& sample : dataset) {
    check_inputs(cfg, sample.features, sample.query);
    if (sample.target.size() != sample.features.rows()) {
      throw ValidationError("training sample target/segment length mismatch");
    }
  }

  TrainResult result{ScorerModel::initialize(cfg), {}};
  auto& model = result.model;
  std::vector<double> grad(model.parameters().size());
  std::vector<std::vector<double>> scratch(dataset.size(),
                                           std::vector<double>(grad.size()));
  std::vector<double> losses(dataset.size());
  result.loss_curve.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
  for (int epoch = 0;; ++epoch) {
    const double loss = dataset_loss_and_gradient(model, dataset, grad, scratch, losses, jobs);
    if (!std::isfinite(loss)) {
      throw TrainingError("training diverged: non-finite loss at epoch " +
                              std::to_string(epoch),
                          epoch);
    }
    result.loss_curve.push_back(loss);
    if (epoch == cfg.epochs) break;
    auto params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= cfg.learning_rate * grad[i];
    }
  }
  return result;
}

double grad_check(const ScorerModel& model, const TrainingSample& sample,
                  double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw ValidationError("grad_check epsilon must lie in [1e-7, 1e-3]");
  }
  std::vector<double> analytic(model.parameters().size(), 0.0);
  model.loss_and_gradient(sample, analytic);

  ScorerModel probe = model;
  auto params = probe.parameters();
  auto loss_at = [&] {
    return bce_loss(probe.forward(sample.features, sample.query), sample.target);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + epsilon;
    const double plus = loss_at();
    params[i] = saved - epsilon;
    const double minus = loss_at();
    params[i] = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), kGradCheckFloor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

std::vector<double> query_embedding(std::string_view text, int dim) {
  if (dim < 1) throw ValidationError("embedding dim must be >= 1");
  std::mt19937_64 rng(fnv1a(normalize_text(text)));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

namespace {

const FeatureMatrix& features_for(const FeatureTable& features,
                                  const VideoMeta& meta) {
  const auto it = features.find(meta.video_id);
  if (it == features.end()) {
    throw ValidationError("no features for video '" + meta.video_id + "'");
  }
  return it->second;
}

}  // namespace

std::vector<TrainingSample> build_training_set(const Dataset& dataset,
                                               const FeatureTable& features,
                                               int feature_dim) {
  validate_dataset(dataset);
  std::vector<TrainingSample> out;
  for (const auto& video : dataset) {
    const auto& raw = features_for(features, video.meta);
    if (raw.dim() != static_cast<std::size_t>(feature_dim)) {
      throw ValidationError("video '" + video.meta.video_id +
                            "': feature dim " + std::to_string(raw.dim()) +
                            " != configured " + std::to_string(feature_dim));
    }
    const auto pooled = downsample_features(raw, video.meta);
    const auto events = build_event_vectors(video.queries, video.meta);
    for (std::size_t i = 0; i < video.queries.size(); ++i) {
      out.push_back({pooled, query_embedding(video.queries[i].text, feature_dim),
                     std::vector<double>(events[i].begin(), events[i].end())});
    }
  }
  return out;
}

ScoreTable score_dataset(const ScorerModel& model, const Dataset& dataset,
                         const FeatureTable& features, int jobs) {
  validate_dataset(dataset);
  const int dim = model.config().feature_dim;
  std::vector<std::vector<ScoreVector>> per_video(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t v) {
    const auto& video = dataset[v];
    const auto pooled = downsample_features(features_for(features, video.meta),
                                            video.meta);
    for (const auto& q : video.queries) {
      per_video[v].push_back(model.forward(pooled, query_embedding(q.text, dim)));
    }
  });
  ScoreTable table;
  for (std::size_t v = 0; v < dataset.size(); ++v) {
    const auto& video = dataset[v];
    for (std::size_t i = 0; i < video.queries.size(); ++i) {
      table.emplace(QueryKey{video.meta.video_id, video.queries[i].query_id},
                    std::move(per_video[v][i]));
    }
  }
  return table;
}

}  // namespace bayesloc
