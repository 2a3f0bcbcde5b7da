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

#include "bayesloc/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bayesloc/errors.hpp"

namespace bayesloc {

void PriorConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream err;
    err << "beta must be > 0 (got " << beta << ")";
    throw ValidationError(err.str());
  }
}

double PriorConfig::sigma(int num_segments) const {
  const double spread = num_segments * beta;
  return spread_is_std ? spread : std::sqrt(spread);
}

void validate_scores(std::span<const double> p) {
  if (p.empty()) throw ValidationError("score vector is empty");
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0.0 && p[k] <= 1.0)) {
      std::ostringstream err;
      err << "score at segment " << k + 1 << " is " << p[k]
          << ", expected a value in [0, 1]";
      throw ValidationError(err.str());
    }
  }
}

namespace {

void check_prior_args(int j, int m, int num_segments, const PriorConfig& cfg) {
  cfg.validate();
  if (m < 1 || j < 1 || j > m) {
    throw RangeError("prior order index " + std::to_string(j) +
                     " outside [1, " + std::to_string(m) + "]");
  }
  if (num_segments < 1) throw RangeError("prior needs at least one segment");
}

double density(double k, double mu, double sigma) {
  const double z = (k - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double prior_density(double k, int j, int m, int num_segments,
                     const PriorConfig& cfg) {
  check_prior_args(j, m, num_segments, cfg);
  const double mu = static_cast<double>(j) * num_segments / m;
  return density(k, mu, cfg.sigma(num_segments));
}

std::vector<double> gaussian_prior(int j, int m, int num_segments,
                                   const PriorConfig& cfg) {
  check_prior_args(j, m, num_segments, cfg);
  const double mu = static_cast<double>(j) * num_segments / m;
  const double sigma = cfg.sigma(num_segments);
  std::vector<double> q(static_cast<std::size_t>(num_segments));
  for (int k = 1; k <= num_segments; ++k) q[k - 1] = density(k, mu, sigma);
  return q;
}

ScoreVector apply_posterior(std::span<const double> p,
                            std::span<const double> q) {
  if (p.size() != q.size()) {
    throw ValidationError("posterior: score length " +
                          std::to_string(p.size()) + " != prior length " +
                          std::to_string(q.size()));
  }
  if (q.empty()) throw ValidationError("posterior: empty prior");
  // Far tails may underflow to zero; negative or non-finite values may not.
  for (const double v : q) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("posterior: prior values must be finite and >= 0");
    }
  }
  const double q_max = *std::max_element(q.begin(), q.end());
  if (!(q_max > 0.0)) {
    throw ValidationError("posterior: prior must have a positive maximum");
  }
  ScoreVector out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    // Exactly p at the prior's argmax: q / q_max == 1.0 there.
    out[k] = p[k] * (q[k] / q_max);
  }
  return out;
}

std::vector<int> temporal_order(std::span<const QueryAnnotation> queries) {
  std::vector<std::size_t> idx(queries.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& qa = queries[a];
    const auto& qb = queries[b];
    if (qa.start_s != qb.start_s) return qa.start_s < qb.start_s;
    if (qa.end_s != qb.end_s) return qa.end_s < qb.end_s;
    if (qa.text != qb.text) return qa.text < qb.text;
    return qa.query_id < qb.query_id;
  });
  std::vector<int> rank(queries.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    rank[idx[r]] = static_cast<int>(r) + 1;
  }
  return rank;
}

std::vector<ScoreVector> refine_video(std::span<const ScoreVector> scores,
                                      std::span<const QueryAnnotation> queries,
                                      const PriorConfig& cfg) {
  cfg.validate();
  if (scores.size() != queries.size()) {
    throw ValidationError("refine: " + std::to_string(scores.size()) +
                          " score vectors for " +
                          std::to_string(queries.size()) + " annotations");
  }
  std::vector<ScoreVector> out;
  out.reserve(scores.size());
  if (scores.empty()) return out;

  const auto num_segments = scores.front().size();
  const int m = static_cast<int>(queries.size());
  const auto rank = temporal_order(queries);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].size() != num_segments) {
      throw ValidationError("refine: score vectors of one video differ in length");
    }
    validate_scores(scores[i]);
    const auto q =
        gaussian_prior(rank[i], m, static_cast<int>(num_segments), cfg);
    out.push_back(apply_posterior(scores[i], q));
  }
  return out;
}

}  // namespace bayesloc
