/*
 * Copyright 2026 The Blindspot Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "blindspot/gp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blindspot/errors.hpp"

namespace blindspot {
namespace {

constexpr double kMaxJitter = 1e-5;

Eigen::MatrixXd cross_covariance(const GPConfig& config,
                                 const std::vector<ModificationPoint>& inputs,
                                 const PointSet& candidates) {
  Eigen::MatrixXd k(inputs.size(), candidates.size());
  for (Eigen::Index c = 0; c < k.cols(); ++c) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      k(i, c) = se_kernel(config, inputs[i].coords(), candidates[c].coords());
    }
  }
  return k;
}

}  // namespace

void GPConfig::validate() const {
  if (!(length_scale > 0.0)) throw ConfigError("gp: length_scale must be > 0");
  if (!(signal_variance > 0.0)) throw ConfigError("gp: signal_variance must be > 0");
  if (!(noise_variance >= 0.0)) throw ConfigError("gp: noise_variance must be >= 0");
  if (!(jitter >= 0.0)) throw ConfigError("gp: jitter must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("gp: beta must be >= 0");
  if (candidate_count < 16) throw ConfigError("gp: candidate_count must be >= 16");
}

double se_kernel(const GPConfig& config, std::span<const double> u, std::span<const double> v) {
  double d2 = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double d = u[j] - v[j];
    d2 += d * d;
  }
  return config.signal_variance *
         std::exp(-d2 / (2.0 * config.length_scale * config.length_scale));
}

GPModel::GPModel(GPConfig config) : config_(config) { config_.validate(); }

Eigen::MatrixXd GPModel::factor() const {
  if (inputs_.empty()) return Eigen::MatrixXd(0, 0);
  return llt_.matrixL();
}

Posterior GPModel::predict(const ModificationPoint& u) const {
  PointSet one{u.size(), {u}};
  return predict(one).front();
}

std::vector<Posterior> GPModel::predict(const PointSet& candidates) const {
  std::vector<Posterior> out(candidates.size());
  if (inputs_.empty()) {
    for (auto& p : out) p = {0.0, config_.signal_variance};
    return out;
  }
  const Eigen::MatrixXd k_star = cross_covariance(config_, inputs_, candidates);
  const Eigen::VectorXd mean = k_star.transpose() * alpha_;
  const Eigen::MatrixXd v = llt_.matrixL().solve(k_star);
  const Eigen::VectorXd reduction = v.colwise().squaredNorm();
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    out[c].mean = mean(ci);
    out[c].variance = std::max(0.0, config_.signal_variance - reduction(ci));
  }
  return out;
}

GPModel gp_fit(const GPConfig& config, const PointSet& inputs,
               std::span<const double> observations) {
  if (inputs.size() != observations.size()) {
    throw DimensionMismatch(inputs.size(), observations.size());
  }
  GPModel model(config);
  const auto t = static_cast<Eigen::Index>(inputs.size());
  if (t == 0) return model;

  Eigen::MatrixXd k(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = se_kernel(config, inputs[i].coords(), inputs[j].coords());
    }
  }
  double jitter = config.jitter;
  for (;;) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += config.noise_variance + jitter;
    model.llt_.compute(a);
    if (model.llt_.info() == Eigen::Success) break;
    if (jitter == 0.0 || jitter * 10.0 > kMaxJitter * (1.0 + 1e-12)) {
      throw SingularKernel("kernel matrix is not positive definite (t = " + std::to_string(t) +
                           ", jitter = " + std::to_string(jitter) + ")");
    }
    jitter *= 10.0;
  }
  model.effective_jitter_ = jitter;
  model.inputs_ = inputs.points;
  model.y_ = Eigen::Map<const Eigen::VectorXd>(observations.data(), t);
  model.alpha_ = model.llt_.solve(model.y_);
  return model;
}

double lower_confidence_bound(const Posterior& p, double beta) {
  return p.mean - std::sqrt(beta) * std::sqrt(p.variance);
}

Acquisition acquire_lcb(const GPModel& model, const PointSet& candidates) {
  if (candidates.empty()) throw ConfigError("acquire_lcb needs at least one candidate");
  const auto posts = model.predict(candidates);
  Acquisition best{0, candidates[0], lower_confidence_bound(posts[0], model.config().beta)};
  for (std::size_t c = 1; c < posts.size(); ++c) {
    const double lcb = lower_confidence_bound(posts[c], model.config().beta);
    if (lcb < best.lcb) best = {c, candidates[c], lcb};
  }
  return best;
}

}  // namespace blindspot
