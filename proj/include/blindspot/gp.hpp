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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "blindspot/modspace.hpp"
#include "blindspot/samplers.hpp"

namespace blindspot {

struct GPConfig {
  double signal_variance = 1.0;  // sigma_f^2
  double length_scale = 0.2;     // isotropic, in unit-cube coordinates
  double noise_variance = 1e-4;  // sigma^2
  double jitter = 1e-9;
  double beta = 4.0;
  std::size_t candidate_count = 4096;

  /// Throws ConfigError.
  void validate() const;
};

/// Squared-exponential covariance sigma_f^2 exp(-|u-v|^2 / (2 l^2)).
double se_kernel(const GPConfig& config, std::span<const double> u, std::span<const double> v);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// Zero-mean GP regression over [0,1]^n with a Cholesky factorization of
/// K + (sigma^2 + jitter) I. Immutable once fitted; predictions are safe to
/// run concurrently.
class GPModel {
 public:
  /// The empty (prior-only) model.
  explicit GPModel(GPConfig config);

  const GPConfig& config() const { return config_; }
  std::size_t size() const { return inputs_.size(); }
  const std::vector<ModificationPoint>& inputs() const { return inputs_; }
  const Eigen::VectorXd& observations() const { return y_; }
  /// Lower-triangular factor L with L L^T = K + (sigma^2 + jitter) I.
  Eigen::MatrixXd factor() const;
  const Eigen::VectorXd& alpha() const { return alpha_; }
  /// Jitter actually added to the diagonal after escalation.
  double effective_jitter() const { return effective_jitter_; }

  Posterior predict(const ModificationPoint& u) const;
  /// Batched prediction; row-wise equivalent to predict().
  std::vector<Posterior> predict(const PointSet& candidates) const;

 private:
  friend GPModel gp_fit(const GPConfig&, const PointSet&, std::span<const double>);

  GPConfig config_;
  std::vector<ModificationPoint> inputs_;
  Eigen::VectorXd y_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double effective_jitter_ = 0.0;
};

/// Factorizes the kernel matrix, escalating jitter tenfold up to 1e-5 when
/// the factorization fails. Throws SingularKernel if it still fails,
/// DimensionMismatch when |inputs| != |observations|.
GPModel gp_fit(const GPConfig& config, const PointSet& inputs,
               std::span<const double> observations);

struct Acquisition {
  std::size_t index = 0;
  ModificationPoint point;
  double lcb = 0.0;
};

double lower_confidence_bound(const Posterior& p, double beta);

/// argmin over candidates of mean - sqrt(beta) * stddev; ties go to the
/// lowest index. Throws ConfigError for an empty candidate set.
Acquisition acquire_lcb(const GPModel& model, const PointSet& candidates);

}  // namespace blindspot
