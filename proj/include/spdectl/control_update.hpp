/*
 Copyright 2026 The spdectl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spdectl/actuators.hpp"
#include "spdectl/noise_model.hpp"

namespace spdectl {

/// What one sampled rollout contributes to an update.
struct RolloutRecord {
  bool ok = false;
  double cost = 0.0;  // J
  double zeta = 0.0;  // control-path correction
  RowMatrix deltas;   // L x N, row j = delta u~_j
  Eigen::VectorXd terminal;
  std::string failure;

  double cost_tilde() const noexcept { return cost + zeta; }
};

/// Rollouts plus their normalized importance weights (failed rollouts carry weight 0).
struct RolloutBatch {
  std::vector<RolloutRecord> rollouts;
  std::vector<double> weights;
  double effective_sample_size = 0.0;
  int failed = 0;

  double mean_cost() const;
  double mean_cost_tilde() const;
};

/// zeta = rho^{-1/2} sum_k u_k . du_k + 1/2 sum_k u_k' M u_k dt.
double zeta(const ControlSequence& controls, const RowMatrix& deltas, const Eigen::MatrixXd& gram, double rho);

/// w_r = exp(-rho (c_r - min c)) / sum_q exp(-rho (c_q - min c)); non-finite costs get 0.
/// Throws all-rollouts-failed when no cost is finite.
std::vector<double> importance_weights(std::span<const double> costs_tilde, double rho);

/// Weighs the rollouts by exp(-rho J~).
RolloutBatch weigh_batch(std::vector<RolloutRecord> rollouts, double rho);

/// u_j <- u_j + (rho^{-1/2} / dt) M^{-1} sum_r w_r du_j^(r), reduced in rollout order.
ControlSequence update_controls(const ControlSequence& previous, const RolloutBatch& batch,
                                const ActuatorSet& actuators, double rho);

/// u_j = (rho^{-1/2} / dt) M^{-1} E[w du_j] from a batch sampled without control.
ControlSequence one_shot_optimal_controls(const RolloutBatch& batch, const ActuatorSet& actuators, double rho,
                                          double dt);

}  // namespace spdectl
