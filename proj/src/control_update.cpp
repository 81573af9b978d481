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

#include "spdectl/control_update.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "spdectl/error.hpp"

namespace spdectl {

double RolloutBatch::mean_cost() const {
  double acc = 0.0;
  int n = 0;
  for (const RolloutRecord& r : rollouts) {
    if (!r.ok) continue;
    acc += r.cost;
    ++n;
  }
  return n > 0 ? acc / n : std::numeric_limits<double>::quiet_NaN();
}

double RolloutBatch::mean_cost_tilde() const {
  double acc = 0.0;
  int n = 0;
  for (const RolloutRecord& r : rollouts) {
    if (!r.ok) continue;
    acc += r.cost_tilde();
    ++n;
  }
  return n > 0 ? acc / n : std::numeric_limits<double>::quiet_NaN();
}

double zeta(const ControlSequence& controls, const RowMatrix& deltas, const Eigen::MatrixXd& gram, double rho) {
  if (deltas.rows() != controls.u.rows() || deltas.cols() != controls.u.cols()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("deltas are {}x{}, controls are {}x{}", deltas.rows(),
                                                      deltas.cols(), controls.u.rows(), controls.u.cols()));
  }
  if (gram.rows() != controls.u.cols() || gram.cols() != controls.u.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "Gram matrix does not match the actuator count");
  }
  double linear = 0.0;
  double quadratic = 0.0;
  for (Eigen::Index k = 0; k < controls.u.rows(); ++k) {
    const auto u = controls.u.row(k);
    linear += u.dot(deltas.row(k));
    quadratic += u * gram * u.transpose();
  }
  return linear / std::sqrt(rho) + 0.5 * quadratic * controls.dt;
}

std::vector<double> importance_weights(std::span<const double> costs_tilde, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be > 0");
  double lowest = std::numeric_limits<double>::infinity();
  for (double c : costs_tilde) {
    if (std::isfinite(c)) lowest = std::min(lowest, c);
  }
  if (!std::isfinite(lowest)) throw Error(ErrorCode::AllRolloutsFailed, "every rollout cost is non-finite");
  std::vector<double> w(costs_tilde.size(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < costs_tilde.size(); ++r) {
    if (!std::isfinite(costs_tilde[r])) continue;
    w[r] = std::exp(-rho * (costs_tilde[r] - lowest));
    total += w[r];
  }
  for (double& v : w) v /= total;
  return w;
}

RolloutBatch weigh_batch(std::vector<RolloutRecord> rollouts, double rho) {
  RolloutBatch batch;
  std::vector<double> costs(rollouts.size());
  for (std::size_t r = 0; r < rollouts.size(); ++r) {
    const bool usable = rollouts[r].ok && std::isfinite(rollouts[r].cost_tilde());
    costs[r] = usable ? rollouts[r].cost_tilde() : std::numeric_limits<double>::infinity();
    if (!usable) ++batch.failed;
  }
  batch.weights = importance_weights(costs, rho);
  double sq = 0.0;
  for (double w : batch.weights) sq += w * w;
  batch.effective_sample_size = 1.0 / sq;
  batch.rollouts = std::move(rollouts);
  return batch;
}

namespace {

void check_batch(const RolloutBatch& batch, int steps, int actuators) {
  if (batch.rollouts.size() != batch.weights.size()) {
    throw Error(ErrorCode::ShapeMismatch, "batch weights and rollouts differ in length");
  }
  for (std::size_t r = 0; r < batch.rollouts.size(); ++r) {
    if (batch.weights[r] == 0.0) continue;
    const RowMatrix& d = batch.rollouts[r].deltas;
    if (d.rows() != steps || d.cols() != actuators) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("rollout {} has {}x{} deltas, expected {}x{}", r, d.rows(),
                                                        d.cols(), steps, actuators));
    }
  }
}

Eigen::VectorXd weighted_delta(const RolloutBatch& batch, int step, int actuators) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(actuators);
  for (std::size_t r = 0; r < batch.rollouts.size(); ++r) {
    const double w = batch.weights[r];
    if (w == 0.0) continue;
    acc.noalias() += w * batch.rollouts[r].deltas.row(step).transpose();
  }
  return acc;
}

}  // namespace

ControlSequence update_controls(const ControlSequence& previous, const RolloutBatch& batch,
                                const ActuatorSet& actuators, double rho) {
  if (previous.actuators() != actuators.count()) {
    throw Error(ErrorCode::ShapeMismatch, "control sequence does not match the actuator count");
  }
  check_batch(batch, previous.steps(), previous.actuators());
  const double gain = 1.0 / (std::sqrt(rho) * previous.dt);
  ControlSequence next = previous;
  for (int j = 0; j < previous.steps(); ++j) {
    const Eigen::VectorXd step = actuators.solve(weighted_delta(batch, j, actuators.count()));
    next.u.row(j) += gain * step.transpose();
  }
  return next;
}

ControlSequence one_shot_optimal_controls(const RolloutBatch& batch, const ActuatorSet& actuators, double rho,
                                          double dt) {
  if (batch.rollouts.empty()) throw Error(ErrorCode::InsufficientSamples, "empty batch");
  int steps = -1;
  for (std::size_t r = 0; r < batch.rollouts.size(); ++r) {
    if (batch.weights[r] != 0.0) {
      steps = static_cast<int>(batch.rollouts[r].deltas.rows());
      break;
    }
  }
  if (steps < 0) throw Error(ErrorCode::AllRolloutsFailed, "no weighted rollout in batch");
  check_batch(batch, steps, actuators.count());
  const double gain = 1.0 / (std::sqrt(rho) * dt);
  ControlSequence out(steps, actuators.count(), dt);
  for (int j = 0; j < steps; ++j) {
    const Eigen::VectorXd step = actuators.solve(weighted_delta(batch, j, actuators.count()));
    out.u.row(j) = gain * step.transpose();
  }
  return out;
}

}  // namespace spdectl
