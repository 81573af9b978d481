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

#include <cstdint>
#include <optional>
#include <vector>

#include "spdectl/actuators.hpp"
#include "spdectl/batch.hpp"
#include "spdectl/control_update.hpp"
#include "spdectl/cost.hpp"
#include "spdectl/spde_sim.hpp"

namespace spdectl {

struct IterationSummary {
  int iteration = 0;
  double mean_cost = 0.0;        // mean J over successful rollouts
  double mean_cost_tilde = 0.0;  // mean J + zeta
  double effective_sample_size = 0.0;
  int failed = 0;
};

/// Open-loop trajectory optimization: I rounds of R sampled rollouts, each followed by the
/// importance-weighted control update.
struct OptimRun {
  SimConfig config;
  ActuatorSet actuators;
  CostSpec cost;
  int iterations = 100;
  int rollouts = 100;
  std::uint64_t seed = 0;
  std::optional<ControlSequence> initial_controls;  // zero when unset

  std::vector<ControlSequence> controls_history;  // controls after each iteration
  std::vector<IterationSummary> cost_history;     // statistics of the batch sampled in each iteration

  ControlSequence start_controls() const;
  const ControlSequence& final_controls() const;
};

/// Runs all iterations in place. Iteration i, rollout r draws from (seed, train, i, r).
/// On all-rollouts-failed the error propagates and the histories keep the completed iterations.
void open_loop_optimize(OptimRun& run);

/// Core loop shared by the open-loop and MPC drivers; rollouts draw from prefix.child(i).child(r).
ControlSequence optimize_controls(const SimConfig& config, const ActuatorSet& actuators, const CostSpec& cost,
                                  ControlSequence start, int iterations, int rollouts, const StreamKey& prefix,
                                  std::vector<IterationSummary>* history,
                                  std::vector<ControlSequence>* controls_history = nullptr);

/// Warm-start shift: rows 1..L-1 move up one place, the last row is repeated.
ControlSequence shift_controls(const ControlSequence& controls);

struct MpcStep {
  int step = 0;
  std::vector<IterationSummary> replans;  // inner iterations of this step
  Eigen::VectorXd applied_control;
};

/// Receding-horizon control: replan, apply the first row to the plant, shift, repeat.
struct MpcRun {
  OptimRun plan;  // plan.iterations is used for the first replan
  int inner_iterations = 100;  // iterations for every later replan
  bool plant_noise = true;

  std::vector<Field> applied;  // plant states, applied[0] = initial condition
  std::vector<MpcStep> steps;
  int steps_executed = 0;
};

/// Plant step k draws one increment row from (seed, plant, k); replan k, iteration i, rollout r
/// draws from (seed, mpc, k, i, r).
void mpc_run(MpcRun& run, int total_steps);

/// Runs a fixed control sequence on the plant streams used by mpc_run. Rows beyond the
/// sequence repeat the last row.
std::vector<Field> execute_open_loop(const SimConfig& config, const ActuatorSet& actuators,
                                     const ControlSequence& controls, std::uint64_t seed, int total_steps,
                                     bool plant_noise = true);

/// One plant step from x using the increment stream (seed, plant, k).
Field plant_step(const SimConfig& config, const ActuatorSet& actuators, const Field& x,
                 std::span<const double> u_row, std::uint64_t seed, int k, bool plant_noise);

}  // namespace spdectl
