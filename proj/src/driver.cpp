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

#include "spdectl/driver.hpp"

#include <fmt/format.h>

#include "spdectl/error.hpp"

namespace spdectl {

ControlSequence OptimRun::start_controls() const {
  if (initial_controls) return *initial_controls;
  return ControlSequence(config.steps, actuators.count(), config.dt);
}

const ControlSequence& OptimRun::final_controls() const {
  if (controls_history.empty()) throw Error(ErrorCode::InvalidArgument, "optimization has not run");
  return controls_history.back();
}

ControlSequence optimize_controls(const SimConfig& config, const ActuatorSet& actuators, const CostSpec& cost,
                                  ControlSequence start, int iterations, int rollouts, const StreamKey& prefix,
                                  std::vector<IterationSummary>* history,
                                  std::vector<ControlSequence>* controls_history) {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "need at least one iteration");
  if (rollouts < 2) throw Error(ErrorCode::InvalidArgument, "need at least two rollouts per iteration");
  ControlSequence u = std::move(start);
  for (int i = 0; i < iterations; ++i) {
    auto records =
        simulate_batch(config, actuators, u, cost, prefix.child(static_cast<std::uint64_t>(i)), rollouts);
    const RolloutBatch batch = weigh_batch(std::move(records), config.rho);
    if (history) {
      history->push_back({i + 1, batch.mean_cost(), batch.mean_cost_tilde(), batch.effective_sample_size,
                          batch.failed});
    }
    u = update_controls(u, batch, actuators, config.rho);
    if (controls_history) controls_history->push_back(u);
  }
  return u;
}

void open_loop_optimize(OptimRun& run) {
  run.controls_history.clear();
  run.cost_history.clear();
  optimize_controls(run.config, run.actuators, run.cost, run.start_controls(), run.iterations, run.rollouts,
                    StreamKey{run.seed, stream_tag::train}, &run.cost_history, &run.controls_history);
}

ControlSequence shift_controls(const ControlSequence& controls) {
  ControlSequence out = controls;
  const int steps = controls.steps();
  if (steps > 1) out.u.topRows(steps - 1) = controls.u.bottomRows(steps - 1);
  return out;
}

Field plant_step(const SimConfig& config, const ActuatorSet& actuators, const Field& x,
                 std::span<const double> u_row, std::uint64_t seed, int k, bool plant_noise) {
  SimConfig plant = config;
  plant.deterministic = config.deterministic || !plant_noise;
  const IncrementTable inc =
      rollout_increments(plant, StreamKey{seed, stream_tag::plant, static_cast<std::uint64_t>(k)}, 1);
  Simulator sim(plant, actuators);
  Field out = x;
  sim.advance(out.values, u_row, inc.row(0));
  return out;
}

void mpc_run(MpcRun& run, int total_steps) {
  if (total_steps < 1) throw Error(ErrorCode::InvalidArgument, "total_steps must be >= 1");
  if (run.inner_iterations < 1) throw Error(ErrorCode::InvalidArgument, "inner iterations must be >= 1");
  OptimRun& plan = run.plan;
  plan.controls_history.clear();
  plan.cost_history.clear();
  run.applied.clear();
  run.steps.clear();
  run.steps_executed = 0;
  run.applied.push_back(plan.config.initial);

  SimConfig local = plan.config;
  ControlSequence u = plan.start_controls();
  for (int k = 0; k < total_steps; ++k) {
    local.initial = run.applied.back();
    MpcStep record;
    record.step = k;
    const int iterations = k == 0 ? plan.iterations : run.inner_iterations;
    u = optimize_controls(local, plan.actuators, plan.cost, std::move(u), iterations, plan.rollouts,
                          StreamKey{plan.seed, stream_tag::mpc, static_cast<std::uint64_t>(k)}, &record.replans);
    plan.cost_history.insert(plan.cost_history.end(), record.replans.begin(), record.replans.end());
    plan.controls_history.push_back(u);
    record.applied_control = u.u.row(0).transpose();
    run.applied.push_back(
        plant_step(plan.config, plan.actuators, run.applied.back(), u.row(0), plan.seed, k, run.plant_noise));
    run.steps.push_back(std::move(record));
    ++run.steps_executed;
    u = shift_controls(u);
  }
}

std::vector<Field> execute_open_loop(const SimConfig& config, const ActuatorSet& actuators,
                                     const ControlSequence& controls, std::uint64_t seed, int total_steps,
                                     bool plant_noise) {
  if (controls.steps() < 1) throw Error(ErrorCode::InvalidArgument, "empty control sequence");
  std::vector<Field> states;
  states.reserve(static_cast<std::size_t>(total_steps) + 1);
  states.push_back(config.initial);
  for (int k = 0; k < total_steps; ++k) {
    const int row = std::min(k, controls.steps() - 1);
    states.push_back(plant_step(config, actuators, states.back(), controls.row(row), seed, k, plant_noise));
  }
  return states;
}

}  // namespace spdectl
