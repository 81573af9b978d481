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

#include <vector>

#include "spdectl/control_update.hpp"
#include "spdectl/cost.hpp"
#include "spdectl/spde_sim.hpp"

namespace spdectl {

struct BatchOptions {
  bool keep_terminal = false;
};

/// Rollout r uses the stream prefix.child(r). Each rollout is independent, so
/// simulate_batch (OpenMP over rollouts) returns exactly what simulate_batch_serial returns.
std::vector<RolloutRecord> simulate_batch(const SimConfig& config, const ActuatorSet& actuators,
                                          const ControlSequence& controls, const CostSpec& cost,
                                          const StreamKey& prefix, int rollouts, BatchOptions options = {});

/// Single-threaded reference for simulate_batch.
std::vector<RolloutRecord> simulate_batch_serial(const SimConfig& config, const ActuatorSet& actuators,
                                                 const ControlSequence& controls, const CostSpec& cost,
                                                 const StreamKey& prefix, int rollouts, BatchOptions options = {});

/// Per-node mean and sample standard deviation over rollouts at every stored time.
struct ProfileStats {
  RowMatrix mean;    // (L+1) x (J+1)
  RowMatrix stddev;  // (L+1) x (J+1)
  std::vector<double> costs;
};

/// Chunked parallel rollouts reduced in rollout order, so the result does not depend on
/// the number of threads.
ProfileStats evaluate_profiles(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                               const CostSpec& cost, const StreamKey& prefix, int rollouts);

}  // namespace spdectl
