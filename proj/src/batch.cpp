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

#include "spdectl/batch.hpp"

#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "spdectl/error.hpp"

namespace spdectl {

namespace {

void check_request(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                   int rollouts) {
  config.validate();
  if (rollouts < 1) throw Error(ErrorCode::InvalidArgument, "need at least one rollout");
  if (controls.steps() != config.steps || controls.actuators() != actuators.count()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("controls are {}x{}, expected {}x{}", controls.steps(), controls.actuators(),
                            config.steps, actuators.count()));
  }
}

RolloutRecord run_one(Simulator& sim, const ControlSequence& controls, const CostSpec& cost, const StreamKey& key,
                      const BatchOptions& options) {
  const SimConfig& config = sim.config();
  const ActuatorSet& actuators = sim.actuators();
  RolloutRecord rec;
  const IncrementTable inc = rollout_increments(config, key, config.steps);
  rec.deltas.resize(config.steps, actuators.count());
  Eigen::VectorXd x = config.initial.values;
  double j_cost = cost.terminal_only() ? 0.0 : cost.stage_cost(x);
  try {
    for (int j = 0; j < config.steps; ++j) {
      sim.advance(x, controls.row(j), inc.row(j));
      if (!cost.terminal_only()) j_cost += cost.stage_cost(x);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonfiniteState) throw;
    rec.ok = false;
    rec.failure = e.what();
    rec.cost = std::numeric_limits<double>::infinity();
    rec.deltas.setZero();
    return rec;
  }
  if (cost.terminal_only()) j_cost = cost.stage_cost(x);
  const Eigen::Map<const RowMatrix> dbeta(inc.dbeta.data(), inc.dbeta.rows(), inc.dbeta.cols());
  rec.deltas.noalias() = dbeta * actuators.projections().transpose();
  rec.cost = j_cost;
  rec.zeta = zeta(controls, rec.deltas, actuators.gram(), config.rho);
  rec.ok = std::isfinite(rec.cost) && std::isfinite(rec.zeta);
  if (!rec.ok) rec.failure = "non-finite cost";
  if (options.keep_terminal) rec.terminal = x;
  return rec;
}

}  // namespace

std::vector<RolloutRecord> simulate_batch(const SimConfig& config, const ActuatorSet& actuators,
                                          const ControlSequence& controls, const CostSpec& cost,
                                          const StreamKey& prefix, int rollouts, BatchOptions options) {
  check_request(config, actuators, controls, rollouts);
  std::vector<RolloutRecord> out(static_cast<std::size_t>(rollouts));
  std::optional<Error> first_error;
#pragma omp parallel
  {
    Simulator sim(config, actuators);
#pragma omp for schedule(static)
    for (int r = 0; r < rollouts; ++r) {
      try {
        out[r] = run_one(sim, controls, cost, prefix.child(static_cast<std::uint64_t>(r)), options);
      } catch (const Error& e) {
#pragma omp critical(spdectl_batch_error)
        if (!first_error) first_error = e;
      }
    }
  }
  if (first_error) throw *first_error;
  return out;
}

std::vector<RolloutRecord> simulate_batch_serial(const SimConfig& config, const ActuatorSet& actuators,
                                                 const ControlSequence& controls, const CostSpec& cost,
                                                 const StreamKey& prefix, int rollouts, BatchOptions options) {
  check_request(config, actuators, controls, rollouts);
  std::vector<RolloutRecord> out;
  out.reserve(static_cast<std::size_t>(rollouts));
  Simulator sim(config, actuators);
  for (int r = 0; r < rollouts; ++r) {
    out.push_back(run_one(sim, controls, cost, prefix.child(static_cast<std::uint64_t>(r)), options));
  }
  return out;
}

ProfileStats evaluate_profiles(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                               const CostSpec& cost, const StreamKey& prefix, int rollouts) {
  check_request(config, actuators, controls, rollouts);
  constexpr int kChunk = 16;
  const int times = config.steps + 1;
  const int nodes = config.grid.size();
  ProfileStats stats;
  stats.mean = RowMatrix::Zero(times, nodes);
  RowMatrix m2 = RowMatrix::Zero(times, nodes);
  stats.costs.assign(static_cast<std::size_t>(rollouts), 0.0);

  std::vector<RowMatrix> states(kChunk, RowMatrix(times, nodes));
  std::vector<char> ok(kChunk, 0);
  int count = 0;
  for (int base = 0; base < rollouts; base += kChunk) {
    const int n = std::min(kChunk, rollouts - base);
    std::optional<Error> first_error;
#pragma omp parallel
    {
      Simulator sim(config, actuators);
#pragma omp for schedule(static)
      for (int i = 0; i < n; ++i) {
        const int r = base + i;
        try {
          const IncrementTable inc =
              rollout_increments(config, prefix.child(static_cast<std::uint64_t>(r)), config.steps);
          Eigen::VectorXd x = config.initial.values;
          states[i].row(0) = x.transpose();
          double c = cost.terminal_only() ? 0.0 : cost.stage_cost(x);
          ok[i] = 1;
          try {
            for (int j = 0; j < config.steps; ++j) {
              sim.advance(x, controls.row(j), inc.row(j));
              states[i].row(j + 1) = x.transpose();
              if (!cost.terminal_only()) c += cost.stage_cost(x);
            }
            if (cost.terminal_only()) c = cost.stage_cost(x);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NonfiniteState) throw;
            ok[i] = 0;
            c = std::numeric_limits<double>::infinity();
          }
          stats.costs[r] = c;
        } catch (const Error& e) {
#pragma omp critical(spdectl_profile_error)
          if (!first_error) first_error = e;
        }
      }
    }
    if (first_error) throw *first_error;
    // Welford update in rollout order.
    for (int i = 0; i < n; ++i) {
      if (!ok[i]) continue;
      ++count;
      const RowMatrix delta = states[i] - stats.mean;
      stats.mean += delta / static_cast<double>(count);
      m2.array() += delta.array() * (states[i] - stats.mean).array();
    }
  }
  if (count == 0) throw Error(ErrorCode::AllRolloutsFailed, "every evaluation rollout diverged");
  stats.stddev = count > 1 ? RowMatrix((m2 / static_cast<double>(count - 1)).array().sqrt())
                           : RowMatrix(RowMatrix::Zero(times, nodes));
  return stats;
}

}  // namespace spdectl
