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

#include "spdectl/cost.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "spdectl/error.hpp"
#include "spdectl/spde_sim.hpp"

namespace spdectl {

CostSpec::CostSpec(const Grid& grid, double kappa, std::vector<CostWindow> windows, bool terminal_only)
    : grid_(grid), kappa_(kappa), windows_(std::move(windows)), terminal_only_(terminal_only) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error(ErrorCode::InvalidArgument, "kappa must be > 0");
  // Tolerance absorbs node rounding such as 70 * 0.01 = 0.7000000000000001.
  const double tol = 1e-9 * grid.length();
  std::map<int, double> selected;
  for (const CostWindow& w : windows_) {
    if (!(w.hi >= w.lo)) throw Error(ErrorCode::InvalidArgument, fmt::format("window [{}, {}] is empty", w.lo, w.hi));
    int hits = 0;
    for (int k = 0; k < grid.size(); ++k) {
      const double x = grid.node(k);
      if (x < w.lo - tol || x > w.hi + tol) continue;
      ++hits;
      auto [it, inserted] = selected.emplace(k, w.target);
      if (!inserted && it->second != w.target) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("node {} lies in windows with different targets", k));
      }
    }
    if (hits == 0) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("window [{}, {}] contains no grid node", w.lo, w.hi));
    }
  }
  for (const auto& [k, target] : selected) {
    nodes_.push_back(k);
    targets_.push_back(target);
  }
}

double CostSpec::stage_cost(const Eigen::Ref<const Eigen::VectorXd>& values) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double d = values[nodes_[i]] - targets_[i];
    acc += d * d;
  }
  return kappa_ * acc;
}

double state_cost(const Trajectory& trajectory, const CostSpec& spec) {
  if (trajectory.states.empty()) return 0.0;
  if (spec.terminal_only()) return spec.stage_cost(trajectory.states.back().values);
  double acc = 0.0;
  for (const Field& f : trajectory.states) acc += spec.stage_cost(f.values);
  return acc;
}

}  // namespace spdectl
