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

#include <Eigen/Dense>

#include "spdectl/field_grid.hpp"

namespace spdectl {

struct Trajectory;

/// Target region [lo, hi] (domain units) with a constant desired value.
struct CostWindow {
  double lo = 0.0;
  double hi = 0.0;
  double target = 0.0;
};

/// J = sum_t sum_k kappa (X(x_k, t) - X_desired(x_k))^2 I(x_k), summed over every stored
/// state (t = 0..L) or only the last one when terminal_only is set.
class CostSpec {
 public:
  /// Throws invalid-argument for kappa <= 0, a window selecting no node, or overlapping
  /// windows with conflicting targets.
  CostSpec(const Grid& grid, double kappa, std::vector<CostWindow> windows, bool terminal_only = false);

  double kappa() const noexcept { return kappa_; }
  bool terminal_only() const noexcept { return terminal_only_; }
  const std::vector<CostWindow>& windows() const noexcept { return windows_; }
  const Grid& grid() const noexcept { return grid_; }

  /// Node indices inside the windows, ascending.
  const std::vector<int>& window_nodes() const noexcept { return nodes_; }
  /// Desired value for each entry of window_nodes().
  const std::vector<double>& window_targets() const noexcept { return targets_; }

  double stage_cost(const Eigen::Ref<const Eigen::VectorXd>& values) const;

 private:
  Grid grid_;
  double kappa_;
  std::vector<CostWindow> windows_;
  bool terminal_only_;
  std::vector<int> nodes_;
  std::vector<double> targets_;
};

double state_cost(const Trajectory& trajectory, const CostSpec& spec);

}  // namespace spdectl
