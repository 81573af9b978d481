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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spdectl/actuators.hpp"
#include "spdectl/field_grid.hpp"
#include "spdectl/noise_model.hpp"

namespace spdectl {

enum class DriftKind { Heat, Nagumo };

/// Heat: F = 0. Nagumo: F(u) = u (1 - u)(u - alpha). Both diffuse with coefficient epsilon.
struct DriftSpec {
  DriftKind kind = DriftKind::Heat;
  double epsilon = 1.0;
  double alpha = 0.0;
};

/// dX = (eps X_xx + F(X) + U) dt + rho^{-1/2} dW on a grid, stepped semi-implicitly.
struct SimConfig {
  Grid grid;
  DriftSpec drift;
  NoiseModel noise;
  double rho = 1.0;
  double dt = 0.01;
  int steps = 1;
  Field initial;
  /// rho -> infinity limit: no noise is injected and no randomness is consumed.
  bool deterministic = false;

  /// Throws invalid-argument / grid-mismatch when fields disagree.
  void validate() const;
};

/// Factorized tridiagonal system (I - dt eps D2). Dirichlet rows are identity rows;
/// Neumann rows use the mirrored ghost node (-2r, 1+2r) so the trapezoid mass is conserved.
class ImplicitDiffusion {
 public:
  ImplicitDiffusion(const Grid& grid, double epsilon, double dt);

  /// Overwrites rhs with the solution.
  void solve(Eigen::Ref<Eigen::VectorXd> rhs) const;
  Eigen::MatrixXd dense() const;

 private:
  std::vector<double> lower_;
  std::vector<double> diag_;
  std::vector<double> upper_;
  std::vector<double> cprime_;
  std::vector<double> denom_;
};

ImplicitDiffusion laplacian_solve_matrix(const Grid& grid, double epsilon, double dt);

Field reaction(const DriftSpec& drift, const Field& x);
/// Pointwise sum_l m_l(x_k) u_l.
Field control_field(const ActuatorSet& actuators, std::span<const double> u_row);

/// One step: solve[(I - dt eps D2)] (X + dt (F(X) + U) + rho^{-1/2} dW). Throws nonfinite-state.
Field step(const Field& x, const SimConfig& config, const ActuatorSet& actuators, std::span<const double> u_row,
           const Field& dw);

/// Reusable stepper owning the diffusion factorization and scratch space. One per thread.
class Simulator {
 public:
  Simulator(const SimConfig& config, const ActuatorSet& actuators);

  const SimConfig& config() const noexcept { return config_; }
  const ActuatorSet& actuators() const noexcept { return actuators_; }

  /// Advances x in place. dbeta_row is ignored for deterministic configs.
  void advance(Eigen::Ref<Eigen::VectorXd> x, std::span<const double> u_row, std::span<const double> dbeta_row);
  /// Advances x in place with an already assembled noise field (unscaled dW).
  void advance_with_noise(Eigen::Ref<Eigen::VectorXd> x, std::span<const double> u_row,
                          const Eigen::Ref<const Eigen::VectorXd>& dw);

 private:
  void build_rhs(const Eigen::Ref<const Eigen::VectorXd>& x, std::span<const double> u_row);
  void finish(Eigen::Ref<Eigen::VectorXd> x);

  const SimConfig& config_;
  const ActuatorSet& actuators_;
  ImplicitDiffusion diffusion_;
  NoiseScratch noise_scratch_;
  Eigen::VectorXd rhs_;
  Eigen::VectorXd noise_;
  double noise_scale_;
};

struct Trajectory {
  std::vector<Field> states;
  IncrementTable increments;
};

/// L steps driven by the increment stream (seed, rollout_index).
Trajectory rollout(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                   std::uint64_t seed, std::uint64_t rollout_index);
Trajectory rollout(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                   const StreamKey& key);

/// Increments used by a rollout under this config (all zero when deterministic).
IncrementTable rollout_increments(const SimConfig& config, const StreamKey& key, int steps);

}  // namespace spdectl
