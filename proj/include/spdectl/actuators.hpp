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
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "spdectl/field_grid.hpp"
#include "spdectl/noise_model.hpp"

namespace spdectl {

/// Gaussian design functions m_l(x) = exp(-(x - mu_l)^2 / (2 sigma_l^2)) mapping N scalar
/// controls into the field, together with the quantities the update needs:
/// Gram matrix M_ij = <m_i, m_j>, its Cholesky factor, and the noise projections
/// P_ls = <m_l, sqrt(lambda_s) e_s>.
class ActuatorSet {
 public:
  int count() const noexcept { return static_cast<int>(mus_.size()); }
  const std::vector<double>& mus() const noexcept { return mus_; }
  const std::vector<double>& sigmas() const noexcept { return sigmas_; }
  const Grid& grid() const noexcept { return grid_; }

  /// N x (J+1); row l holds m_l on the nodes.
  const Eigen::MatrixXd& shapes() const noexcept { return shapes_; }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }
  const Eigen::MatrixXd& projections() const noexcept { return projections_; }
  /// Diagonal shift added before the factorization succeeded (0 when M was factorized as is).
  double jitter() const noexcept { return jitter_; }

  /// M^{-1} v through the stored factorization.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& v) const { return factor_.solve(v); }

 private:
  friend ActuatorSet build_actuators(std::vector<double>, std::vector<double>, const Grid&, const NoiseModel&,
                                     bool);
  explicit ActuatorSet(const Grid& g) : grid_(g) {}

  Grid grid_;
  std::vector<double> mus_;
  std::vector<double> sigmas_;
  Eigen::MatrixXd shapes_;
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::MatrixXd projections_;
  double jitter_ = 0.0;
};

/// With allow_jitter, a failed factorization retries with 1e-12 trace(M)/N on the diagonal,
/// escalating x10 up to 1e-6 trace(M)/N. Throws degenerate-actuators when nothing works.
ActuatorSet build_actuators(std::vector<double> mus, std::vector<double> sigmas, const Grid& grid,
                            const NoiseModel& noise, bool allow_jitter = true);

/// Piecewise-constant control: row i is u(t_i) on [i dt, (i+1) dt).
struct ControlSequence {
  RowMatrix u;
  double dt = 0.0;

  ControlSequence() = default;
  ControlSequence(int steps, int actuators, double step_dt) : u(RowMatrix::Zero(steps, actuators)), dt(step_dt) {}
  ControlSequence(RowMatrix values, double step_dt);

  int steps() const noexcept { return static_cast<int>(u.rows()); }
  int actuators() const noexcept { return static_cast<int>(u.cols()); }
  std::span<const double> row(int i) const {
    return {u.data() + static_cast<std::ptrdiff_t>(i) * u.cols(), static_cast<std::size_t>(u.cols())};
  }
};

/// (delta u~)_l = sum_s P_ls dbeta_s: noise increments projected onto the actuators.
Eigen::VectorXd delta_u(const ActuatorSet& actuators, std::span<const double> dbeta_row);

}  // namespace spdectl
