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

#include "spdectl/spde_sim.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spdectl/error.hpp"

namespace spdectl {

void SimConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::InvalidArgument, "rho must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 0");
  if (!(drift.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (!(noise.grid() == grid) || !(initial.grid == grid)) {
    throw Error(ErrorCode::GridMismatch, "noise model / initial condition grid differs from the config grid");
  }
  if (!initial.values.allFinite()) throw Error(ErrorCode::InvalidArgument, "initial condition is not finite");
}

ImplicitDiffusion::ImplicitDiffusion(const Grid& grid, double epsilon, double dt) {
  if (!(epsilon > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon and dt must be > 0");
  const int n = grid.size();
  const double r = dt * epsilon / (grid.spacing() * grid.spacing());
  lower_.assign(n, -r);
  diag_.assign(n, 1.0 + 2.0 * r);
  upper_.assign(n, -r);
  lower_[0] = 0.0;
  upper_[n - 1] = 0.0;
  if (grid.bc() == Boundary::DirichletZero) {
    diag_[0] = 1.0;
    upper_[0] = 0.0;
    diag_[n - 1] = 1.0;
    lower_[n - 1] = 0.0;
  } else {
    upper_[0] = -2.0 * r;
    lower_[n - 1] = -2.0 * r;
  }

  cprime_.resize(n);
  denom_.resize(n);
  denom_[0] = diag_[0];
  cprime_[0] = upper_[0] / denom_[0];
  for (int i = 1; i < n; ++i) {
    denom_[i] = diag_[i] - lower_[i] * cprime_[i - 1];
    if (!(std::abs(denom_[i]) > 0.0)) throw Error(ErrorCode::InvalidArgument, "singular diffusion system");
    cprime_[i] = upper_[i] / denom_[i];
  }
}

void ImplicitDiffusion::solve(Eigen::Ref<Eigen::VectorXd> rhs) const {
  const auto n = static_cast<Eigen::Index>(diag_.size());
  rhs[0] /= denom_[0];
  for (Eigen::Index i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) / denom_[i];
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] -= cprime_[i] * rhs[i + 1];
}

Eigen::MatrixXd ImplicitDiffusion::dense() const {
  const auto n = static_cast<Eigen::Index>(diag_.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = diag_[i];
    if (i > 0) a(i, i - 1) = lower_[i];
    if (i + 1 < n) a(i, i + 1) = upper_[i];
  }
  return a;
}

ImplicitDiffusion laplacian_solve_matrix(const Grid& grid, double epsilon, double dt) {
  return ImplicitDiffusion(grid, epsilon, dt);
}

namespace {

inline double reaction_at(const DriftSpec& drift, double u) {
  return drift.kind == DriftKind::Nagumo ? u * (1.0 - u) * (u - drift.alpha) : 0.0;
}

void check_u_row(const ActuatorSet& actuators, std::span<const double> u_row) {
  if (static_cast<int>(u_row.size()) != actuators.count()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("control row has {} entries, {} actuators", u_row.size(), actuators.count()));
  }
}

}  // namespace

Field reaction(const DriftSpec& drift, const Field& x) {
  Field out(x.grid);
  for (Eigen::Index k = 0; k < x.values.size(); ++k) out.values[k] = reaction_at(drift, x.values[k]);
  return out;
}

Field control_field(const ActuatorSet& actuators, std::span<const double> u_row) {
  check_u_row(actuators, u_row);
  const Eigen::Map<const Eigen::VectorXd> u(u_row.data(), static_cast<Eigen::Index>(u_row.size()));
  return Field(actuators.grid(), actuators.shapes().transpose() * u);
}

Simulator::Simulator(const SimConfig& config, const ActuatorSet& actuators)
    : config_(config),
      actuators_(actuators),
      diffusion_(config.grid, config.drift.epsilon, config.dt),
      noise_scratch_(config.noise),
      rhs_(config.grid.size()),
      noise_(config.grid.size()),
      noise_scale_(1.0 / std::sqrt(config.rho)) {
  if (!(actuators.grid() == config.grid)) throw Error(ErrorCode::GridMismatch, "actuators use a different grid");
}

void Simulator::build_rhs(const Eigen::Ref<const Eigen::VectorXd>& x, std::span<const double> u_row) {
  check_u_row(actuators_, u_row);
  const double dt = config_.dt;
  const Eigen::Map<const Eigen::VectorXd> u(u_row.data(), static_cast<Eigen::Index>(u_row.size()));
  rhs_.noalias() = actuators_.shapes().transpose() * u;
  for (Eigen::Index k = 0; k < rhs_.size(); ++k) {
    rhs_[k] = x[k] + dt * (reaction_at(config_.drift, x[k]) + rhs_[k]);
  }
}

void Simulator::finish(Eigen::Ref<Eigen::VectorXd> x) {
  if (config_.grid.bc() == Boundary::DirichletZero) {
    rhs_[0] = 0.0;
    rhs_[rhs_.size() - 1] = 0.0;
  }
  diffusion_.solve(rhs_);
  if (!rhs_.allFinite()) throw Error(ErrorCode::NonfiniteState, "state became non-finite during a step");
  x = rhs_;
}

void Simulator::advance(Eigen::Ref<Eigen::VectorXd> x, std::span<const double> u_row,
                        std::span<const double> dbeta_row) {
  build_rhs(x, u_row);
  if (!config_.deterministic) {
    assemble_noise_into(config_.noise, dbeta_row, noise_scratch_, noise_);
    rhs_.noalias() += noise_scale_ * noise_;
  }
  finish(x);
}

void Simulator::advance_with_noise(Eigen::Ref<Eigen::VectorXd> x, std::span<const double> u_row,
                                   const Eigen::Ref<const Eigen::VectorXd>& dw) {
  build_rhs(x, u_row);
  if (!config_.deterministic) rhs_.noalias() += noise_scale_ * dw;
  finish(x);
}

Field step(const Field& x, const SimConfig& config, const ActuatorSet& actuators, std::span<const double> u_row,
           const Field& dw) {
  if (!(x.grid == config.grid) || !(dw.grid == config.grid)) {
    throw Error(ErrorCode::GridMismatch, "step arguments live on different grids");
  }
  Simulator sim(config, actuators);
  Field out = x;
  sim.advance_with_noise(out.values, u_row, dw.values);
  return out;
}

IncrementTable rollout_increments(const SimConfig& config, const StreamKey& key, int steps) {
  if (config.deterministic) {
    IncrementTable table;
    table.dbeta = RowMatrix::Zero(steps, config.noise.modes());
    table.dt = config.dt;
    table.key = key;
    return table;
  }
  return sample_increments(key, steps, config.noise, config.dt);
}

Trajectory rollout(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                   const StreamKey& key) {
  config.validate();
  if (controls.steps() != config.steps) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("control sequence has {} rows, horizon is {}", controls.steps(), config.steps));
  }
  Trajectory traj;
  traj.increments = rollout_increments(config, key, config.steps);
  traj.states.reserve(static_cast<std::size_t>(config.steps) + 1);
  traj.states.push_back(config.initial);
  Simulator sim(config, actuators);
  Eigen::VectorXd x = config.initial.values;
  for (int j = 0; j < config.steps; ++j) {
    sim.advance(x, controls.row(j), traj.increments.row(j));
    traj.states.emplace_back(config.grid, x);
  }
  return traj;
}

Trajectory rollout(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                   std::uint64_t seed, std::uint64_t rollout_index) {
  return rollout(config, actuators, controls, StreamKey{seed, rollout_index});
}

}  // namespace spdectl
