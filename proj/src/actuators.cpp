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

#include "spdectl/actuators.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "spdectl/error.hpp"

namespace spdectl {

namespace {

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& m) {
  if (llt.info() != Eigen::Success) return false;
  const double scale = m.diagonal().cwiseAbs().maxCoeff();
  const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal().array().square();
  if (!pivots.allFinite()) return false;
  return pivots.minCoeff() > 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

ActuatorSet build_actuators(std::vector<double> mus, std::vector<double> sigmas, const Grid& grid,
                            const NoiseModel& noise, bool allow_jitter) {
  if (mus.empty()) throw Error(ErrorCode::InvalidArgument, "at least one actuator is required");
  if (mus.size() != sigmas.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} actuator centers but {} widths", mus.size(), sigmas.size()));
  }
  if (!(noise.grid() == grid)) throw Error(ErrorCode::GridMismatch, "noise model and actuators use different grids");
  for (std::size_t l = 0; l < mus.size(); ++l) {
    if (!(sigmas[l] > 0.0) || !std::isfinite(sigmas[l])) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("actuator {} width must be > 0", l));
    }
    if (!(mus[l] >= grid.a() && mus[l] <= grid.b())) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("actuator {} center {} outside [a, b]", l, mus[l]));
    }
  }

  const int n = static_cast<int>(mus.size());
  ActuatorSet set(grid);
  set.mus_ = std::move(mus);
  set.sigmas_ = std::move(sigmas);

  set.shapes_.resize(n, grid.size());
  for (int l = 0; l < n; ++l) {
    const double inv = 1.0 / (2.0 * set.sigmas_[l] * set.sigmas_[l]);
    for (int k = 0; k < grid.size(); ++k) {
      const double d = grid.node(k) - set.mus_[l];
      set.shapes_(l, k) = std::exp(-d * d * inv);
    }
  }

  set.gram_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = trapezoid_dot(grid, set.shapes_.row(i).transpose(), set.shapes_.row(j).transpose());
      set.gram_(i, j) = v;
      set.gram_(j, i) = v;
    }
  }

  set.factor_.compute(set.gram_);
  if (!factor_ok(set.factor_, set.gram_)) {
    bool done = false;
    if (allow_jitter) {
      const double base = set.gram_.trace() / n;
      for (double rel = 1e-12; rel <= 1e-6 * (1.0 + 1e-9); rel *= 10.0) {
        Eigen::MatrixXd shifted = set.gram_;
        shifted.diagonal().array() += rel * base;
        set.factor_.compute(shifted);
        if (factor_ok(set.factor_, shifted)) {
          set.jitter_ = rel * base;
          done = true;
          break;
        }
      }
    }
    if (!done) {
      throw Error(ErrorCode::DegenerateActuators,
                  allow_jitter ? "Gram matrix not positive definite even at maximum jitter"
                               : "Gram matrix not positive definite (jitter disabled)");
    }
  }

  set.projections_.resize(n, noise.modes());
  for (int l = 0; l < n; ++l) {
    for (int s = 0; s < noise.modes(); ++s) {
      set.projections_(l, s) =
          std::sqrt(noise.eigenvalue(s)) * trapezoid_dot(grid, set.shapes_.row(l).transpose(), noise.basis().col(s));
    }
  }
  return set;
}

ControlSequence::ControlSequence(RowMatrix values, double step_dt) : u(std::move(values)), dt(step_dt) {
  if (!u.allFinite()) throw Error(ErrorCode::InvalidArgument, "control sequence has non-finite entries");
}

Eigen::VectorXd delta_u(const ActuatorSet& actuators, std::span<const double> dbeta_row) {
  if (static_cast<Eigen::Index>(dbeta_row.size()) != actuators.projections().cols()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("increment row has {} entries, expected {}", dbeta_row.size(),
                            actuators.projections().cols()));
  }
  const Eigen::Map<const Eigen::VectorXd> row(dbeta_row.data(), static_cast<Eigen::Index>(dbeta_row.size()));
  return actuators.projections() * row;
}

}  // namespace spdectl
