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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "spdectl/actuators.hpp"
#include "spdectl/error.hpp"
#include "spdectl/spde_sim.hpp"

namespace spdectl::testing {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

inline SimConfig heat_config(int intervals = 64, int steps = 100, double rho = 10.0, double dt = 0.01) {
  const Grid g(0.0, 1.0, intervals, Boundary::DirichletZero);
  return SimConfig{g, DriftSpec{DriftKind::Heat, 0.1, 0.0}, build_eigenbasis(g, intervals / 2), rho, dt, steps,
                   Field(g), false};
}

inline SimConfig nagumo_config(int intervals, double dt, int steps, bool deterministic, int modes = 0) {
  const Grid g(0.0, 10.0, intervals, Boundary::NeumannZero);
  Field ic(g);
  for (int k = 0; k < g.size(); ++k) ic.values[k] = 1.0 / (1.0 + std::exp(-(2.0 - g.node(k)) / std::sqrt(2.0)));
  ic = apply_bc(ic);
  return SimConfig{g, DriftSpec{DriftKind::Nagumo, 1.0, -0.5}, build_eigenbasis(g, modes > 0 ? modes : intervals / 2), 10.0,
                   dt, steps, ic, deterministic};
}

inline ActuatorSet heat_actuators(const SimConfig& c) {
  return build_actuators({0.2, 0.5, 0.8}, {0.05, 0.05, 0.05}, c.grid, c.noise);
}

}  // namespace spdectl::testing
