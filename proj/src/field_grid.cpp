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

#include "spdectl/field_grid.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "spdectl/error.hpp"

namespace spdectl {

Grid::Grid(double a, double b, int intervals, Boundary bc)
    : a_(a), b_(b), intervals_(intervals), dx_(0.0), bc_(bc) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
    throw Error(ErrorCode::InvalidDomain, fmt::format("need b > a, got a={} b={}", a, b));
  }
  if (intervals < 4) {
    throw Error(ErrorCode::TooCoarse, fmt::format("need J >= 4, got J={}", intervals));
  }
  dx_ = (b - a) / intervals;
}

Eigen::VectorXd Grid::nodes() const {
  Eigen::VectorXd x(size());
  for (int k = 0; k < size(); ++k) x[k] = node(k);
  return x;
}

Grid build_grid(double a, double b, int intervals, Boundary bc) { return Grid(a, b, intervals, bc); }

Field::Field(const Grid& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("field has {} values, grid has {} nodes", values.size(), g.size()));
  }
}

void apply_bc_inplace(const Grid& grid, Eigen::Ref<Eigen::VectorXd> values) {
  const Eigen::Index last = values.size() - 1;
  if (grid.bc() == Boundary::DirichletZero) {
    values[0] = 0.0;
    values[last] = 0.0;
  } else {
    values[0] = values[1];
    values[last] = values[last - 1];
  }
}

Field apply_bc(Field field) {
  apply_bc_inplace(field.grid, field.values);
  return field;
}

double trapezoid_dot(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f,
                     const Eigen::Ref<const Eigen::VectorXd>& g) {
  const Eigen::Index last = f.size() - 1;
  const double interior = f.segment(1, last - 1).dot(g.segment(1, last - 1));
  return grid.spacing() * (interior + 0.5 * (f[0] * g[0] + f[last] * g[last]));
}

double inner_product(const Field& f, const Field& g) {
  if (!(f.grid == g.grid)) throw Error(ErrorCode::GridMismatch, "inner product across different grids");
  return trapezoid_dot(f.grid, f.values, g.values);
}

}  // namespace spdectl
