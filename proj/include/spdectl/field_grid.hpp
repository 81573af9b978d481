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

#include <Eigen/Dense>

namespace spdectl {

enum class Boundary { DirichletZero, NeumannZero };

/// Uniform 1-D grid with nodes x_k = a + k (b - a) / J, k = 0..J.
class Grid {
 public:
  /// Throws invalid-domain when b <= a and too-coarse when J < 4.
  Grid(double a, double b, int intervals, Boundary bc);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  int intervals() const noexcept { return intervals_; }
  int size() const noexcept { return intervals_ + 1; }
  double spacing() const noexcept { return dx_; }
  Boundary bc() const noexcept { return bc_; }

  double node(int k) const noexcept { return a_ + k * dx_; }
  Eigen::VectorXd nodes() const;

  bool operator==(const Grid&) const = default;

 private:
  double a_;
  double b_;
  int intervals_;
  double dx_;
  Boundary bc_;
};

Grid build_grid(double a, double b, int intervals, Boundary bc);

/// Nodal values of a scalar field, boundary nodes included.
struct Field {
  Grid grid;
  Eigen::VectorXd values;

  explicit Field(const Grid& g) : grid(g), values(Eigen::VectorXd::Zero(g.size())) {}
  /// Throws length-mismatch unless values has J+1 entries.
  Field(const Grid& g, Eigen::VectorXd v);
};

/// Dirichlet: zero the boundary nodes. Neumann: copy the nearest interior value.
void apply_bc_inplace(const Grid& grid, Eigen::Ref<Eigen::VectorXd> values);
Field apply_bc(Field field);

/// Trapezoid-rule approximation of the L2 inner product over (a, b).
double trapezoid_dot(const Grid& grid, const Eigen::Ref<const Eigen::VectorXd>& f,
                     const Eigen::Ref<const Eigen::VectorXd>& g);

/// Throws grid-mismatch when the fields live on different grids.
double inner_product(const Field& f, const Field& g);

}  // namespace spdectl
