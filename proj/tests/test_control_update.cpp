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


#include <doctest.h>

#include <cmath>
#include <random>

#include "spdectl/control_update.hpp"
#include "spdectl/cost.hpp"
#include "support.hpp"

using namespace spdectl;
using spdectl::testing::code_of;

namespace {

double gauss(double x, double mu, double sigma) { return std::exp(-(x - mu) * (x - mu) / (2.0 * sigma * sigma)); }

double trapezoid(const Grid& g, auto&& f) {
  double acc = 0.0;
  for (int k = 0; k < g.size(); ++k) acc += (k == 0 || k == g.intervals() ? 0.5 : 1.0) * f(g.node(k));
  return acc * g.spacing();
}

RowMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n;
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace

TEST_CASE("gram matrix and projections against quadrature oracles") {
  const SimConfig c = spdectl::testing::heat_config(64);
  const std::vector<double> mus{0.2, 0.5, 0.8}, sig{0.05, 0.1, 0.07};
  const ActuatorSet act = build_actuators(mus, sig, c.grid, c.noise);
  CHECK(act.jitter() == 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double ref =
          trapezoid(c.grid, [&](double x) { return gauss(x, mus[i], sig[i]) * gauss(x, mus[j], sig[j]); });
      CHECK(act.gram()(i, j) == doctest::Approx(ref).epsilon(1e-13));
    }
    for (int s = 0; s < c.noise.modes(); s += 3) {
      const double ref = trapezoid(
          c.grid, [&](double x) { return gauss(x, mus[i], sig[i]) * std::sqrt(2.0) * std::sin((s + 1) * M_PI * x); });
      CHECK(std::abs(act.projections()(i, s) - ref) < 1e-13);
    }
  }
}

TEST_CASE("single actuator gram entry is its squared norm") {
  const SimConfig c = spdectl::testing::heat_config(64);
  const ActuatorSet act = build_actuators({0.4}, {0.1}, c.grid, c.noise);
  REQUIRE(act.gram().rows() == 1);
  Field m(c.grid, act.shapes().row(0).transpose());
  CHECK(act.gram()(0, 0) == doctest::Approx(inner_product(m, m)).epsilon(1e-15));
  CHECK(act.gram()(0, 0) > 0.0);
}

TEST_CASE("coincident actuators are degenerate") {
  const SimConfig c = spdectl::testing::heat_config(64);
  CHECK(code_of([&] { build_actuators({0.5, 0.5}, {0.1, 0.1}, c.grid, c.noise, false); }) ==
        ErrorCode::DegenerateActuators);
  const ActuatorSet jittered = build_actuators({0.5, 0.5}, {0.1, 0.1}, c.grid, c.noise, true);
  CHECK(jittered.jitter() > 0.0);
  CHECK(jittered.jitter() <= 1e-6 * jittered.gram().trace() / 2.0 * (1.0 + 1e-9));
}

TEST_CASE("actuator arguments are validated") {
  const SimConfig c = spdectl::testing::heat_config(32);
  CHECK(code_of([&] { build_actuators({}, {}, c.grid, c.noise); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_actuators({0.5}, {0.1, 0.2}, c.grid, c.noise); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { build_actuators({0.5}, {0.0}, c.grid, c.noise); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_actuators({1.5}, {0.1}, c.grid, c.noise); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("projected increments") {
  // A very wide actuator on (0, 1) with Neumann modes is the constant function = e_1.
  const Grid g(0.0, 1.0, 64, Boundary::NeumannZero);
  const NoiseModel noise = build_eigenbasis(g, 32);
  const ActuatorSet flat = build_actuators({0.5}, {1e4}, g, noise);
  std::mt19937_64 rng(8);
  const RowMatrix row = random_matrix(rng, 1, 32);
  const Eigen::VectorXd du = delta_u(flat, std::span<const double>(row.data(), 32));
  CHECK(std::abs(du[0] - row(0, 0)) < 1e-8);

  const ActuatorSet act = build_actuators({0.3, 0.7}, {0.1, 0.05}, g, noise);
  const Eigen::VectorXd d2 = delta_u(act, std::span<const double>(row.data(), 32));
  for (int l = 0; l < 2; ++l) {
    double ref = 0.0;
    for (int s = 0; s < 32; ++s) {
      const double proj = inner_product(Field(g, act.shapes().row(l).transpose()), noise.eigenfunction(s));
      ref += proj * row(0, s);
    }
    CHECK(std::abs(d2[l] - ref) < 1e-12);
  }
  CHECK(code_of([&] { delta_u(act, std::vector<double>(31, 0.0)); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("state cost by enumeration") {
  const Grid tiny(0.0, 1.0, 4, Boundary::NeumannZero);
  const CostSpec one(tiny, 1.0, {{0.5, 0.5, 2.0}});
  CHECK(one.window_nodes() == std::vector<int>{2});
  CHECK(one.stage_cost(Eigen::VectorXd::Zero(5)) == 4.0);

  const Grid g(0.0, 1.0, 64, Boundary::DirichletZero);
  const std::vector<CostWindow> windows{{0.18, 0.22, 5.0}, {0.48, 0.52, 2.5}, {0.78, 0.82, 5.0}};
  const CostSpec heat(g, 1.0, windows);
  double ref = 0.0;
  int hits = 0;
  for (int k = 0; k <= 64; ++k) {
    const double x = k / 64.0;
    for (const CostWindow& w : windows) {
      if (x >= w.lo && x <= w.hi) {
        ref += w.target * w.target;
        ++hits;
      }
    }
  }
  CHECK(hits == 9);
  CHECK(heat.window_nodes().size() == 9);
  CHECK(heat.stage_cost(Eigen::VectorXd::Zero(65)) == doctest::Approx(ref).epsilon(1e-15));
}

TEST_CASE("trajectory cost sums every stored state unless terminal-only") {
  const Grid g(0.0, 1.0, 8, Boundary::NeumannZero);
  Trajectory t;
  for (int i = 0; i < 4; ++i) {
    Field f(g);
    f.values.setConstant(i);
    t.states.push_back(f);
  }
  const CostSpec all(g, 2.0, {{0.0, 0.25, 1.0}});
  const CostSpec last(g, 2.0, {{0.0, 0.25, 1.0}}, true);
  // 3 window nodes, deviations (-1, 0, 1, 2).
  CHECK(state_cost(t, all) == doctest::Approx(2.0 * 3.0 * (1 + 0 + 1 + 4)));
  CHECK(state_cost(t, last) == doctest::Approx(2.0 * 3.0 * 4));
}

TEST_CASE("cost specification checks") {
  const Grid g(0.0, 1.0, 64, Boundary::DirichletZero);
  CHECK(code_of([&] { CostSpec(g, 0.0, {{0.1, 0.2, 1.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { CostSpec(g, 1.0, {{0.101, 0.102, 1.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { CostSpec(g, 1.0, {{0.1, 0.3, 1.0}, {0.2, 0.4, 2.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(CostSpec(g, 1.0, {{0.1, 0.3, 1.0}, {0.2, 0.4, 1.0}}).window_nodes().size() == 19);
}

TEST_CASE("gibbs weights") {
  const std::vector<double> costs{0.0, std::log(2.0)};
  const auto w = importance_weights(costs, 1.0);
  CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const std::vector<double> with_inf{1.0, std::numeric_limits<double>::infinity(), 2.0};
  const auto wi = importance_weights(with_inf, 0.5);
  CHECK(wi[1] == 0.0);
  CHECK(wi[0] + wi[2] == doctest::Approx(1.0));

  // Shift invariance makes huge costs harmless.
  const auto big = importance_weights(std::vector<double>{1e6, 1e6 + std::log(2.0)}, 1.0);
  CHECK(big[0] == doctest::Approx(2.0 / 3.0));
  CHECK(code_of([] {
          importance_weights(std::vector<double>{std::numeric_limits<double>::infinity()}, 1.0);
        }) == ErrorCode::AllRolloutsFailed);
}

TEST_CASE("softmax limits") {
  const std::vector<double> costs{3.0, 1.0, 2.0, 5.0};
  const auto cold = importance_weights(costs, 1e-8);
  for (double v : cold) CHECK(v == doctest::Approx(0.25).epsilon(1e-6));
  const auto hot = importance_weights(costs, 1e8);
  CHECK(hot[1] == 1.0);
  CHECK(hot[0] + hot[2] + hot[3] == 0.0);
}

TEST_CASE("iterative update against dense arithmetic") {
  const SimConfig c = spdectl::testing::heat_config(32);
  const ActuatorSet act = build_actuators({0.3, 0.6}, {0.1, 0.08}, c.grid, c.noise);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  const double rho = 2.5, dt = 0.05;
  RolloutBatch batch;
  double total = 0.0;
  for (int r = 0; r < 3; ++r) {
    RolloutRecord rec;
    rec.ok = true;
    rec.deltas = random_matrix(rng, 3, 2);
    batch.rollouts.push_back(rec);
    batch.weights.push_back(uni(rng));
    total += batch.weights.back();
  }
  for (double& w : batch.weights) w /= total;
  const ControlSequence prev(random_matrix(rng, 3, 2), dt);
  const ControlSequence next = update_controls(prev, batch, act, rho);

  const Eigen::MatrixXd minv = act.gram().inverse();
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (int r = 0; r < 3; ++r) acc += batch.weights[r] * batch.rollouts[r].deltas.row(j).transpose();
    const Eigen::Vector2d expect = prev.u.row(j).transpose() + minv * acc / (std::sqrt(rho) * dt);
    CHECK((next.u.row(j).transpose() - expect).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + expect.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("one-shot optimum") {
  const SimConfig c = spdectl::testing::heat_config(32);
  const ActuatorSet act = build_actuators({0.3, 0.6}, {0.1, 0.08}, c.grid, c.noise);
  std::mt19937_64 rng(4);
  const double rho = 10.0, dt = 0.01;
  RolloutBatch single;
  RolloutRecord rec;
  rec.ok = true;
  rec.deltas = random_matrix(rng, 4, 2);
  single.rollouts.push_back(rec);
  single.weights.push_back(1.0);
  const ControlSequence u = one_shot_optimal_controls(single, act, rho, dt);
  const Eigen::MatrixXd minv = act.gram().inverse();
  for (int j = 0; j < 4; ++j) {
    const Eigen::Vector2d expect = minv * rec.deltas.row(j).transpose() / (std::sqrt(rho) * dt);
    CHECK((u.u.row(j).transpose() - expect).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + expect.cwiseAbs().maxCoeff()));
  }
  const ControlSequence from_zero = update_controls(ControlSequence(4, 2, dt), single, act, rho);
  CHECK(from_zero.u == u.u);
}

TEST_CASE("batch weighting marks failed rollouts") {
  std::vector<RolloutRecord> recs(3);
  recs[0].ok = true;
  recs[0].cost = 1.0;
  recs[1].ok = false;
  recs[1].cost = std::numeric_limits<double>::infinity();
  recs[2].ok = true;
  recs[2].cost = 1.0;
  const RolloutBatch b = weigh_batch(recs, 1.0);
  CHECK(b.failed == 1);
  CHECK(b.weights[1] == 0.0);
  CHECK(b.effective_sample_size == doctest::Approx(2.0));
  CHECK(b.mean_cost() == 1.0);
}
