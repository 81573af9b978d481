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
#include "spdectl/info_theory.hpp"
#include "support.hpp"

using namespace spdectl;
using spdectl::testing::code_of;

namespace {

RowMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
  const RowMatrix a = random_matrix(rng, n, n);
  return a * a.transpose() + Eigen::MatrixXd::Identity(n, n);
}

// Density of the controlled path law with respect to the base law, written out term by term.
double rn_derivative(const ControlSequence& u, const RowMatrix& deltas, const Eigen::MatrixXd& m, double rho) {
  double exponent = 0.0;
  for (int k = 0; k < u.steps(); ++k) {
    for (int i = 0; i < u.actuators(); ++i) {
      exponent += std::sqrt(rho) * u.u(k, i) * deltas(k, i);
      for (int j = 0; j < u.actuators(); ++j) exponent += 0.5 * rho * u.u(k, i) * m(i, j) * u.u(k, j) * u.dt;
    }
  }
  return std::exp(exponent);
}

}  // namespace

TEST_CASE("log density hand value") {
  const ControlSequence u(RowMatrix::Constant(1, 1, 2.0), 0.1);
  const RowMatrix d = RowMatrix::Constant(1, 1, 0.3);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Constant(1, 1, 0.5);
  CHECK(log_rn_derivative(u, d, m, 4.0) == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(analytic_kl(u, m, 4.0) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("path correction equals the scaled log density") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> rho_dist(0.1, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int steps = 1 + trial % 7, n = 1 + trial % 4;
    const double rho = rho_dist(rng);
    const ControlSequence u(random_matrix(rng, steps, n, 0.3), 0.01 * (1 + trial % 3));
    const RowMatrix deltas = random_matrix(rng, steps, n, 0.1);
    const Eigen::MatrixXd m = random_spd(rng, n);
    const double z = zeta(u, deltas, m, rho);
    const double lr = log_rn_derivative(u, deltas, m, rho);
    CHECK(lr == doctest::Approx(rho * z).epsilon(1e-12));
    const double direct = rn_derivative(u, deltas, m, rho);
    CHECK(std::exp(rho * z) == doctest::Approx(direct).epsilon(1e-8));
    CHECK(std::abs(z - std::log(direct) / rho) <= 1e-10 * (1.0 + std::abs(z)));
  }
}

TEST_CASE("free energy estimates") {
  const std::vector<double> costs{0.0, std::log(2.0)};
  CHECK(estimate_free_energy(costs, 1.0).value == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-14));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 50.0);
  std::vector<double> many(1000);
  for (double& c : many) c = uni(rng);
  const double mean = mean_estimate(many).value;
  CHECK(std::abs(estimate_free_energy(many, 1e-8).value - mean) < 1e-4);
  // Never above the sample mean (Jensen) and never below the minimum.
  const double fe = estimate_free_energy(many, 0.3).value;
  CHECK(fe <= mean);
  CHECK(fe >= *std::min_element(many.begin(), many.end()));
}

TEST_CASE("gibbs weights close the empirical Legendre gap") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 10.0);
  for (double rho : {0.01, 1.0, 10.0, 1000.0}) {
    std::vector<double> costs(500);
    for (double& c : costs) c = uni(rng);
    CHECK(std::abs(gibbs_legendre_gap(costs, rho)) <= 1e-10);
    const auto w = importance_weights(costs, rho);
    CHECK(std::abs(discrete_legendre_gap(costs, w, rho)) <= 1e-10);
    // Any other distribution over the same atoms sits above the free energy.
    std::vector<double> other(costs.size());
    double total = 0.0;
    for (double& v : other) total += (v = uni(rng));
    for (double& v : other) v /= total;
    CHECK(discrete_legendre_gap(costs, other, rho) >= 0.0);
  }
}

TEST_CASE("verification needs enough rollouts") {
  const SimConfig c = spdectl::testing::heat_config(32, 20);
  const ActuatorSet act = spdectl::testing::heat_actuators(c);
  const CostSpec cost(c.grid, 1.0, {{0.4, 0.6, 1.0}});
  const ControlSequence u(20, 3, c.dt);
  CHECK(code_of([&] { verify_martingale(c, act, u, 10, 1); }) == ErrorCode::InsufficientSamples);
  CHECK(code_of([&] { verify_measures(c, act, u, cost, 99, 1); }) == ErrorCode::InsufficientSamples);
}

TEST_CASE("zero control has a unit density") {
  const SimConfig c = spdectl::testing::heat_config(32, 20);
  const ActuatorSet act = spdectl::testing::heat_actuators(c);
  const MartingaleCheck m = verify_martingale(c, act, ControlSequence(20, 3, c.dt), 200, 4);
  CHECK(m.ratio.value == 1.0);
  CHECK(m.ratio.std_error == 0.0);
  CHECK(m.passed);
}

TEST_CASE("measure identities on a modest control") {
  const SimConfig c = spdectl::testing::heat_config(32, 50);
  const ActuatorSet act = spdectl::testing::heat_actuators(c);
  const CostSpec cost(c.grid, 1.0, {{0.18, 0.22, 5.0}, {0.48, 0.52, 2.5}});
  RowMatrix u(50, 3);
  for (int k = 0; k < 50; ++k) {
    for (int l = 0; l < 3; ++l) u(k, l) = std::sin(0.1 * k + l);
  }
  const ControlSequence controls(u, c.dt);
  const MeasureReport r = verify_measures(c, act, controls, cost, 4000, 17);
  CHECK(r.failed_rollouts == 0);
  CHECK(r.martingale.passed);
  CHECK_FALSE(r.martingale.heavy_tailed);
  CHECK(r.kl_passed);
  CHECK(r.legendre_passed);
  CHECK(r.kl_analytic == doctest::Approx(analytic_kl(controls, act.gram(), c.rho)));
  CHECK(r.kl_analytic > 0.0);
}
