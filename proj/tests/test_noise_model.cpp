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

#include <boost/math/distributions/chi_squared.hpp>

#include "spdectl/error.hpp"
#include "spdectl/noise_model.hpp"

using namespace spdectl;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

// Closed-form eigenfunction, independent of the library basis.
double mode_value(const Grid& g, int s, double x) {
  const double len = g.length();
  const double t = (x - g.a()) / len;
  if (g.bc() == Boundary::DirichletZero) return std::sqrt(2.0 / len) * std::sin(s * M_PI * t);
  if (s == 1) return 1.0 / std::sqrt(len);
  return std::sqrt(2.0 / len) * std::cos((s - 1) * M_PI * t);
}

std::vector<double> random_row(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("sine basis is orthonormal") {
  const Grid g(0.0, 1.0, 64, Boundary::DirichletZero);
  const NoiseModel m = build_eigenbasis(g, 32);
  CHECK(std::abs(inner_product(m.eigenfunction(0), m.eigenfunction(0)) - 1.0) < 1e-10);
  CHECK(std::abs(inner_product(m.eigenfunction(0), m.eigenfunction(1))) < 1e-10);
  for (int s = 0; s < m.modes(); ++s) {
    for (int r = 0; r <= s; ++r) {
      const double ip = inner_product(m.eigenfunction(s), m.eigenfunction(r));
      CHECK(std::abs(ip - (r == s ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("cosine basis is orthonormal and starts with the constant mode") {
  const Grid g(0.0, 10.0, 200, Boundary::NeumannZero);
  const NoiseModel m = build_eigenbasis(g, 100);
  const Field e1 = m.eigenfunction(0);
  for (int k = 0; k < g.size(); ++k) CHECK(std::abs(e1.values[k] - 1.0 / std::sqrt(10.0)) < 1e-14);
  for (int s = 0; s < m.modes(); s += 7) {
    for (int r = 0; r < m.modes(); r += 5) {
      const double ip = inner_product(m.eigenfunction(s), m.eigenfunction(r));
      CHECK(std::abs(ip - (r == s ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("basis matches the closed form") {
  for (Boundary bc : {Boundary::DirichletZero, Boundary::NeumannZero}) {
    const Grid g(-2.0, 3.0, 40, bc);
    const NoiseModel m = build_eigenbasis(g, 20);
    for (int s = 0; s < 20; ++s) {
      for (int k = 0; k < g.size(); ++k) CHECK(std::abs(m.basis()(k, s) - mode_value(g, s + 1, g.node(k))) < 1e-12);
    }
  }
}

TEST_CASE("truncation limits") {
  const Grid g(0.0, 1.0, 16, Boundary::DirichletZero);
  CHECK(build_eigenbasis(g, 15).modes() == 15);
  CHECK(code_of([&] { build_eigenbasis(g, 16); }) == ErrorCode::TruncationTooLarge);
  CHECK(code_of([&] { build_eigenbasis(g, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_eigenbasis(g, std::vector<double>{1.0, -0.5}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("increment variance lies inside the chi-square band") {
  const Grid g(0.0, 1.0, 64, Boundary::DirichletZero);
  const NoiseModel m = build_eigenbasis(g, 32);
  const double dt = 0.01;
  const IncrementTable t = sample_increments(2024, 0, 1000, m, dt);
  REQUIRE(t.dbeta.rows() == 1000);
  REQUIRE(t.dbeta.cols() == 32);
  const double n = static_cast<double>(t.dbeta.size());

  // Zero-mean draws: n * s^2 / dt ~ chi^2_n.
  boost::math::chi_squared chi(n);
  const double lo = dt * boost::math::quantile(chi, 0.005) / n;
  const double hi = dt * boost::math::quantile(chi, 0.995) / n;
  CHECK(lo >= 0.0095);
  CHECK(hi <= 0.0105);

  const double var = t.dbeta.squaredNorm() / n;
  CHECK(var >= 0.0095);
  CHECK(var <= 0.0105);
  CHECK(std::abs(t.dbeta.mean()) < 4.0 * std::sqrt(dt / n));
}

TEST_CASE("increment streams are keyed") {
  const Grid g(0.0, 1.0, 32, Boundary::DirichletZero);
  const NoiseModel m = build_eigenbasis(g, 16);
  const IncrementTable a = sample_increments(5, 3, 50, m, 0.01);
  const IncrementTable b = sample_increments(5, 3, 50, m, 0.01);
  const IncrementTable c = sample_increments(5, 4, 50, m, 0.01);
  const IncrementTable d = sample_increments(6, 3, 50, m, 0.01);
  CHECK(a.dbeta == b.dbeta);
  CHECK(a.dbeta != c.dbeta);
  CHECK(a.dbeta != d.dbeta);

  // Sampling order does not matter.
  const IncrementTable c_first = sample_increments(StreamKey{5, 4}, 50, m, 0.01);
  CHECK(c_first.dbeta == c.dbeta);
  CHECK(a.key == (StreamKey{5, 3}));
}

TEST_CASE("assembled field reproduces the basis") {
  const Grid g(0.0, 1.0, 64, Boundary::DirichletZero);
  const NoiseModel m = build_eigenbasis(g, 32);
  std::vector<double> row(32, 0.0);
  CHECK(assemble_noise_field(m, row).values.isZero(0.0));
  row[0] = 1.0;
  const Field e1 = assemble_noise_field(m, row);
  for (int k = 0; k < g.size(); ++k) CHECK(std::abs(e1.values[k] - mode_value(g, 1, g.node(k))) < 1e-13);

  row[0] = 0.7;
  row[1] = -1.3;
  const Field two = assemble_noise_field(m, row);
  for (int k = 0; k < g.size(); ++k) {
    const double expect = 0.7 * mode_value(g, 1, g.node(k)) - 1.3 * mode_value(g, 2, g.node(k));
    CHECK(std::abs(two.values[k] - expect) < 1e-13);
  }
  CHECK(code_of([&] { assemble_noise_field(m, std::vector<double>(31, 0.0)); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("fast synthesis agrees with direct summation") {
  std::mt19937_64 rng(99);
  for (Boundary bc : {Boundary::DirichletZero, Boundary::NeumannZero}) {
    for (int intervals : {8, 64, 1000}) {
      const Grid g(0.0, 10.0, intervals, bc);
      const NoiseModel m = build_eigenbasis(g, intervals / 2);
      const auto row = random_row(rng, m.modes());
      const Field fast = assemble_noise_field(m, row);
      const Field slow = assemble_noise_field_direct(m, row);
      // Independent oracle: closed-form modes, then the boundary closure.
      Field oracle(g);
      for (int k = 0; k < g.size(); ++k) {
        for (int s = 0; s < m.modes(); ++s) oracle.values[k] += row[s] * mode_value(g, s + 1, g.node(k));
      }
      oracle = apply_bc(oracle);
      CHECK((fast.values - slow.values).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((fast.values - oracle.values).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("diagonal eigenvalues scale each mode by sqrt(lambda)") {
  const Grid g(0.0, 1.0, 32, Boundary::DirichletZero);
  const NoiseModel m = build_eigenbasis(g, std::vector<double>{4.0, 0.25, 0.0});
  CHECK(m.kind() == NoiseKind::Diagonal);
  const Field f = assemble_noise_field(m, std::vector<double>{1.0, 1.0, 1.0});
  for (int k = 0; k < g.size(); ++k) {
    const double expect = 2.0 * mode_value(g, 1, g.node(k)) + 0.5 * mode_value(g, 2, g.node(k));
    CHECK(std::abs(f.values[k] - expect) < 1e-13);
  }
}

TEST_CASE("assembly is linear") {
  const Grid g(0.0, 2.0, 100, Boundary::NeumannZero);
  const NoiseModel m = build_eigenbasis(g, 50);
  std::mt19937_64 rng(3);
  const auto x = random_row(rng, 50), y = random_row(rng, 50);
  std::vector<double> z(50);
  for (int s = 0; s < 50; ++s) z[s] = 2.5 * x[s] - 0.75 * y[s];
  const Eigen::VectorXd lhs = assemble_noise_field(m, z).values;
  const Eigen::VectorXd rhs = 2.5 * assemble_noise_field(m, x).values - 0.75 * assemble_noise_field(m, y).values;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adding modes keeps the existing coefficients") {
  const Grid g(0.0, 1.0, 64, Boundary::DirichletZero);
  const NoiseModel small = build_eigenbasis(g, 8);
  const NoiseModel large = build_eigenbasis(g, 32);
  CHECK(large.basis().leftCols(8) == small.basis());
  std::mt19937_64 rng(5);
  const auto row = random_row(rng, 8);
  std::vector<double> padded(row);
  padded.resize(32, 0.0);
  const Field f = assemble_noise_field(large, padded);
  for (int s = 0; s < 8; ++s) CHECK(std::abs(inner_product(f, large.eigenfunction(s)) - row[s]) < 1e-12);
}

TEST_CASE("cylindrical increments have identity spatial covariance") {
  const Grid g(0.0, 1.0, 64, Boundary::DirichletZero);
  const NoiseModel m = build_eigenbasis(g, 32);
  const double dt = 0.01;
  const int n = 10000;
  const IncrementTable t = sample_increments(StreamKey{77, 1}, n, m, dt);
  constexpr int kModes = 4;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(kModes, kModes);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(kModes, kModes);
  for (int j = 0; j < n; ++j) {
    const Field dw = assemble_noise_field(m, t.row(j));
    Eigen::VectorXd proj(kModes);
    for (int s = 0; s < kModes; ++s) proj[s] = inner_product(dw, m.eigenfunction(s));
    const Eigen::MatrixXd outer = proj * proj.transpose() / dt;
    sum += outer;
    sum_sq += outer.cwiseProduct(outer);
  }
  for (int s = 0; s < kModes; ++s) {
    for (int r = 0; r < kModes; ++r) {
      const double mean = sum(s, r) / n;
      const double var = sum_sq(s, r) / n - mean * mean;
      const double se = std::sqrt(var / n);
      CHECK(std::abs(mean - (s == r ? 1.0 : 0.0)) <= 3.0 * se);
    }
  }
}
