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

#include "spdectl/info_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "spdectl/batch.hpp"
#include "spdectl/error.hpp"

namespace spdectl {

namespace {

void require_samples(int rollouts) {
  if (rollouts < kMinVerifyRollouts) {
    throw Error(ErrorCode::InsufficientSamples,
                fmt::format("verification needs at least {} rollouts, got {}", kMinVerifyRollouts, rollouts));
  }
}

}  // namespace

Estimate mean_estimate(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::InsufficientSamples, "need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Estimate estimate_free_energy(std::span<const double> costs, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be > 0");
  std::vector<double> finite;
  finite.reserve(costs.size());
  for (double c : costs) {
    if (std::isfinite(c)) finite.push_back(c);
  }
  if (finite.size() < 2) throw Error(ErrorCode::InsufficientSamples, "free energy needs at least two finite costs");
  const double lowest = *std::min_element(finite.begin(), finite.end());
  // exp(-rho d) - 1 keeps full precision when rho d is tiny.
  std::vector<double> shifted(finite.size());
  for (std::size_t r = 0; r < finite.size(); ++r) shifted[r] = std::expm1(-rho * (finite[r] - lowest));
  const Estimate m = mean_estimate(shifted);
  const double mean_y = 1.0 + m.value;
  const double value = lowest - std::log1p(m.value) / rho;
  return {value, m.std_error / (rho * mean_y)};
}

double log_rn_derivative(const ControlSequence& controls, const RowMatrix& deltas, const Eigen::MatrixXd& gram,
                         double rho) {
  if (deltas.rows() != controls.u.rows() || deltas.cols() != controls.u.cols() ||
      gram.rows() != controls.u.cols() || gram.cols() != controls.u.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "controls, deltas and Gram matrix disagree in shape");
  }
  double linear = 0.0;
  double quadratic = 0.0;
  for (Eigen::Index k = 0; k < controls.u.rows(); ++k) {
    linear += controls.u.row(k).dot(deltas.row(k));
    quadratic += controls.u.row(k) * gram * controls.u.row(k).transpose();
  }
  return std::sqrt(rho) * linear + 0.5 * rho * quadratic * controls.dt;
}

double analytic_kl(const ControlSequence& controls, const Eigen::MatrixXd& gram, double rho) {
  double quadratic = 0.0;
  for (Eigen::Index k = 0; k < controls.u.rows(); ++k) {
    quadratic += controls.u.row(k) * gram * controls.u.row(k).transpose();
  }
  return 0.5 * rho * quadratic * controls.dt;
}

double discrete_legendre_gap(std::span<const double> costs, std::span<const double> weights, double rho) {
  if (costs.size() != weights.size() || costs.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "costs and weights must be non-empty and equally long");
  }
  const double n = static_cast<double>(costs.size());
  const double lowest = *std::min_element(costs.begin(), costs.end());
  double sum_exp = 0.0;
  for (double c : costs) sum_exp += std::exp(-rho * (c - lowest));
  const double free_energy = lowest - std::log(sum_exp / n) / rho;
  double energy = 0.0;
  double kl = 0.0;
  for (std::size_t r = 0; r < costs.size(); ++r) {
    if (weights[r] <= 0.0) continue;
    energy += weights[r] * costs[r];
    kl += weights[r] * std::log(n * weights[r]);
  }
  return energy + kl / rho - free_energy;
}

double gibbs_legendre_gap(std::span<const double> costs, double rho) {
  if (costs.empty()) throw Error(ErrorCode::InsufficientSamples, "no costs");
  const double n = static_cast<double>(costs.size());
  const double lowest = *std::min_element(costs.begin(), costs.end());
  double sum_exp = 0.0;
  for (double c : costs) sum_exp += std::exp(-rho * (c - lowest));
  const double log_norm = std::log(sum_exp);
  const double free_energy = lowest - (log_norm - std::log(n)) / rho;
  // log w_r is formed directly so that atoms with underflowing weight contribute exactly 0.
  double energy = 0.0;
  double kl = 0.0;
  for (double c : costs) {
    const double log_w = -rho * (c - lowest) - log_norm;
    const double w = std::exp(log_w);
    if (w == 0.0) continue;
    energy += w * c;
    kl += w * (std::log(n) + log_w);
  }
  return energy + kl / rho - free_energy;
}

MartingaleCheck verify_martingale(const SimConfig& config, const ActuatorSet& actuators,
                                  const ControlSequence& controls, int rollouts, std::uint64_t seed) {
  require_samples(rollouts);
  config.validate();
  if (controls.steps() != config.steps || controls.actuators() != actuators.count()) {
    throw Error(ErrorCode::ShapeMismatch, "control sequence does not match the horizon / actuators");
  }
  const double quad = 0.5 * config.rho * [&] {
    double q = 0.0;
    for (Eigen::Index k = 0; k < controls.u.rows(); ++k) {
      q += controls.u.row(k) * actuators.gram() * controls.u.row(k).transpose();
    }
    return q * controls.dt;
  }();
  const StreamKey prefix{seed, stream_tag::verify_base};
  std::vector<double> ratios(static_cast<std::size_t>(rollouts));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rollouts; ++r) {
    const IncrementTable inc = rollout_increments(config, prefix.child(static_cast<std::uint64_t>(r)), config.steps);
    const Eigen::Map<const RowMatrix> dbeta(inc.dbeta.data(), inc.dbeta.rows(), inc.dbeta.cols());
    const RowMatrix deltas = dbeta * actuators.projections().transpose();
    double linear = 0.0;
    for (Eigen::Index k = 0; k < controls.u.rows(); ++k) linear += controls.u.row(k).dot(deltas.row(k));
    ratios[r] = std::exp(std::sqrt(config.rho) * linear - quad);
  }
  MartingaleCheck check;
  check.ratio = mean_estimate(ratios);
  check.relative_std_error = check.ratio.std_error / std::abs(check.ratio.value);
  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : ratios) {
    s1 += v;
    s2 += v * v;
  }
  check.effective_sample_fraction = (s1 * s1 / s2) / static_cast<double>(rollouts);
  // A lognormal ratio with a small effective sample fraction has an unreliable sample variance.
  check.heavy_tailed = check.relative_std_error > 0.1 || check.effective_sample_fraction < 0.1;
  check.passed = std::abs(check.ratio.value - 1.0) <= 3.0 * check.ratio.std_error;
  return check;
}

MeasureReport verify_kl_and_legendre(const SimConfig& config, const ActuatorSet& actuators,
                                     const ControlSequence& controls, const CostSpec& cost, int rollouts,
                                     std::uint64_t seed) {
  require_samples(rollouts);
  const ControlSequence zero(config.steps, actuators.count(), config.dt);
  const auto base =
      simulate_batch(config, actuators, zero, cost, StreamKey{seed, stream_tag::verify_base}, rollouts);
  const auto controlled =
      simulate_batch(config, actuators, controls, cost, StreamKey{seed, stream_tag::verify_ctrl}, rollouts);

  MeasureReport report;
  report.rollouts = rollouts;
  std::vector<double> base_costs;
  for (const RolloutRecord& r : base) {
    if (r.ok) base_costs.push_back(r.cost);
    else ++report.failed_rollouts;
  }
  std::vector<double> costs, log_rn, costs_tilde;
  for (const RolloutRecord& r : controlled) {
    if (!r.ok) {
      ++report.failed_rollouts;
      continue;
    }
    costs.push_back(r.cost);
    log_rn.push_back(log_rn_derivative(controls, r.deltas, actuators.gram(), config.rho));
    costs_tilde.push_back(r.cost + log_rn.back() / config.rho);
  }
  if (base_costs.size() < 2 || costs.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "too many rollouts diverged for verification");
  }
  report.free_energy = estimate_free_energy(base_costs, config.rho);
  report.mean_cost_controlled = mean_estimate(costs);
  report.kl_mc = mean_estimate(log_rn);
  report.kl_analytic = analytic_kl(controls, actuators.gram(), config.rho);
  const Estimate upper = mean_estimate(costs_tilde);
  report.legendre_gap.value = upper.value - report.free_energy.value;
  report.legendre_gap.std_error = std::hypot(upper.std_error, report.free_energy.std_error);
  report.kl_passed = std::abs(report.kl_mc.value - report.kl_analytic) <= 3.0 * report.kl_mc.std_error;
  report.legendre_passed = report.legendre_gap.value >= -3.0 * report.legendre_gap.std_error;
  return report;
}

MeasureReport verify_measures(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                              const CostSpec& cost, int rollouts, std::uint64_t seed) {
  MeasureReport report = verify_kl_and_legendre(config, actuators, controls, cost, rollouts, seed);
  report.martingale = verify_martingale(config, actuators, controls, rollouts, seed);
  return report;
}

}  // namespace spdectl
