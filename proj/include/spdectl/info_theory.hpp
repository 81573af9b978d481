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

#include <cstdint>
#include <span>

#include "spdectl/actuators.hpp"
#include "spdectl/cost.hpp"
#include "spdectl/spde_sim.hpp"

namespace spdectl {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error of the mean.
Estimate mean_estimate(std::span<const double> samples);

/// V = -(1/rho) log E[exp(-rho J)], evaluated as min J - (1/rho) log mean exp(-rho (J - min J))
/// with a delta-method standard error. Throws insufficient-samples for fewer than two finite costs.
Estimate estimate_free_energy(std::span<const double> costs, double rho);

/// log dL~/dL = sqrt(rho) sum_k u_k . du_k + (rho/2) sum_k u_k' M u_k dt (equals rho * zeta).
double log_rn_derivative(const ControlSequence& controls, const RowMatrix& deltas, const Eigen::MatrixXd& gram,
                         double rho);

/// KL(L~ || L) in closed form: (rho/2) sum_k u_k' M u_k dt. The relative entropy S of the
/// free-energy duality is the negative of this quantity.
double analytic_kl(const ControlSequence& controls, const Eigen::MatrixXd& gram, double rho);

/// Legendre gap for R weighted atoms with uniform base weights 1/R:
/// sum_r w_r J_r + (1/rho) sum_r w_r log(R w_r) + (1/rho) log mean exp(-rho J). Never negative;
/// zero exactly for the Gibbs weights.
double discrete_legendre_gap(std::span<const double> costs, std::span<const double> weights, double rho);
/// The same gap evaluated at the Gibbs weights w_r proportional to exp(-rho J_r).
double gibbs_legendre_gap(std::span<const double> costs, double rho);

inline constexpr int kMinVerifyRollouts = 100;

struct MartingaleCheck {
  Estimate ratio;  // mean of dQ/dP under the base measure
  double relative_std_error = 0.0;
  double effective_sample_fraction = 1.0;
  bool heavy_tailed = false;
  bool passed = false;  // |mean - 1| <= 3 stderr
};

/// Samples R base-measure noise paths and averages
/// exp(sqrt(rho) sum u . du - (rho/2) sum u' M u dt). The ratio depends on the noise path only.
MartingaleCheck verify_martingale(const SimConfig& config, const ActuatorSet& actuators,
                                  const ControlSequence& controls, int rollouts, std::uint64_t seed);

struct MeasureReport {
  Estimate free_energy;           // -(1/rho) log E_L[exp(-rho J)]
  Estimate mean_cost_controlled;  // E_L~[J]
  Estimate kl_mc;                 // E_L~[log dL~/dL]
  double kl_analytic = 0.0;
  Estimate legendre_gap;  // E_L~[J] + KL/rho - V, std error combines both batches
  MartingaleCheck martingale;
  int rollouts = 0;
  int failed_rollouts = 0;

  bool kl_passed = false;        // |kl_mc - kl_analytic| <= 3 stderr
  bool legendre_passed = false;  // gap >= -3 stderr
  bool all_passed() const noexcept { return kl_passed && legendre_passed && martingale.passed; }
};

/// KL consistency and the free-energy / relative-entropy inequality from a base batch and a
/// controlled batch of R rollouts each. Martingale fields are left default.
MeasureReport verify_kl_and_legendre(const SimConfig& config, const ActuatorSet& actuators,
                                     const ControlSequence& controls, const CostSpec& cost, int rollouts,
                                     std::uint64_t seed);

/// verify_kl_and_legendre plus verify_martingale on the same seed.
MeasureReport verify_measures(const SimConfig& config, const ActuatorSet& actuators, const ControlSequence& controls,
                              const CostSpec& cost, int rollouts, std::uint64_t seed);

}  // namespace spdectl
