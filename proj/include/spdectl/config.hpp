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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spdectl/actuators.hpp"
#include "spdectl/cost.hpp"
#include "spdectl/spde_sim.hpp"

namespace spdectl {

inline constexpr const char* kToolVersion = "0.1.0";

enum class InitialKind { Zero, Constant, NagumoFront, Values };

struct InitialCondition {
  InitialKind kind = InitialKind::Zero;
  double value = 0.0;
  std::vector<double> values;
};

/// Every tunable of an experiment. Built from a preset and/or a JSON file; unknown keys are
/// rejected and physical quantities validated while loading.
struct ExperimentConfig {
  nlohmann::json resolved;  // merged document, the source of config_hash()

  std::string preset;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  double a = 0.0;
  double b = 1.0;
  int intervals = 64;
  Boundary bc = Boundary::DirichletZero;
  DriftSpec drift;
  NoiseKind noise_kind = NoiseKind::Cylindrical;
  int modes = 32;
  std::vector<double> eigenvalues;
  double rho = 10.0;
  double dt = 0.01;
  int steps = 100;
  bool deterministic = false;
  InitialCondition initial;

  std::vector<double> mus;
  std::vector<double> sigmas;

  double kappa = 1.0;
  bool terminal_only = false;
  std::vector<CostWindow> windows;

  int iterations = 100;
  int rollouts = 100;
  int eval_rollouts = 100;
  std::optional<RowMatrix> initial_controls;

  int mpc_total_steps = 100;
  int mpc_inner_iterations = 100;
  bool plant_noise = true;

  int verify_rollouts = 10000;
  double verify_amplitude = 1.0;

  int simulate_rollouts = 1;
  std::string simulate_controls_csv;
};

/// Runtime objects assembled from a config.
struct Experiment {
  SimConfig sim;
  ActuatorSet actuators;
  CostSpec cost;
};

std::vector<std::string> preset_names();
/// Throws config-invalid for an unknown name.
nlohmann::json preset_json(const std::string& name);

/// Deep-merges doc over its "preset" (if any), validates, and returns the typed config.
/// Throws config-invalid naming the offending key.
ExperimentConfig load_config_json(const nlohmann::json& doc);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Replaces the seed (and refreshes resolved).
void override_seed(ExperimentConfig& config, std::uint64_t seed);

Experiment build_experiment(const ExperimentConfig& config);
Field build_initial_condition(const Grid& grid, const InitialCondition& ic);

/// FNV-1a over the canonical serialization of every semantic field (output_dir excluded).
std::string config_hash(const ExperimentConfig& config);

/// Deterministic modest control used by the verifier: u_kl = A sin(2 pi (k + 1/2) / L + l).
ControlSequence verify_controls(const ExperimentConfig& config, int actuators);

}  // namespace spdectl
