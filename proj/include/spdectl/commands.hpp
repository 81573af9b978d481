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
#include <ostream>
#include <string>

#include "spdectl/config.hpp"
#include "spdectl/error.hpp"

namespace spdectl {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitStatistical = 3 };

int exit_code_for(ErrorCode code) noexcept;

struct CommandOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::string> preset;  // used when no config file is given
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  int threads = 0;  // 0 keeps the OpenMP default
};

/// Loads the config named by the options and applies --seed / --out-dir.
ExperimentConfig resolve_config(const CommandOptions& options);

/// Each command writes its files under config.output_dir together with manifest.json and returns
/// an exit code. Library errors propagate as exceptions.
int cmd_simulate(const ExperimentConfig& config, std::ostream& log);
int cmd_optimize(const ExperimentConfig& config, std::ostream& log);
int cmd_mpc(const ExperimentConfig& config, std::ostream& log);
int cmd_verify(const ExperimentConfig& config, std::ostream& log);

}  // namespace spdectl
