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


#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "spdectl/commands.hpp"

int main(int argc, char** argv) {
  using namespace spdectl;
  CLI::App app{"Sampling-based stochastic control of semilinear SPDEs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommandOptions options;
  std::string config_path;
  std::string preset;
  std::uint64_t seed = 0;
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--preset", preset, "built-in preset: heat_tracking, nagumo_accelerate, nagumo_suppress");
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--threads", options.threads, "OpenMP threads")->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", out_dir, "output directory");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "write uncontrolled or fixed-control rollouts");
  CLI::App* optimize = app.add_subcommand("optimize", "open-loop trajectory optimization");
  CLI::App* mpc = app.add_subcommand("mpc", "receding-horizon control of a noisy plant");
  CLI::App* verify = app.add_subcommand("verify", "Monte-Carlo checks of the change-of-measure identities");
  for (CLI::App* sub : {simulate, optimize, mpc, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (!config_path.empty()) options.config_path = config_path;
  if (!preset.empty()) options.preset = preset;
  if (chosen->count("--seed")) options.seed = seed;
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (options.threads > 0) omp_set_num_threads(options.threads);

  try {
    const ExperimentConfig config = resolve_config(options);
    if (chosen == simulate) return cmd_simulate(config, std::cout);
    if (chosen == optimize) return cmd_optimize(config, std::cout);
    if (chosen == mpc) return cmd_mpc(config, std::cout);
    return cmd_verify(config, std::cout);
  } catch (const Error& e) {
    std::cerr << fmt::format("error [{}]: {}\n", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return kExitUsage;
  }
}
