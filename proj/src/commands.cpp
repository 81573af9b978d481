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


#include "spdectl/commands.hpp"

#include <chrono>
#include <fstream>

#include <fmt/format.h>
#include <omp.h>

#include "spdectl/batch.hpp"
#include "spdectl/csv.hpp"
#include "spdectl/driver.hpp"
#include "spdectl/info_theory.hpp"

namespace spdectl {

using nlohmann::json;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonfiniteState:
    case ErrorCode::AllRolloutsFailed:
    case ErrorCode::DegenerateActuators:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

ExperimentConfig resolve_config(const CommandOptions& options) {
  ExperimentConfig config;
  if (options.config_path) {
    config = load_config_file(*options.config_path);
  } else if (options.preset) {
    config = load_config_json(json{{"preset", *options.preset}});
  } else {
    throw Error(ErrorCode::ConfigInvalid, "either --config or --preset is required");
  }
  if (options.seed) override_seed(config, *options.seed);
  if (options.out_dir) {
    config.output_dir = options.out_dir->string();
    config.resolved["output_dir"] = config.output_dir;
  }
  return config;
}

namespace {

using Clock = std::chrono::steady_clock;

class Manifest {
 public:
  Manifest(const ExperimentConfig& config, std::string command)
      : config_(config), command_(std::move(command)), start_(Clock::now()) {
    dir_ = config.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoFailure, fmt::format("cannot create {}: {}", dir_.string(), ec.message()));
  }

  const std::filesystem::path& dir() const { return dir_; }

  void csv(const std::string& name, const std::vector<std::string>& header, const RowMatrix& rows) {
    write_csv(dir_ / name, header, rows);
    files_.push_back({{"name", name}, {"rows", rows.rows()}, {"columns", rows.cols()}});
  }

  void json_file(const std::string& name, const json& doc) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, fmt::format("cannot write {}", (dir_ / name).string()));
    files_.push_back({{"name", name}});
  }

  void lineage(const std::string& stream, const std::string& key) { lineage_[stream] = key; }
  void summary(json rows) { summary_ = std::move(rows); }
  void extra(const std::string& key, json value) { extra_[key] = std::move(value); }

  void write() {
    const double wall = std::chrono::duration<double>(Clock::now() - start_).count();
    json m;
    m["tool"] = "spdectl";
    m["version"] = kToolVersion;
    m["command"] = command_;
    m["config_hash"] = config_hash(config_);
    m["master_seed"] = config_.seed;
    m["seed_lineage"] = lineage_;
    m["threads"] = omp_get_max_threads();
    m["wall_clock_seconds"] = wall;
    m["iterations"] = summary_;
    m["files"] = files_;
    for (auto& [k, v] : extra_.items()) m[k] = v;
    m["config"] = config_.resolved;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << m.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write manifest.json");
  }

 private:
  const ExperimentConfig& config_;
  std::string command_;
  Clock::time_point start_;
  std::filesystem::path dir_;
  json files_ = json::array();
  json lineage_ = json::object();
  json summary_ = json::array();
  json extra_ = json::object();
};

RowMatrix stack_states(const std::vector<Field>& states) {
  RowMatrix out(static_cast<Eigen::Index>(states.size()), states.front().values.size());
  for (std::size_t i = 0; i < states.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = states[i].values.transpose();
  return out;
}

json summary_rows(const std::vector<IterationSummary>& history) {
  json rows = json::array();
  for (const IterationSummary& s : history) {
    rows.push_back({{"iteration", s.iteration},
                    {"mean_J", s.mean_cost},
                    {"mean_J_tilde", s.mean_cost_tilde},
                    {"effective_sample_size", s.effective_sample_size},
                    {"failed_rollouts", s.failed}});
  }
  return rows;
}

RowMatrix history_matrix(const std::vector<IterationSummary>& history) {
  RowMatrix m(static_cast<Eigen::Index>(history.size()), 4);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    m(r, 0) = history[i].iteration;
    m(r, 1) = history[i].mean_cost;
    m(r, 2) = history[i].mean_cost_tilde;
    m(r, 3) = history[i].effective_sample_size;
  }
  return m;
}

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

}  // namespace

int cmd_simulate(const ExperimentConfig& config, std::ostream& log) {
  const Experiment exp = build_experiment(config);
  Manifest manifest(config, "simulate");
  ControlSequence controls(config.steps, exp.actuators.count(), config.dt);
  if (!config.simulate_controls_csv.empty()) {
    const CsvTable table = read_csv(config.simulate_controls_csv);
    if (table.rows.rows() != config.steps || table.rows.cols() != exp.actuators.count()) {
      throw Error(ErrorCode::ConfigInvalid,
                  fmt::format("'simulate.controls_csv' must be {}x{}, got {}x{}", config.steps,
                              exp.actuators.count(), table.rows.rows(), table.rows.cols()));
    }
    controls = ControlSequence(table.rows, config.dt);
  }
  const auto header = indexed_header("t", "x_", exp.sim.grid.size());
  for (int r = 0; r < config.simulate_rollouts; ++r) {
    const Trajectory traj =
        rollout(exp.sim, exp.actuators, controls, StreamKey{config.seed, stream_tag::simulate, static_cast<std::uint64_t>(r)});
    manifest.csv(fmt::format("rollout_{:03d}.csv", r), header, with_time_column(stack_states(traj.states), config.dt));
  }
  manifest.lineage("rollout_r", "(master_seed, simulate, r)");
  manifest.write();
  log << fmt::format("simulate: {} rollout(s) written to {}\n", config.simulate_rollouts, manifest.dir().string());
  return kExitOk;
}

int cmd_optimize(const ExperimentConfig& config, std::ostream& log) {
  const Experiment exp = build_experiment(config);
  Manifest manifest(config, "optimize");
  OptimRun run{exp.sim, exp.actuators, exp.cost, config.iterations, config.rollouts, config.seed, std::nullopt, {}, {}};
  if (config.initial_controls) run.initial_controls = ControlSequence(*config.initial_controls, config.dt);
  open_loop_optimize(run);
  const ControlSequence& final = run.final_controls();

  manifest.csv("cost_history.csv", {"iteration", "mean_J", "mean_J_tilde", "effective_sample_size"},
               history_matrix(run.cost_history));
  manifest.csv("final_controls.csv", indexed_header("", "u_", exp.actuators.count()), final.u);

  const ProfileStats eval = evaluate_profiles(exp.sim, exp.actuators, final, exp.cost,
                                              StreamKey{config.seed, stream_tag::eval}, config.eval_rollouts);
  const auto header = indexed_header("t", "x_", exp.sim.grid.size());
  manifest.csv("mean_profile.csv", header, with_time_column(eval.mean, config.dt));
  manifest.csv("std_profile.csv", header, with_time_column(eval.stddev, config.dt));
  const Estimate eval_cost = mean_estimate(eval.costs);

  manifest.lineage("train", "(master_seed, train, iteration, r)");
  manifest.lineage("eval", "(master_seed, eval, r)");
  manifest.summary(summary_rows(run.cost_history));
  manifest.extra("evaluation", {{"rollouts", config.eval_rollouts}, {"mean_J", estimate_json(eval_cost)}});
  manifest.write();
  log << fmt::format("optimize: J {:.6g} -> {:.6g} over {} iterations; evaluation mean J {:.6g} +- {:.2g}\n",
                     run.cost_history.front().mean_cost, run.cost_history.back().mean_cost, config.iterations,
                     eval_cost.value, eval_cost.std_error);
  return kExitOk;
}

int cmd_mpc(const ExperimentConfig& config, std::ostream& log) {
  const Experiment exp = build_experiment(config);
  Manifest manifest(config, "mpc");
  MpcRun run{OptimRun{exp.sim, exp.actuators, exp.cost, config.iterations, config.rollouts, config.seed,
                      std::nullopt, {}, {}},
             config.mpc_inner_iterations, config.plant_noise, {}, {}, 0};
  if (config.initial_controls) run.plan.initial_controls = ControlSequence(*config.initial_controls, config.dt);
  mpc_run(run, config.mpc_total_steps);

  manifest.csv("applied_trajectory.csv", indexed_header("t", "x_", exp.sim.grid.size()),
               with_time_column(stack_states(run.applied), config.dt));
  RowMatrix applied(static_cast<Eigen::Index>(run.steps.size()), exp.actuators.count());
  RowMatrix replans(static_cast<Eigen::Index>(run.plan.cost_history.size()), 5);
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    applied.row(static_cast<Eigen::Index>(k)) = run.steps[k].applied_control.transpose();
    for (const IterationSummary& s : run.steps[k].replans) {
      replans.row(row++) << static_cast<double>(k), s.iteration, s.mean_cost, s.mean_cost_tilde,
          s.effective_sample_size;
    }
  }
  manifest.csv("applied_controls.csv", indexed_header("t", "u_", exp.actuators.count()),
               with_time_column(applied, config.dt));
  manifest.csv("replan_costs.csv", {"step", "iteration", "mean_J", "mean_J_tilde", "effective_sample_size"}, replans);

  json steps = json::array();
  for (const MpcStep& s : run.steps) {
    steps.push_back({{"step", s.step},
                     {"iterations", s.replans.size()},
                     {"final_mean_J", s.replans.back().mean_cost},
                     {"final_mean_J_tilde", s.replans.back().mean_cost_tilde}});
  }
  manifest.lineage("replan", "(master_seed, mpc, step, iteration, r)");
  manifest.lineage("plant", "(master_seed, plant, step)");
  manifest.summary(steps);
  manifest.write();
  log << fmt::format("mpc: {} steps executed, output in {}\n", run.steps_executed, manifest.dir().string());
  return kExitOk;
}

int cmd_verify(const ExperimentConfig& config, std::ostream& log) {
  const Experiment exp = build_experiment(config);
  Manifest manifest(config, "verify");
  const ControlSequence controls = verify_controls(config, exp.actuators.count());
  const MeasureReport r = verify_measures(exp.sim, exp.actuators, controls, exp.cost, config.verify_rollouts, config.seed);
  json report = {
      {"rollouts", r.rollouts},
      {"failed_rollouts", r.failed_rollouts},
      {"free_energy", estimate_json(r.free_energy)},
      {"mean_cost_controlled", estimate_json(r.mean_cost_controlled)},
      {"kl_mc", estimate_json(r.kl_mc)},
      {"kl_analytic", r.kl_analytic},
      {"legendre_gap", estimate_json(r.legendre_gap)},
      {"martingale_mean", estimate_json(r.martingale.ratio)},
      {"martingale_relative_std_error", r.martingale.relative_std_error},
      {"martingale_effective_sample_fraction", r.martingale.effective_sample_fraction},
      {"martingale_heavy_tailed", r.martingale.heavy_tailed},
      {"martingale_passed", r.martingale.passed},
      {"kl_passed", r.kl_passed},
      {"legendre_passed", r.legendre_passed},
      {"all_passed", r.all_passed()},
  };
  manifest.json_file("verify_report.json", report);
  manifest.lineage("base", "(master_seed, verify_base, r)");
  manifest.lineage("controlled", "(master_seed, verify_ctrl, r)");
  manifest.write();
  log << fmt::format(
      "martingale  mean {:.6f} +- {:.2g}  {}\n"
      "kl          mc {:.6g} +- {:.2g}  analytic {:.6g}  {}\n"
      "legendre    gap {:.6g} +- {:.2g}  {}\n"
      "free energy {:.6g} +- {:.2g}\n",
      r.martingale.ratio.value, r.martingale.ratio.std_error, r.martingale.passed ? "pass" : "FAIL", r.kl_mc.value,
      r.kl_mc.std_error, r.kl_analytic, r.kl_passed ? "pass" : "FAIL", r.legendre_gap.value, r.legendre_gap.std_error,
      r.legendre_passed ? "pass" : "FAIL", r.free_energy.value, r.free_energy.std_error);
  return r.all_passed() ? kExitOk : kExitStatistical;
}

}  // namespace spdectl
