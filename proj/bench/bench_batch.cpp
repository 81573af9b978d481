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


// Serial reference vs OpenMP rollout batches, and FFT vs direct noise assembly.

#include <omp.h>

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "spdectl/batch.hpp"
#include "spdectl/config.hpp"
#include "spdectl/noise_model.hpp"

using namespace spdectl;

namespace {

Experiment heat() { return build_experiment(load_config_json({{"preset", "heat_tracking"}})); }

void BM_BatchSerial(benchmark::State& state) {
  const Experiment e = heat();
  const ControlSequence u(e.sim.steps, e.actuators.count(), e.sim.dt);
  const int rollouts = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto recs = simulate_batch_serial(e.sim, e.actuators, u, e.cost, StreamKey{1, stream_tag::train}, rollouts);
    benchmark::DoNotOptimize(recs.data());
  }
  state.SetItemsProcessed(state.iterations() * rollouts);
}

void BM_BatchOpenMP(benchmark::State& state) {
  const Experiment e = heat();
  const ControlSequence u(e.sim.steps, e.actuators.count(), e.sim.dt);
  const int rollouts = static_cast<int>(state.range(0));
  state.counters["threads"] = omp_get_max_threads();
  for (auto _ : state) {
    auto recs = simulate_batch(e.sim, e.actuators, u, e.cost, StreamKey{1, stream_tag::train}, rollouts);
    benchmark::DoNotOptimize(recs.data());
  }
  state.SetItemsProcessed(state.iterations() * rollouts);
}

std::vector<double> increments(int modes) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<double> v(static_cast<std::size_t>(modes));
  for (double& x : v) x = n(rng);
  return v;
}

void BM_NoiseFft(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0));
  const Grid g(0.0, 10.0, J, Boundary::NeumannZero);
  const NoiseModel m = build_eigenbasis(g, J / 2);
  const auto db = increments(m.modes());
  for (auto _ : state) benchmark::DoNotOptimize(assemble_noise_field(m, db));
}

void BM_NoiseDirect(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0));
  const Grid g(0.0, 10.0, J, Boundary::NeumannZero);
  const NoiseModel m = build_eigenbasis(g, J / 2);
  const auto db = increments(m.modes());
  for (auto _ : state) benchmark::DoNotOptimize(assemble_noise_field_direct(m, db));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchOpenMP)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoiseFft)->Arg(64)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NoiseDirect)->Arg(64)->Arg(1000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
