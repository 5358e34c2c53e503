// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference path against the OpenMP path for the parallel kernels:
// plane channels, the SDP solve (Schur assembly) and a PSO run (fitness pass).

#include "rmaisac/harness.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace rmaisac;

namespace {

Execution execution_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

ScenarioConfig config_of(int n) {
  ScenarioConfig c;
  c.num_users = 2;
  c.n_tx = c.n_rx = n;
  c.seed = 1;
  return c;
}

void BM_PlaneChannels(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.1, 0.1), ang(0.3, 1.2);
  std::vector<EntityPosition> entities;
  for (int i = 0; i < 64; ++i) entities.push_back({10.0 + u(rng), ang(rng), ang(rng)});
  std::vector<Vec3> elements;
  for (int i = 0; i < 1024; ++i) elements.emplace_back(0.0, u(rng), u(rng));
  const Execution exec = execution_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(plane_channels(entities, elements, Vec3::UnitX(), 1e-5, 0.0125, exec));
  label(state);
}

void BM_SensingSdp(benchmark::State& state) {
  const ScenarioConfig c = config_of(8);
  const ScenarioInstance inst = generate_scenario(c, c.seed);
  const BeamformingData data = beamforming_data(inst.scenario, inst.initial, c.gamma_min_linear());
  SdpOptions options;
  options.execution = execution_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(solve_sensing_sdp({data}, options));
  label(state);
}

void BM_PsoSensing(benchmark::State& state) {
  const ScenarioConfig c = config_of(4);
  const ScenarioInstance inst = generate_scenario(c, c.seed);
  const Scenario& sc = inst.scenario;
  const SdpSolveReport rep =
      solve_sensing_sdp({beamforming_data(sc, inst.initial, c.gamma_min_linear())});
  FitnessContext ctx;
  ctx.geometry = sc.geometry;
  ctx.wavelength = sc.wavelength;
  ctx.users = sc.users;
  ctx.target = sc.target;
  ctx.eta = sc.eta;
  ctx.beam = rank_one_recovery(rep, build_channels(inst.initial, sc.users, sc.target, sc.eta, sc.geometry,
                                                   sc.wavelength));
  ctx.coherence_length = sc.coherence_length;
  ctx.target_noise_power = sc.target_noise_power;
  ctx.user_noise_powers = sc.user_noise_powers;
  ctx.gamma_min = c.gamma_min_linear();
  PsoConfig pso;
  pso.swarm_size = 100;
  pso.max_iterations = 10;
  pso.seed = 3;
  pso.execution = execution_of(state);
  const FitnessFunction fitness = [&](const ArrayState& s) { return fitness_sensing(s, ctx); };
  const std::vector<bool> free(static_cast<std::size_t>(ParticleLayout{4, 4}.size()), true);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_pso(inst.initial, Mode::sensing, pso, sc.geometry.region_side, free, fitness));
  label(state);
}

}  // namespace

BENCHMARK(BM_PlaneChannels)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SensingSdp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PsoSensing)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
