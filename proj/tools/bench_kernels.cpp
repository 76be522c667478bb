// SPDX-License-Identifier: Apache-2.0
//
// Serial reference against the OpenMP kernels. The argument selects the
// schedule: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "wapat/attenuation_operator.hpp"
#include "wapat/reconstruction.hpp"
#include "wapat/wavefield.hpp"

using namespace wapat;

namespace {

Execution schedule(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

WaveData random_wave(DataKind kind, const TimeGrid& tg, std::size_t sensors) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WaveData d(kind, tg, make_circle_sensors(1.7, sensors));
  for (double& v : d.values) v = u(rng);
  return d;
}

void BM_Ubp2d(benchmark::State& state) {
  const WaveData p = random_wave(DataKind::Pressure, TimeGrid::from_duration(6.0, 443), 849);
  const ImageGrid grid = ImageGrid::square(128, 1.0);
  UbpOptions opts;
  opts.execution = schedule(state);
  for (auto _ : state) benchmark::DoNotOptimize(ubp_2d(p, grid, opts));
}

void BM_ApplyAttenuation(benchmark::State& state) {
  const TimeGrid tg = TimeGrid::from_duration(6.0, 443);
  const AttenuationSystem sys = build_system(NswLaw{0.11, 0.1}, tg);
  const WaveData q = random_wave(DataKind::Integrated, tg, 849);
  for (auto _ : state) benchmark::DoNotOptimize(apply_attenuation(sys, q, schedule(state)));
}

void BM_InvertAttenuation(benchmark::State& state) {
  const TimeGrid tg = TimeGrid::from_duration(6.0, 443);
  const AttenuationSystem sys = build_system(NswLaw{0.11, 0.1}, tg);
  const WaveData qa = random_wave(DataKind::AttenuatedIntegrated, tg, 849);
  for (auto _ : state) benchmark::DoNotOptimize(invert_attenuation(sys, qa, Regularization::none(), schedule(state)));
}

void BM_SpectralForward(benchmark::State& state) {
  const Phantom phantom = make_shepp_logan(128, 1.0, 2);
  ForwardOptions opts;
  opts.execution = schedule(state);
  const TimeGrid tg = TimeGrid::from_duration(6.0, 250);
  const SensorArray sensors = make_circle_sensors(1.7, 256);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_forward(phantom, tg, sensors, opts));
}

}  // namespace

BENCHMARK(BM_Ubp2d)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyAttenuation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InvertAttenuation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectralForward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
