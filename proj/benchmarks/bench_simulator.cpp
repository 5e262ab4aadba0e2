#include <benchmark/benchmark.h>

#include "bsf/simulator.hpp"

namespace {

bsf::ClusterConfig sample_config(int workers, bsf::ScheduleMode mode) {
  bsf::BsfParams p;
  p.latency = 0.5;
  p.send_cost = 1.0;
  p.work_cost = 10000.0;
  p.receive_cost = 4.0;
  p.process_cost = 5.0;
  return bsf::ClusterConfig::from_params(p, workers, mode);
}

void bm_simulate_serialized(benchmark::State& state) {
  const auto cfg = sample_config(static_cast<int>(state.range(0)),
                                 bsf::ScheduleMode::serialized);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsf::simulate_iteration(cfg).t_measured);
  }
}
BENCHMARK(bm_simulate_serialized)->Arg(8)->Arg(64)->Arg(512);

void bm_simulate_pipelined(benchmark::State& state) {
  const auto cfg = sample_config(static_cast<int>(state.range(0)),
                                 bsf::ScheduleMode::pipelined);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsf::simulate_iteration(cfg).t_measured);
  }
}
BENCHMARK(bm_simulate_pipelined)->Arg(8)->Arg(64)->Arg(512);

void bm_speedup_curve_1_to_128(benchmark::State& state) {
  bsf::BsfParams p;
  p.latency = 0.5;
  p.send_cost = 1.0;
  p.work_cost = 10000.0;
  p.receive_cost = 4.0;
  p.process_cost = 5.0;
  std::vector<long long> ks(128);
  for (int i = 0; i < 128; ++i) ks[i] = i + 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bsf::measured_speedup(p, ks, bsf::ScheduleMode::serialized));
  }
}
BENCHMARK(bm_speedup_curve_1_to_128);

}  // namespace

BENCHMARK_MAIN();
