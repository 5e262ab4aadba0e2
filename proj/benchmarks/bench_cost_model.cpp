#include <benchmark/benchmark.h>

#include "bsf/cost_model.hpp"

namespace {

bsf::BsfParams sample_params() {
  bsf::BsfParams p;
  p.latency = 0.5;
  p.send_cost = 1.0;
  p.work_cost = 10000.0;
  p.receive_cost = 4.0;
  p.process_cost = 5.0;
  return p;
}

void bm_predict_tk(benchmark::State& state) {
  const bsf::BsfParams p = sample_params();
  double k = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsf::predict_tk(p, k).total);
    k = k < 1024.0 ? k + 1.0 : 1.0;
  }
}
BENCHMARK(bm_predict_tk);

void bm_predict_speedup(benchmark::State& state) {
  const bsf::BsfParams p = sample_params();
  double k = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsf::predict_speedup(p, k));
    k = k < 1024.0 ? k + 1.0 : 1.0;
  }
}
BENCHMARK(bm_predict_speedup);

void bm_scalability_bound(benchmark::State& state) {
  bsf::BsfParams p = sample_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsf::scalability_bound(p));
    p.work_cost = p.work_cost < 1e9 ? p.work_cost * 1.1 : 10000.0;
  }
}
BENCHMARK(bm_scalability_bound);

void bm_sweep_1_to_256(benchmark::State& state) {
  const bsf::BsfParams p = sample_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(bsf::sweep(p, 1, 256));
  }
}
BENCHMARK(bm_sweep_1_to_256);

}  // namespace

BENCHMARK_MAIN();
