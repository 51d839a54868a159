#include <benchmark/benchmark.h>

#include "vmrank/ingest.hpp"
#include "vmrank/scoring.hpp"
#include "vmrank/sweep.hpp"

namespace {

const vmrank::MeasurementSet& demo() {
  static const auto set =
      vmrank::load_measurements(vmrank::read_text_file(std::string(VMRANK_DATA_DIR) + "/demo.measurements"));
  return set;
}

void BM_LoadDemo(benchmark::State& state) {
  const auto text = vmrank::read_text_file(std::string(VMRANK_DATA_DIR) + "/demo.measurements");
  for (auto _ : state) benchmark::DoNotOptimize(vmrank::load_measurements(text));
}
BENCHMARK(BM_LoadDemo);

void BM_Normalize(benchmark::State& state) {
  const auto matrix = vmrank::aggregate(demo());
  for (auto _ : state) benchmark::DoNotOptimize(vmrank::normalize(matrix));
}
BENCHMARK(BM_Normalize);

void BM_RankPipeline(benchmark::State& state) {
  const vmrank::WeightVector w({5, 3, 5, 0});
  const auto mode = state.range(0) ? vmrank::ExecutionMode::Parallel : vmrank::ExecutionMode::Sequential;
  for (auto _ : state) benchmark::DoNotOptimize(vmrank::rank_pipeline(demo(), w, mode));
}
BENCHMARK(BM_RankPipeline)->Arg(0)->Arg(1);

void BM_RankerPerVector(benchmark::State& state) {
  const vmrank::Ranker ranker(demo(), vmrank::ExecutionMode::Sequential);
  const vmrank::WeightVector w({5, 3, 5, 0});
  std::vector<int> out(demo().vms().size());
  for (auto _ : state) {
    ranker.ranks_into(w, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_RankerPerVector);

void BM_FullSweep(benchmark::State& state) {
  vmrank::SweepOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(vmrank::top_k_frequency(demo(), 3, vmrank::ExecutionMode::Sequential, opts));
  }
}
BENCHMARK(BM_FullSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EnumerateWeights(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(vmrank::enumerate_weight_vectors());
}
BENCHMARK(BM_EnumerateWeights);

}  // namespace

BENCHMARK_MAIN();
