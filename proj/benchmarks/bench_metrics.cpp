#include <benchmark/benchmark.h>

#include "pitchside/communities.hpp"
#include "pitchside/metrics.hpp"
#include "pitchside/rng.hpp"

namespace {

using namespace pitchside;

// Sparse random graph with mean degree about eight.
WeightedGraph random_graph(std::size_t n, bool directed, std::uint64_t seed) {
  Rng rng(seed);
  GraphBuilder b(directed);
  for (std::size_t i = 0; i < n; ++i) b.add_node("v" + std::to_string(i));
  for (std::size_t e = 0; e < n * 4; ++e) {
    b.add_edge("v" + std::to_string(rng.below(n)), "v" + std::to_string(rng.below(n)),
               1.0 + static_cast<double>(rng.below(3)));
  }
  return b.build();
}

void BM_GlobalProperties(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), false, 1);
  for (auto _ : state) benchmark::DoNotOptimize(global_properties(g));
}
BENCHMARK(BM_GlobalProperties)->Arg(1000)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Betweenness(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), true, 2);
  for (auto _ : state) benchmark::DoNotOptimize(betweenness(g));
}
BENCHMARK(BM_Betweenness)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_PageRank(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), true, 3);
  for (auto _ : state) benchmark::DoNotOptimize(pagerank(g));
}
BENCHMARK(BM_PageRank)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_CoreNumbers(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), false, 4);
  for (auto _ : state) benchmark::DoNotOptimize(core_numbers(g));
}
BENCHMARK(BM_CoreNumbers)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Louvain(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), false, 5);
  for (auto _ : state) benchmark::DoNotOptimize(louvain(g, 1.0, 7));
}
BENCHMARK(BM_Louvain)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

}  // namespace
