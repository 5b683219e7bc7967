#include <benchmark/benchmark.h>

#include <filesystem>

#include "pitchside/pipeline.hpp"

namespace {

using namespace pitchside;
namespace fs = std::filesystem;

// Whole pipeline on a generated corpus. Slow: one iteration per size.
void BM_FullPipeline(benchmark::State& state) {
  const auto out = fs::temp_directory_path() / "pitchside-bench-pipeline";
  for (auto _ : state) {
    state.PauseTiming();
    fs::remove_all(out);
    PipelineConfig c;
    c.output_dir = out.string();
    c.synth.n_tweets = static_cast<std::size_t>(state.range(0));
    c.synth.n_users = c.synth.n_tweets * 3 / 10;
    Pipeline p(c);
    state.ResumeTiming();
    p.run_all();
  }
  fs::remove_all(out);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FullPipeline)->Arg(10000)->Arg(50000)->Iterations(1)->Unit(benchmark::kSecond);

}  // namespace

BENCHMARK_MAIN();
