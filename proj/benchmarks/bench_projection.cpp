#include <benchmark/benchmark.h>

#include "pitchside/graphs.hpp"
#include "pitchside/synth.hpp"

namespace {

using namespace pitchside;

const BipartiteMatrix& matrix_for(std::size_t tweets) {
  static std::map<std::size_t, BipartiteMatrix> cache;
  auto it = cache.find(tweets);
  if (it == cache.end()) {
    SynthConfig c;
    c.seed = 11;
    c.n_tweets = tweets;
    c.n_users = tweets * 3 / 10;
    it = cache.emplace(tweets, build_user_hashtag_matrix(generate_corpus(c).records)).first;
  }
  return it->second;
}

void BM_UserProjection(benchmark::State& state) {
  const auto& m = matrix_for(static_cast<std::size_t>(state.range(0)));
  auto cfg = ProjectionConfig::for_users();
  cfg.permutations = static_cast<std::uint32_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(project_similarity(m, cfg));
  state.counters["users"] = static_cast<double>(m.users.size());
}
BENCHMARK(BM_UserProjection)
    ->Args({10000, 200})
    ->Args({10000, 1000})
    ->Args({25000, 1000})
    ->Unit(benchmark::kMillisecond);

void BM_HashtagProjection(benchmark::State& state) {
  const auto& m = matrix_for(static_cast<std::size_t>(state.range(0)));
  auto cfg = ProjectionConfig::for_hashtags();
  for (auto _ : state) benchmark::DoNotOptimize(project_similarity(m, cfg));
  state.counters["hashtags"] = static_cast<double>(m.hashtags.size());
}
BENCHMARK(BM_HashtagProjection)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_Matrix(benchmark::State& state) {
  SynthConfig c;
  c.seed = 12;
  c.n_tweets = static_cast<std::size_t>(state.range(0));
  c.n_users = c.n_tweets * 3 / 10;
  const auto corpus = generate_corpus(c).records;
  for (auto _ : state) benchmark::DoNotOptimize(build_user_hashtag_matrix(corpus));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Matrix)->Arg(50000)->Unit(benchmark::kMillisecond);

}  // namespace
