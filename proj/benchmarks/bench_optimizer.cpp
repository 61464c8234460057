#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "optimizer_fixtures.hpp"
#include "volu/rate_utility_optimizer.hpp"

namespace {

using namespace volu;

std::vector<TileChoice> instance(int tiles) {
  std::mt19937 rng(17);
  std::vector<TileChoice> out;
  out.reserve(static_cast<std::size_t>(tiles));
  for (int i = 0; i < tiles; ++i) {
    out.push_back(fixtures::random_tile(rng, static_cast<std::uint32_t>(i), 5, true));
  }
  return out;
}

void BM_GreedyAllocate(benchmark::State& state) {
  const auto tiles = instance(static_cast<int>(state.range(0)));
  const double budget = 0.5 * fixtures::max_total_cost(tiles);
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_allocate(tiles, budget));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GreedyAllocate)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_UpperHull(benchmark::State& state) {
  const auto tiles = instance(1024);
  for (auto _ : state) {
    for (const auto& t : tiles) benchmark::DoNotOptimize(upper_hull(t));
  }
}
BENCHMARK(BM_UpperHull);

void BM_BruteForce(benchmark::State& state) {
  const auto tiles = instance(static_cast<int>(state.range(0)));
  const double budget = 0.5 * fixtures::max_total_cost(tiles);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_allocate(tiles, budget));
  }
}
BENCHMARK(BM_BruteForce)->DenseRange(2, 6, 2);

}  // namespace
