#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "volu/media_model.hpp"

namespace {

using namespace volu;

void BM_MortonEncode(benchmark::State& state) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::uint32_t> c(0, 1023);
  std::vector<TileCoord> coords(4096);
  for (auto& p : coords) p = {c(rng), c(rng), c(rng)};
  for (auto _ : state) {
    for (const auto& p : coords) benchmark::DoNotOptimize(morton_encode(p.x, p.y, p.z));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(coords.size()));
}
BENCHMARK(BM_MortonEncode);

void BM_MortonDecode(benchmark::State& state) {
  std::mt19937 rng(6);
  std::uniform_int_distribution<std::uint32_t> c(0, (1u << 30) - 1);
  std::vector<std::uint32_t> codes(4096);
  for (auto& v : codes) v = c(rng);
  for (auto _ : state) {
    for (auto v : codes) benchmark::DoNotOptimize(morton_decode(v));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(codes.size()));
}
BENCHMARK(BM_MortonDecode);

// One segment index of the synthetic object at the given tile depth.
SegmentIndex segment(int depth) {
  const ObjectManifest m = make_default_manifest(depth);
  return SyntheticObject(m, ShellSpec{}).segment_index(0);
}

void BM_SerializeIndex(benchmark::State& state) {
  const SegmentIndex idx = segment(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serialize_index(idx));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(serialized_size(idx)));
}
BENCHMARK(BM_SerializeIndex)->DenseRange(1, 4);

void BM_ParseIndex(benchmark::State& state) {
  const auto bytes = serialize_index(segment(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(parse_index(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ParseIndex)->DenseRange(1, 4);

}  // namespace
