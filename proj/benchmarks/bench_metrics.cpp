#include <benchmark/benchmark.h>

#include <random>

#include "freqseg/lesion_metrics.hpp"

namespace {

using freqseg::BinaryMask;

// Scattered blobs: dilated random seeds.
BinaryMask blobs(std::size_t n, std::uint64_t seed) {
  BinaryMask m(freqseg::VoxelGeometry({n, n, n}, {1, 1, 1}));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pos(2, n - 4);
  for (int k = 0; k < int(n); ++k) {
    const std::size_t x = pos(rng), y = pos(rng), z = pos(rng);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t l = 0; l < 3; ++l) m.at(x + i, y + j, z + l) = 1;
      }
    }
  }
  return m;
}

void BM_ConnectedComponents(benchmark::State& state) {
  const BinaryMask m = blobs(std::size_t(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(freqseg::connected_components(m, 26));
}
BENCHMARK(BM_ConnectedComponents)->Arg(64)->Arg(128);

void BM_Nsd(benchmark::State& state) {
  const BinaryMask a = blobs(std::size_t(state.range(0)), 2);
  const BinaryMask b = blobs(std::size_t(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(freqseg::nsd(a, b, 2.0));
}
BENCHMARK(BM_Nsd)->Arg(64)->Arg(128);

void BM_LesionWiseRegion(benchmark::State& state) {
  const BinaryMask a = blobs(std::size_t(state.range(0)), 4);
  const BinaryMask b = blobs(std::size_t(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(freqseg::lesion_wise_region(a, b, freqseg::MetricConfig{}));
}
BENCHMARK(BM_LesionWiseRegion)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
