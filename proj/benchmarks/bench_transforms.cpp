#include <benchmark/benchmark.h>

#include <random>

#include "freqseg/dtcwt.hpp"
#include "freqseg/nsct.hpp"

namespace {

freqseg::Image2D noise(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  freqseg::Image2D img(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) img(r, c) = nd(rng);
  }
  return img;
}

void BM_DtcwtForward(benchmark::State& state) {
  const auto img = noise(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(freqseg::dtcwt_forward(img, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_DtcwtForward)->Arg(96)->Arg(160)->Arg(240);

void BM_LowpassImage(benchmark::State& state) {
  const auto img = noise(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(freqseg::lowpass_image(img, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_LowpassImage)->Arg(160)->Arg(240);

void BM_NsctForward(benchmark::State& state) {
  const auto img = noise(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(freqseg::nsct_forward(img));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_NsctForward)->Arg(96)->Arg(160)->Arg(240);

void BM_ExtractLf(benchmark::State& state) {
  const freqseg::VoxelGeometry g({160, 160, 16}, {1, 1, 1});
  freqseg::ScalarVolume v(g);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (auto& x : v.data()) x = nd(rng);
  const unsigned jobs = unsigned(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(freqseg::extract_lf(v, 3, freqseg::DtcwtFilters::standard(), jobs));
  }
}
BENCHMARK(BM_ExtractLf)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
