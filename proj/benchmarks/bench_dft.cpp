#include <benchmark/benchmark.h>

#include <complex>

#include "tracelab/common.hpp"
#include "tracelab/groupfourier.hpp"

namespace {

using namespace tracelab;

// Naive quadratic transform; the sizes cover every group the tests touch.
void BM_dft(benchmark::State& state) {
  GroupIndex g{int(state.range(0)), int(state.range(1))};
  Rng rng(3u);
  CFunction f(g.size(), 2);
  for (int64_t i = 0; i < g.size(); ++i)
    for (int c = 0; c < 2; ++c)
      f(i, c) = std::complex<double>(rng.normal(), rng.normal());
  for (auto _ : state) {
    CFunction fh = dft(g, f);
    benchmark::DoNotOptimize(fh.data());
  }
}

void BM_dft_round_trip(benchmark::State& state) {
  GroupIndex g{int(state.range(0)), int(state.range(1))};
  Rng rng(3u);
  CFunction f(g.size(), 1);
  for (int64_t i = 0; i < g.size(); ++i)
    f(i, 0) = std::complex<double>(rng.normal(), rng.normal());
  for (auto _ : state) {
    CFunction back = idft(g, dft(g, f));
    benchmark::DoNotOptimize(back.data());
  }
}

}  // namespace

BENCHMARK(BM_dft)->Args({2, 2})->Args({3, 2})->Args({4, 2})->Args({4, 3});
BENCHMARK(BM_dft_round_trip)->Args({4, 2})->Args({4, 3});
