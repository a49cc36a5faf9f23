#include <benchmark/benchmark.h>

#include "tracelab/groupfourier.hpp"
#include "tracelab/kappa.hpp"

namespace {

using namespace tracelab;

void BM_kappa_multistart(benchmark::State& state) {
  Subspace W = build_W_grad(2, 2).realify();
  for (auto _ : state) {
    KappaResult r = kappa_value(W, 0.5);
    benchmark::DoNotOptimize(r.value);
  }
}

// Sorted-profile enumeration; the full space is its hardest case.
void BM_kappa_grid_oracle(benchmark::State& state) {
  Subspace W = Subspace::full(int(state.range(0)), 1);
  for (auto _ : state) {
    double v = kappa_grid_oracle(W, 0.5);
    benchmark::DoNotOptimize(v);
  }
}

}  // namespace

BENCHMARK(BM_kappa_multistart)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_kappa_grid_oracle)
    ->Arg(4)
    ->Arg(5)
    ->Arg(6)
    ->Unit(benchmark::kMillisecond);
