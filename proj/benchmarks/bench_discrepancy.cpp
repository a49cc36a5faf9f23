#include <benchmark/benchmark.h>

#include <vector>

#include "tracelab/bellman.hpp"
#include "tracelab/groupfourier.hpp"

namespace {

using namespace tracelab;

// Certification cost is dominated by config draws plus one stable
// discrepancy evaluation each, so these two loops bound the sampling rate.
void BM_random_config(benchmark::State& state) {
  Subspace W = build_W_grad(2, 2).realify();
  Rng rng(17u);
  for (auto _ : state) {
    ConfigPoint p = random_config(W, 0.6, rng);
    benchmark::DoNotOptimize(p.xs.data());
  }
}

void BM_discrepancy_stable(benchmark::State& state) {
  Subspace W = build_W_grad(2, 2).realify();
  TransformOp phi = random_transform(W, 2024u);
  Candidate G = Candidate::subcritical(0.5, 100.0, 10000.0);
  Rng rng(17u);
  std::vector<ConfigPoint> pts;
  for (int i = 0; i < 256; ++i) pts.push_back(random_config(W, 0.6, rng));
  size_t i = 0;
  for (auto _ : state) {
    double d = discrepancy_stable(G, W, phi, 0.6, pts[i++ & 255]);
    benchmark::DoNotOptimize(d);
  }
}

}  // namespace

BENCHMARK(BM_random_config);
BENCHMARK(BM_discrepancy_stable);
