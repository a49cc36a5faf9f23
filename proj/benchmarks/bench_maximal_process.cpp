#include <benchmark/benchmark.h>

#include "tracelab/experiments.hpp"
#include "tracelab/frostman.hpp"

namespace {

using namespace tracelab;

void BM_maximal_process(benchmark::State& state) {
  int depth = int(state.range(0));
  TreeMeasure nu = random_frostman_measure(4, depth, 0.6, 9u);
  for (auto _ : state) {
    MaximalProcess mp = maximal_process(nu, 0.6);
    benchmark::DoNotOptimize(mp.levels.data());
  }
}

// Composition-count dynamic program behind the blow-up ratio tables.
void BM_mean_abs_sum(benchmark::State& state) {
  Eigen::VectorXd xi(4);
  xi << 0.7, -0.3, 0.1, -0.5;
  int N = int(state.range(0));
  for (auto _ : state) {
    double v = mean_abs_sum(xi, N);
    benchmark::DoNotOptimize(v);
  }
}

}  // namespace

BENCHMARK(BM_maximal_process)->Arg(6)->Arg(8);
BENCHMARK(BM_mean_abs_sum)->Arg(16)->Arg(64);
