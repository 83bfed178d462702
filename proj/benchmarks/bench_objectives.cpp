#include <benchmark/benchmark.h>

#include <vector>

#include "mco/objectives.hpp"
#include "mco/rng.hpp"

namespace {

void BM_Evaluate(benchmark::State& state, const char* name) {
  const int n = static_cast<int>(state.range(0));
  mco::ObjectiveSpec obj = mco::get_objective(name, n);
  std::vector<double> x(n);
  for (int d = 0; d < n; ++d)
    x[d] = obj.lower[d] + (obj.upper[d] - obj.lower[d]) *
                              mco::rng::uniform(1, mco::rng::Stream::kTest, 0, 0, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mco::evaluate(obj, x));
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Evaluate, sphere, "sphere")->Arg(30)->Arg(100);
BENCHMARK_CAPTURE(BM_Evaluate, griewank, "griewank")->Arg(30)->Arg(100);
BENCHMARK_CAPTURE(BM_Evaluate, ackley, "ackley")->Arg(30)->Arg(100);
BENCHMARK_CAPTURE(BM_Evaluate, levy, "levy-standard")->Arg(30)->Arg(100);
