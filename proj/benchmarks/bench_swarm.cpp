#include <benchmark/benchmark.h>

#include "mco/graph.hpp"
#include "mco/swarm.hpp"

namespace {

void BM_McoStep(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  mco::SwarmParams params;
  params.q = q;
  params.n = n;
  params.h = 0.5;
  mco::ObjectiveSpec obj = mco::get_objective("sphere", n);
  mco::Digraph g = mco::build_graph(mco::GraphKind::kComplete, q);
  mco::SwarmState s = mco::init_swarm(params, obj, 1);
  mco::IterationCoeffs coeffs = mco::sample_coeffs(params, 1, 1);
  for (auto _ : state) {
    mco::mco_step(s, coeffs, g, params);
    benchmark::DoNotOptimize(s.x.data());
  }
  state.SetItemsProcessed(state.iterations() * q);
}

void BM_FullIteration(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  mco::SwarmParams params;
  params.q = 30;
  params.n = 30;
  params.h = 0.5;
  params.omega = {mco::CoeffSample{0.002, 0.002, 0.9, 0.5}};
  params.p_update = mco::PUpdateMode::kEq5;
  mco::ObjectiveSpec obj = mco::get_objective("sphere", 30);
  mco::Digraph g = mco::build_graph(mco::GraphKind::kComplete, 30);
  mco::WorkerPool pool(workers);
  mco::SwarmState s = mco::init_swarm(params, obj, 1, &pool);
  std::vector<double> prev_x, prev_fx;
  int t = 0;
  for (auto _ : state) {
    mco::IterationCoeffs coeffs = mco::sample_coeffs(params, 1, ++t);
    prev_x = s.x;
    prev_fx = s.fx;
    mco::mco_step(s, coeffs, g, params, &pool);
    mco::update_bests(s, coeffs, obj, params, prev_x, prev_fx, &pool);
  }
}

}  // namespace

BENCHMARK(BM_McoStep)->Args({10, 10})->Args({30, 30})->Args({100, 30});
BENCHMARK(BM_FullIteration)->Arg(1)->Arg(2)->Arg(4);
