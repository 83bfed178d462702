#include <benchmark/benchmark.h>

#include "mco/analysis.hpp"
#include "mco/graph.hpp"

namespace {

mco::CoeffSample kCoeffs{0.2, 0.3, 0.5, 0.8};

void BM_BuildSystem(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  Eigen::MatrixXd L = mco::build_graph(mco::GraphKind::kComplete, q).laplacian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mco::build_system(kCoeffs, L, n, 1));
  }
}

void BM_TheoremVerdict(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  Eigen::MatrixXd L = mco::build_graph(mco::GraphKind::kComplete, q).laplacian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mco::check_theorem_hypotheses(kCoeffs, L, n, 1));
  }
}

void BM_SpectralReport(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  Eigen::MatrixXd L = mco::build_graph(mco::GraphKind::kComplete, q).laplacian();
  mco::SystemMatrices sm = mco::build_system(kCoeffs, L, n, 1);
  Eigen::MatrixXd MA = sm.A + kCoeffs.h * sm.Ac;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mco::spectral_report(MA));
  }
}

}  // namespace

BENCHMARK(BM_BuildSystem)->Args({3, 1})->Args({8, 4})->Args({16, 4});
BENCHMARK(BM_TheoremVerdict)->Args({3, 1})->Args({6, 2});
BENCHMARK(BM_SpectralReport)->Args({3, 1})->Args({8, 4});
