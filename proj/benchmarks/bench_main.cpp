#include <benchmark/benchmark.h>

#include "repsim/cka.hpp"
#include "repsim/gram.hpp"
#include "repsim/matrix.hpp"
#include "repsim/rng.hpp"

namespace {

using repsim::Matrix;

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  repsim::Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

void BM_Gram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = gaussian(n, 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(repsim::gram(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gram)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_Hsic1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = repsim::gram(gaussian(n, 32, 2));
  const auto l = repsim::gram(gaussian(n, 32, 3));
  for (auto _ : state) benchmark::DoNotOptimize(repsim::hsic1(k, l));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hsic1)->RangeMultiplier(2)->Range(64, 2048)->Complexity(benchmark::oNSquared);

void BM_Hsic0(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = repsim::gram(gaussian(n, 32, 2));
  const auto l = repsim::gram(gaussian(n, 32, 3));
  for (auto _ : state) benchmark::DoNotOptimize(repsim::hsic0(k, l));
}
BENCHMARK(BM_Hsic0)->RangeMultiplier(2)->Range(64, 1024);

void BM_CkaMinibatch(benchmark::State& state) {
  const Matrix x = gaussian(4096, 64, 4);
  const Matrix y = gaussian(4096, 48, 5);
  const auto batch = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(repsim::ckaMinibatch(x, y, {batch, 1, 0}));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_CkaMinibatch)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Svd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = gaussian(n, n / 2, 6);
  for (auto _ : state) benchmark::DoNotOptimize(repsim::svd(x));
}
BENCHMARK(BM_Svd)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
