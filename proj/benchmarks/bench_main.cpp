#include <benchmark/benchmark.h>

#include <numbers>

#include "cfbell/local_polytope.hpp"
#include "cfbell/optimizer.hpp"

using namespace cfbell;

namespace {

BellExpression multipartite(int n, int d) { return bell_expression(Scenario(n, d), ExpressionFamily::multipartite); }

void BM_ClassicalMaximum(benchmark::State& state) {
  const auto expr = multipartite(3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(classical_maximum(expr));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(strategy_count(expr.scenario())));
}
BENCHMARK(BM_ClassicalMaximum)->DenseRange(3, 8)->Unit(benchmark::kMillisecond);

void BM_FacetCheck(benchmark::State& state) {
  const auto expr = multipartite(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(facet_check(expr));
}
BENCHMARK(BM_FacetCheck)->Args({3, 3})->Args({3, 5})->Args({4, 3})->Unit(benchmark::kMillisecond);

void BM_QuantumBellValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = static_cast<int>(state.range(1));
  const Scenario sc(n, d);
  const auto psi = ghz_max(n, d);
  std::vector<double> free(PhaseConfiguration::zeros(sc).free_count(), 0.3);
  const auto config = PhaseConfiguration::from_free(sc, free);
  const auto expr = multipartite(n, d);
  for (auto _ : state) benchmark::DoNotOptimize(quantum_bell_value(psi, config, expr));
}
BENCHMARK(BM_QuantumBellValue)->Args({3, 2})->Args({3, 3})->Args({5, 2})->Args({3, 10});

void BM_BellOperatorEigenpair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = static_cast<int>(state.range(1));
  const Scenario sc(n, d);
  std::vector<double> free(PhaseConfiguration::zeros(sc).free_count(), 0.3);
  const auto config = PhaseConfiguration::from_free(sc, free);
  const auto expr = multipartite(n, d);
  for (auto _ : state) benchmark::DoNotOptimize(max_eigenpair(bell_operator(config, expr)).value);
}
BENCHMARK(BM_BellOperatorEigenpair)->Args({3, 2})->Args({3, 3})->Args({5, 2})->Unit(benchmark::kMicrosecond);

void BM_OptimizePhases(benchmark::State& state) {
  OptimizerConfig config;
  config.starts = static_cast<std::size_t>(state.range(0));
  const auto psi = ghz_qubit(std::numbers::pi / 4);
  const auto expr = multipartite(3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_phases(psi, expr, config).best_value);
}
BENCHMARK(BM_OptimizePhases)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
