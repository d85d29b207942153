#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "airydim/fractal.hpp"
#include "airydim/lpp.hpp"

using namespace airydim;

// Cells per second of the anti-diagonal sweep, point-to-point.
static void BM_SweepPointToPoint(benchmark::State& state) {
  const std::int64_t N = state.range(0);
  const int threads = static_cast<int>(state.range(1));
  lpp::SweepOptions opt;
  opt.threads = threads;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    const auto r = lpp::sweep_point_to_point(lpp::WeightOracle(1, stream++), N, {-N / 4, N / 4}, opt);
    benchmark::DoNotOptimize(r.passage_times.data());
  }
  state.SetItemsProcessed(state.iterations() * 4 * N * N);
}
BENCHMARK(BM_SweepPointToPoint)->Args({500, 1})->Args({2000, 1})->Args({8000, 1})->Args({8000, 4})
    ->Unit(benchmark::kMillisecond);

static void BM_SweepLineToPoint(benchmark::State& state) {
  const std::int64_t N = state.range(0);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    const auto r = lpp::sweep_line_to_point(lpp::WeightOracle(2, stream++), N, {-N / 4, N / 4}, lpp::window_floor(N));
    benchmark::DoNotOptimize(r.passage_times.data());
  }
}
BENCHMARK(BM_SweepLineToPoint)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_WeightOracle(benchmark::State& state) {
  const lpp::WeightOracle w(3, 0);
  std::int64_t x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(w.weight_at({x, 7}));
    ++x;
  }
}
BENCHMARK(BM_WeightOracle);

// Shell content on a dense shell: quadratic vs concave DP.
static void BM_ShellContent(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const int n = 8;
  const double lo = std::exp(n), hi = std::exp(n + 1);
  std::uniform_real_distribution<double> u(lo, hi);
  fractal::Shell shell{n, {}};
  for (std::int64_t i = 0; i < state.range(0); ++i) shell.points.push_back(u(rng));
  std::sort(shell.points.begin(), shell.points.end());
  shell.points.erase(std::unique(shell.points.begin(), shell.points.end()), shell.points.end());
  const auto algo = state.range(1) == 0 ? fractal::ContentAlgorithm::Quadratic : fractal::ContentAlgorithm::Concave;
  for (auto _ : state) benchmark::DoNotOptimize(fractal::shell_content(shell, 0.5, algo).nu);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ShellContent)->ArgsProduct({{100, 1000, 4000}, {0, 1}});
BENCHMARK_MAIN();
