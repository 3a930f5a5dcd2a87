// Serial reference against the OpenMP path for the hot kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "ads/evaluate.hpp"
#include "ads/kernels.hpp"
#include "ads/rng.hpp"
#include "ads/select.hpp"
#include "ads/synth.hpp"

using namespace ads;

namespace {

kernels::Execution exec_of(const benchmark::State& state) {
  return state.range(1) ? kernels::Execution::Parallel : kernels::Execution::Serial;
}

struct Rows {
  std::size_t n, width;
  std::vector<double> values;
  std::vector<char> categorical;
};

Rows rows(std::size_t n, std::size_t width) {
  Rng rng(1);
  Rows r{n, width, {}, std::vector<char>(width, 0)};
  for (std::size_t c = 0; c < width; c += 3) r.categorical[c] = 1;
  for (std::size_t i = 0; i < n * width; ++i) r.values.push_back(rng.normal());
  return r;
}

void BM_DistanceMatrix(benchmark::State& state) {
  const auto r = rows(static_cast<std::size_t>(state.range(0)), 40);
  const std::vector<double> queries(r.values.begin(), r.values.begin() + 40 * 64);
  std::vector<double> out(64 * r.n);
  for (auto _ : state) {
    kernels::mixed_sq_distance_matrix(r.values, r.width, r.categorical, queries, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 64 * state.range(0));
}
BENCHMARK(BM_DistanceMatrix)->ArgsProduct({{1000, 10000}, {0, 1}})->ArgNames({"n", "parallel"});

void BM_ReliefF(benchmark::State& state) {
  GenSpec spec;
  spec.n = static_cast<std::size_t>(state.range(0));
  const auto cohort = screen(generate(spec), {"baseline_carla", "followup_carla"}).cohort;
  const auto labels = fit_binarizer(cohort).labels(cohort);
  const auto prep = fit_preprocess(cohort, labels, BinningMode::BinTarget);
  const auto table = apply_preprocess(prep, cohort);
  for (auto _ : state) benchmark::DoNotOptimize(relieff_weights(table, labels, {}, exec_of(state)));
}
BENCHMARK(BM_ReliefF)->ArgsProduct({{423, 2000}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);

void BM_GridCells(benchmark::State& state) {
  GenSpec spec;
  const auto cohort = screen(generate(spec), {"baseline_carla", "followup_carla"}).cohort;
  std::vector<GridCell> cells;
  for (Method m : {Method::NaiveBayes, Method::LogReg, Method::KNN, Method::Tree})
    cells.push_back(GridCell{BinningMode::CAIM, make_spec(m), Selector::None});
  GridOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_grid(cohort, cells, opts));
}
BENCHMARK(BM_GridCells)->ArgsProduct({{423}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
