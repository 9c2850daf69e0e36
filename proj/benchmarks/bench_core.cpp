#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gaudin/determinants.hpp"
#include "gaudin/dynamics.hpp"
#include "gaudin/lambda_solver.hpp"
#include "gaudin/verification.hpp"

using namespace gaudin;

namespace {

GaudinModel bench_model(std::size_t n, double g_over_span) {
  const std::vector<double> eps = verify::random_levels(n, 12345);
  return GaudinModel(eps, g_over_span * (eps.back() - eps.front()));
}

void BM_DenseDet(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(det(a));
}
BENCHMARK(BM_DenseDet)->Arg(8)->Arg(32)->Arg(128);

void BM_ScalarProduct(benchmark::State& state) {
  const GaudinModel model = bench_model(static_cast<std::size_t>(state.range(0)), 0.5);
  const SectorSolution s = solve_all_in_sector(model, model.size() / 2);
  const LambdaState mu = transform_axis(model, s.states[0]);
  for (auto _ : state) benchmark::DoNotOptimize(scalar_product_det(model, mu, s.states[1]).value);
}
BENCHMARK(BM_ScalarProduct)->Arg(8)->Arg(12);

void BM_SolveSector(benchmark::State& state) {
  const GaudinModel model = bench_model(static_cast<std::size_t>(state.range(0)), 0.5);
  const BasisOccupation occ = sector_occupations(model.size(), model.size() / 2)[1];
  for (auto _ : state) benchmark::DoNotOptimize(solve_sector(model, occ).values.data());
}
BENCHMARK(BM_SolveSector)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_SolveAllSectorsN8(benchmark::State& state) {
  const GaudinModel model = bench_model(8, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(verify::solve_all_sectors(model).size());
}
BENCHMARK(BM_SolveAllSectorsN8)->Unit(benchmark::kMillisecond);

void BM_SpectralTable(benchmark::State& state) {
  CentralSpinParams p;
  p.field = 1.0;
  p.couplings = {0.31, 0.47, 0.62, 0.83, 1.0};
  p.alpha = cplx(0.6, 0.0);
  p.beta = cplx(0.0, 0.8);
  p.bath_occupation = BasisOccupation({1, 3}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(central_spin_table(p).rows.size());
}
BENCHMARK(BM_SpectralTable)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
