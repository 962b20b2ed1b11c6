#include <benchmark/benchmark.h>

#include "otmisfit/inversion.hpp"
#include "otmisfit/ma_solver.hpp"
#include "otmisfit/transport_1d.hpp"
#include "otmisfit/transport_2d.hpp"
#include "test_pairs.hpp"

namespace {

void BM_AssembleMonotone(benchmark::State& state) {
  const auto b = otm::testing::translated_blob(0.3, 0.0, static_cast<int>(state.range(0)));
  const otm::DensityPair pair = otm::prepare_pair(b.f, b.g, {});
  const otm::MongeAmpereOperator op(pair, {});
  const otm::Potential u = op.initial_guess();
  for (auto _ : state) benchmark::DoNotOptimize(op.assemble(u, otm::Scheme::monotone));
}
BENCHMARK(BM_AssembleMonotone)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_SolveBlob(benchmark::State& state) {
  const auto b = otm::testing::translated_blob(0.3, 0.0, static_cast<int>(state.range(0)));
  const otm::DensityPair pair = otm::prepare_pair(b.f, b.g, {});
  for (auto _ : state) benchmark::DoNotOptimize(otm::solve_monge_ampere(pair, {}));
}
BENCHMARK(BM_SolveBlob)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_SolveGaussianFiltered(benchmark::State& state) {
  const auto gp = otm::testing::gaussian_pair(1.0 / static_cast<double>(state.range(0)));
  otm::SolverConfig cfg;
  cfg.use_filtered = true;
  for (auto _ : state) benchmark::DoNotOptimize(otm::solve_monge_ampere(gp.pair, cfg));
}
BENCHMARK(BM_SolveGaussianFiltered)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PanelMisfit(benchmark::State& state) {
  const auto cfg = otm::inversion::experiment_config();
  const auto panels = otm::testing::panel_pair();
  for (auto _ : state) benchmark::DoNotOptimize(otm::inversion::misfit({0.8, 0.6, 1.1, 1.4}, panels.f, cfg));
}
BENCHMARK(BM_PanelMisfit)->Unit(benchmark::kMillisecond);

void BM_W2_1d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto f = otm::Signal1D::sample(n, -4, 4, [](double x) { return std::max(1 - std::abs(x), 0.0); });
  const auto g = otm::Signal1D::sample(n, -4, 4, [](double x) { return std::max(1 - std::abs(x - 1), 0.0); });
  for (auto _ : state) benchmark::DoNotOptimize(otm::w2_1d(f, g));
}
BENCHMARK(BM_W2_1d)->Arg(4001)->Arg(40001);

}  // namespace

BENCHMARK_MAIN();
