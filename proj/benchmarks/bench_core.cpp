#include <random>

#include <benchmark/benchmark.h>

#include "pilotq/linalg.hpp"
#include "pilotq/well_run.hpp"

using namespace pilotq;

namespace {

CMatrix random_hermitian(int n) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(gen), g(gen));
  return 0.5 * (a + a.adjoint());
}

void BM_MatrixExponential(benchmark::State& state) {
  const CMatrix h = random_hermitian(static_cast<int>(state.range(0)));
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(matrix_exponential(h, t));
    t += 1e-6;
  }
}
BENCHMARK(BM_MatrixExponential)->Arg(2)->Arg(4);

void BM_WellVelocity(benchmark::State& state) {
  const well::WellBasis basis;
  const auto sc = well::gate_scenario("f1", "+-", basis);
  const well::WellFlow flow(basis, sc.coefficients, sc.schedule);
  const double mid = 0.5 * flow.schedule_end();
  const Point q{0.31, 0.27};
  for (auto _ : state) benchmark::DoNotOptimize(flow.velocity(mid, q, mid));
}
BENCHMARK(BM_WellVelocity);

void BM_HadamardEnsemble(benchmark::State& state) {
  const well::WellBasis basis;
  const auto sc = well::gate_scenario("hadamard", "1", basis);
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  for (auto _ : state) {
    auto run = well::run_well_ensemble(basis, sc.coefficients, sc.schedule, std::nullopt,
                                       SamplerSpec::equilibrium(), static_cast<int>(state.range(0)), 1, cfg);
    benchmark::DoNotOptimize(run.ensemble.trajectories.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HadamardEnsemble)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
