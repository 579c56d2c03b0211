#include <benchmark/benchmark.h>

#include <cmath>

#include "beltrami/coefficients.hpp"
#include "beltrami/linear_solver.hpp"
#include "beltrami/quasilinear_solver.hpp"
#include "beltrami/transforms.hpp"

using namespace beltrami;

namespace {

GridField bump_field(int n) {
  return GridField::sample(n, 4.0, [](cplx z) {
    const double t = 1.0 - std::norm(z);
    return t > 0.0 ? cplx{std::exp(-1.0 / t), 0.0} : cplx{};
  });
}

void BM_Cauchy(benchmark::State& state) {
  const GridField w = bump_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cauchy_transform(w));
}

void BM_Beurling(benchmark::State& state) {
  const GridField w = bump_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(beurling_transform(w));
}

void BM_SpectralDerivatives(benchmark::State& state) {
  const GridField f = GridField::identity(static_cast<int>(state.range(0)), 4.0) + bump_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(derivatives(f));
}

void BM_LinearConstantDisk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridField mu = GridField::sample(n, 4.0, [](cplx z) { return std::abs(z) < 1.0 ? cplx{0.5, 0.0} : cplx{}; });
  const LinearProblem p = LinearProblem::from_fields(mu, GridField(n, 4.0));
  SolverConfig cfg;
  cfg.grid_n = n;
  for (auto _ : state) benchmark::DoNotOptimize(solve_linear(p, cfg));
}

void BM_QuasilinearExample(benchmark::State& state) {
  const CoefficientSpec spec = builtin_catalog("paper-example-sec4", {});
  SolverConfig cfg;
  cfg.grid_n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_quasilinear(spec, cfg));
}

}  // namespace

BENCHMARK(BM_Cauchy)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Beurling)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectralDerivatives)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinearConstantDisk)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuasilinearExample)->Arg(128)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
