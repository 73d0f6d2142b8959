#include <benchmark/benchmark.h>

#include <string>

#include "gasket/dirichlet.hpp"
#include "gasket/field.hpp"
#include "gasket/geometry.hpp"
#include "gasket/kernels.hpp"
#include "gasket/spectral.hpp"

namespace {

using namespace gasket;

SpectralBasis full_basis(int m) {
  const LevelGraph g = build_level(m);
  return solve_eigen(assemble_energy(g), assemble_mass(g), static_cast<int>(g.dim()) - 1, 1e-9);
}

void BM_BuildLevel(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_level(m));
  state.SetLabel("m = " + std::to_string(m));
}
BENCHMARK(BM_BuildLevel)->DenseRange(4, 8)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const LevelGraph g = build_level(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_energy(g));
    benchmark::DoNotOptimize(assemble_mass(g));
  }
}
BENCHMARK(BM_Assemble)->DenseRange(4, 8)->Unit(benchmark::kMillisecond);

void BM_DenseSolve(benchmark::State& state) {
  const LevelGraph g = build_level(static_cast<int>(state.range(0)));
  const StiffnessMatrix s = assemble_energy(g);
  const MassMatrix mass = assemble_mass(g);
  EigenOptions opts;
  opts.method = EigenMethod::Dense;
  for (auto _ : state) benchmark::DoNotOptimize(solve_eigen(s, mass, static_cast<int>(g.dim()) - 1, 1e-9, opts));
}
BENCHMARK(BM_DenseSolve)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

void BM_ShiftInvertSolve(benchmark::State& state) {
  const LevelGraph g = build_level(static_cast<int>(state.range(0)));
  const StiffnessMatrix s = assemble_energy(g);
  const MassMatrix mass = assemble_mass(g);
  EigenOptions opts;
  opts.method = EigenMethod::ShiftInvert;
  for (auto _ : state) benchmark::DoNotOptimize(solve_eigen(s, mass, 100, 1e-8, opts));
}
BENCHMARK(BM_ShiftInvertSolve)->DenseRange(6, 8)->Unit(benchmark::kMillisecond);

void BM_RieszDense(benchmark::State& state) {
  const SpectralBasis b = full_basis(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(RieszKernel(b, 0.5, b.count()).dense());
}
BENCHMARK(BM_RieszDense)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

void BM_SampleField(benchmark::State& state) {
  const SpectralBasis b = full_basis(static_cast<int>(state.range(0)));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_field(b, 0.5, seed++, b.count()));
}
BENCHMARK(BM_SampleField)->DenseRange(4, 6)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
