// Microbenchmarks for the hot paths: sketch construction, preconditioner
// application, the full PCG loop, and kernel matvecs.

#include <benchmark/benchmark.h>

#include <npcg/npcg.hpp>

namespace {

using namespace npcg;

Vector poly_spectrum(Index n, double power) {
  Vector lam(n);
  for (Index j = 0; j < n; ++j) lam(j) = std::pow(static_cast<double>(j + 1), -power);
  return lam;
}

void BM_RandomizedNystrom(benchmark::State& state) {
  const Index n = state.range(0);
  const Index ell = state.range(1);
  const DenseOperator op = synthesize_operator(SpectrumProfile(poly_spectrum(n, 2.0)), 7);
  for (auto _ : state) {
    Rng rng(42);
    benchmark::DoNotOptimize(randomized_nystrom(op, ell, rng));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_RandomizedNystrom)
    ->Args({256, 32})
    ->Args({512, 64})
    ->Args({1024, 128})
    ->Unit(benchmark::kMillisecond);

void BM_ApplyInverse(benchmark::State& state) {
  const Index n = state.range(0);
  const Index ell = state.range(1);
  const DenseOperator op = synthesize_operator(SpectrumProfile(poly_spectrum(n, 2.0)), 7);
  Rng rng(42);
  const NystromPreconditioner precond =
      build_preconditioner(randomized_nystrom(op, ell, rng), 1e-4);
  const Vector v = gaussian_vector(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(precond.apply_inverse(v));
}
BENCHMARK(BM_ApplyInverse)
    ->Args({1024, 64})
    ->Args({1024, 256})
    ->Args({4096, 256})
    ->Unit(benchmark::kMicrosecond);

void BM_NystromPcg(benchmark::State& state) {
  const Index n = state.range(0);
  const double mu = 1e-4;
  const DenseOperator op = synthesize_operator(SpectrumProfile(poly_spectrum(n, 2.0)), 7);
  Rng rng(42);
  const NystromPreconditioner precond = build_preconditioner(
      randomized_nystrom(op, recommended_sketch_size(SpectrumProfile(poly_spectrum(n, 2.0)), mu), rng),
      mu);
  const Vector b = gaussian_vector(rng, n).normalized();
  SolveOptions opt;
  opt.eta = 1e-8;
  opt.relative = true;
  for (auto _ : state) benchmark::DoNotOptimize(nystrom_pcg(op, b, mu, precond, opt));
}
BENCHMARK(BM_NystromPcg)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_KernelMatvec(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(42);
  Matrix points = gaussian_matrix(rng, n, 10);
  const KernelOperator op = gaussian_kernel(std::move(points), 2.0);
  const Vector v = gaussian_vector(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(op.matvec(v));
}
BENCHMARK(BM_KernelMatvec)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
