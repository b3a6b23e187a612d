#include <benchmark/benchmark.h>

#include "mpslab/quench.hpp"
#include "mpslab/verify.hpp"

using namespace mpslab;

namespace {

void BM_svd(benchmark::State& state) {
  const long n = state.range(0);
  MatrixProductState m = random_mps(2, 16, 1, 99);  // placeholder to seed rng deterministically
  (void)m;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::svd(a));
  }
}
BENCHMARK(BM_svd)->Arg(64)->Arg(256);

void BM_schmidt_spectra_magic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MatrixProductState m = magic_state(n, 1.0 / n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(schmidt_spectra(m));
  }
}
BENCHMARK(BM_schmidt_spectra_magic)->Arg(6)->Arg(8);

void BM_compress_random(benchmark::State& state) {
  MatrixProductState m = random_mps(12, 2, 32, 12345);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compress(m, 8));
  }
}
BENCHMARK(BM_compress_random);

void BM_overlap(benchmark::State& state) {
  MatrixProductState a = random_mps(16, 2, 32, 7);
  MatrixProductState b = random_mps(16, 2, 32, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(overlap(a, b));
  }
}
BENCHMARK(BM_overlap);

void BM_tebd_step(benchmark::State& state) {
  IsingSpec spec;
  spec.N = 16;
  MatrixProductState psi0 = elementary_state(ElementaryKind::all_up, 16, 2);
  TebdPolicy policy;
  policy.step_budget = 1e-8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tebd_evolve(psi0, spec, 0.02, 5, policy));
  }
}
BENCHMARK(BM_tebd_step);

}  // namespace

int main(int argc, char** argv) {
  mpslab::linalg::set_blas_threads(1);
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
