// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>

#include "qcalab/kernels.hpp"
#include "qcalab/linalg.hpp"

using namespace qcalab;

namespace {

std::vector<int> qubits(int n) { return std::vector<int>(static_cast<std::size_t>(n), 2); }

// Keeps the first k of n qubits as the subsystem.
SplitIndex split(int n, int k) {
  std::vector<int> pos;
  for (int i = 0; i < k; ++i) pos.push_back(2 * i % n);
  return SplitIndex(qubits(n), pos);
}

template <bool Omp>
void BM_PartialTrace(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  Rng rng(1);
  const Mat x = random_complex(1 << n, 1 << n, rng);
  const SplitIndex s = split(n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(Omp ? kernels::omp::partial_trace(x, s) : kernels::serial::partial_trace(x, s));
}

template <bool Omp>
void BM_ReducedDensity(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  Rng rng(2);
  CVec psi = random_complex(1 << n, 1, rng).col(0);
  psi.normalize();
  const SplitIndex s = split(n, n / 2);
  for (auto _ : st)
    benchmark::DoNotOptimize(Omp ? kernels::omp::reduced_density(psi, s) : kernels::serial::reduced_density(psi, s));
}

template <bool Omp>
void BM_ApplyLeft(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  Rng rng(3);
  const Mat x0 = random_complex(1 << n, 1 << n, rng);
  const Mat g = haar_unitary(4, rng);
  const SplitIndex s = split(n, 2);
  Mat x = x0;
  for (auto _ : st) {
    if (Omp)
      kernels::omp::apply_left(x, g, s);
    else
      kernels::serial::apply_left(x, g, s);
    benchmark::ClobberMemory();
  }
}

template <bool Omp>
void BM_Embed(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  Rng rng(4);
  const Mat a = random_complex(4, 4, rng);
  const SplitIndex s = split(n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(Omp ? kernels::omp::embed(a, s) : kernels::serial::embed(a, s));
}

}  // namespace

BENCHMARK(BM_PartialTrace<false>)->DenseRange(6, 10, 2);
BENCHMARK(BM_PartialTrace<true>)->DenseRange(6, 10, 2);
BENCHMARK(BM_ReducedDensity<false>)->DenseRange(12, 20, 4);
BENCHMARK(BM_ReducedDensity<true>)->DenseRange(12, 20, 4);
BENCHMARK(BM_ApplyLeft<false>)->DenseRange(6, 10, 2);
BENCHMARK(BM_ApplyLeft<true>)->DenseRange(6, 10, 2);
BENCHMARK(BM_Embed<false>)->DenseRange(6, 10, 2);
BENCHMARK(BM_Embed<true>)->DenseRange(6, 10, 2);

BENCHMARK_MAIN();
