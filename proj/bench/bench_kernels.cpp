// Serial reference kernels against their OpenMP variants.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rpsim/hamiltonian.hpp"
#include "rpsim/kernels.hpp"
#include "rpsim/molecules.hpp"

using namespace rpsim;

namespace {

std::vector<cplx> random_block(std::size_t n) {
  std::mt19937_64 g(7);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {d(g), d(g)};
  return v;
}

// 0: DMA (768), 1: Py (2048)
const kernels::KroneckerOperator& op(int which) {
  static const auto dma = build_hamiltonian(preset_dma(), Vec3(0, 0, 4.0));
  static const auto py = build_hamiltonian(preset_py(), Vec3(0, 0, 4.0));
  return which == 0 ? dma.kronecker() : py.kronecker();
}

template <bool Parallel>
void BM_apply(benchmark::State& state) {
  const auto& k = op(static_cast<int>(state.range(0)));
  const auto ncols = static_cast<std::size_t>(state.range(1));
  const auto in = random_block(k.dim * ncols);
  std::vector<cplx> out(in.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::apply_parallel(k, in.data(), out.data(), ncols);
    else
      kernels::apply_serial(k, in.data(), out.data(), ncols);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["dim"] = static_cast<double>(k.dim);
}

template <bool Parallel>
void BM_rotate(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::size_t ncols = 16;
  auto data = random_block(dim * ncols);
  Mat2c r;
  r << cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::electron_rotate_parallel(r, data.data(), dim, ncols);
    else
      kernels::electron_rotate_serial(r, data.data(), dim, ncols);
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void BM_reduce(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::size_t npairs = 16;
  const auto cols = random_block(dim * 2 * npairs);
  std::vector<cplx> out(npairs * 16);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::reduce_pairs_parallel(cols.data(), dim, npairs, out.data());
    else
      kernels::reduce_pairs_serial(cols.data(), dim, npairs, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_apply<false>)->ArgsProduct({{0, 1}, {1, 16}})->Name("apply/serial");
BENCHMARK(BM_apply<true>)->ArgsProduct({{0, 1}, {1, 16}})->Name("apply/openmp");
BENCHMARK(BM_rotate<false>)->Arg(768)->Arg(2048)->Name("electron_rotate/serial");
BENCHMARK(BM_rotate<true>)->Arg(768)->Arg(2048)->Name("electron_rotate/openmp");
BENCHMARK(BM_reduce<false>)->Arg(768)->Arg(2048)->Name("reduce_pairs/serial");
BENCHMARK(BM_reduce<true>)->Arg(768)->Arg(2048)->Name("reduce_pairs/openmp");

BENCHMARK_MAIN();
