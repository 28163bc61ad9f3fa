#include <benchmark/benchmark.h>

#include "hssplab/hssp.hpp"
#include "hssplab/lattice.hpp"

namespace hssplab {
namespace {

// LLL on the modular orthogonal lattice of a random instance, the dominant
// cost of the first attack step.
void BM_LllOrthogonalMod(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto q_bits = static_cast<std::size_t>(state.range(1));
  const HsspInstance inst = random_hssp(10, m, q_bits, 1);
  const LatticeBasis basis = orthogonal_lattice_mod(inst.h, inst.q).basis;
  for (auto _ : state) benchmark::DoNotOptimize(lll_reduce(basis));
}
BENCHMARK(BM_LllOrthogonalMod)->Args({30, 500})->Args({60, 2000})->Unit(benchmark::kMillisecond);

void BM_BkzRandom(benchmark::State& state) {
  const auto beta = static_cast<std::size_t>(state.range(0));
  IntMatrix m(20, 21);
  const HsspInstance inst = random_hssp(20, 21, 40, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    m(i, i) = 1;
    m(i, 20) = inst.h[i];
  }
  const LatticeBasis basis(m);
  ReductionParams p;
  p.beta = beta;
  for (auto _ : state) benchmark::DoNotOptimize(bkz_reduce(basis, p));
}
BENCHMARK(BM_BkzRandom)->Arg(2)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Hnf(benchmark::State& state) {
  const HsspInstance inst = random_hssp(10, 40, 64, 3);
  const IntMatrix w = inst.truth_weights.transposed();
  for (auto _ : state) benchmark::DoNotOptimize(hnf(w));
}
BENCHMARK(BM_Hnf);

}  // namespace
}  // namespace hssplab
