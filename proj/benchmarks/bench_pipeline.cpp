#include <benchmark/benchmark.h>

#include <random>

#include "hssplab/attack.hpp"
#include "hssplab/kmeans.hpp"

namespace hssplab {
namespace {

Dataset blobs(std::size_t points) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> noise(0.0, 0.5);
  Dataset d;
  for (std::size_t i = 0; i < points; ++i) {
    const double c = 3.0 * static_cast<double>(i % 3);
    d.points.push_back({c + noise(gen), c + noise(gen), noise(gen), noise(gen)});
  }
  return d;
}

void BM_FederatedKMeans(benchmark::State& state) {
  const Dataset d = blobs(static_cast<std::size_t>(state.range(0)));
  KMeansConfig cfg;
  cfg.k = 3;
  cfg.t_max = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_federated_kmeans(d, cfg));
}
BENCHMARK(BM_FederatedKMeans)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_AttackRandom(benchmark::State& state) {
  const HsspInstance inst = random_hssp(10, 60, 2000, 5);
  AttackParams p;
  p.beta = 10;
  for (auto _ : state) benchmark::DoNotOptimize(run_attack(inst, p));
}
BENCHMARK(BM_AttackRandom)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
}  // namespace hssplab

BENCHMARK_MAIN();
