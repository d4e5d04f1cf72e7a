#include <benchmark/benchmark.h>

#include <random>

#include "mltrust/social_score.hpp"
#include "mltrust/trust.hpp"

namespace {

using namespace mltrust;

// Dense symmetric weights with a zero diagonal.
AdjacencyBlock dense_block(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 5.0);
  DenseMatrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) w(i, j) = w(j, i) = weight(rng);
  }
  return {LayerId::kDoctor, LayerId::kDoctor, w};
}

std::vector<double> random_scores(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> s(n);
  for (double& x : s) x = unit(rng);
  return s;
}

void BM_PropagateStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto trust = derive_trust(dense_block(n, 1));
  auto scores = random_scores(n, 2);
  for (auto _ : state) {
    scores = propagate_step(scores, trust);
    benchmark::DoNotOptimize(scores.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PropagateStep)->RangeMultiplier(2)->Range(50, 800)->Complexity(benchmark::oNSquared);

void BM_PropagateToConvergence(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto trust = derive_trust(dense_block(n, 3));
  const ScoreVector s0(LayerId::kDoctor, ScoreKind::kInitialSocial, random_scores(n, 4), n);
  ConvergenceConfig config;
  config.epsilon = 1e-9;
  std::size_t iterations = 0;
  for (auto _ : state) {
    const auto result = propagate(s0, trust, config);
    iterations = result.iterations;
    benchmark::DoNotOptimize(result.scores.values().data());
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_PropagateToConvergence)->Arg(100)->Arg(400);

void BM_DeriveTrust(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto block = dense_block(n, 5);
  for (auto _ : state) {
    auto t = derive_trust(block);
    benchmark::DoNotOptimize(&t);
  }
}
BENCHMARK(BM_DeriveTrust)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
