#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "jointpred/info.hpp"
#include "jointpred/pmf.hpp"
#include "jointpred/rng.hpp"
#include "jointpred/seqpred.hpp"

namespace {

using namespace jointpred;

void BM_RngNextU64(benchmark::State& state) {
  RngStream rng(1, 2);
  std::uint64_t acc = 0;
  for (auto _ : state) acc += rng.next_u64();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngNextU64);

void BM_RngBernoulli(benchmark::State& state) {
  RngStream rng(1, 2);
  long acc = 0;
  for (auto _ : state) acc += rng.bernoulli(0.37);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngBernoulli);

void BM_RngBeta(benchmark::State& state) {
  RngStream rng(1, 2);
  double acc = 0;
  for (auto _ : state) acc += rng.beta(3.0, 5.0);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngBeta);

FinitePmf random_pmf(std::size_t n, RngStream& rng) {
  std::vector<double> v(n);
  double total = 0.0;
  for (double& x : v) {
    x = rng.gamma(1.0);
    total += x;
  }
  for (double& x : v) x /= total;
  return FinitePmf(std::move(v));
}

void BM_KlDivergence(benchmark::State& state) {
  RngStream rng(3, 4);
  const auto n = static_cast<std::size_t>(state.range(0));
  const FinitePmf p = random_pmf(n, rng);
  const FinitePmf q = random_pmf(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kl_divergence(p, q));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_KlDivergence)->Arg(1 << 10)->Arg(1 << 16);

void BM_MutualInformation(benchmark::State& state) {
  RngStream rng(5, 6);
  std::vector<Axis> axes{{"a", 8}, {"b", 8}, {"c", 8}, {"d", 8}};
  std::vector<double> table(8 * 8 * 8 * 8);
  double total = 0.0;
  for (double& x : table) {
    x = rng.gamma(1.0);
    total += x;
  }
  for (double& x : table) x /= total;
  const JointPmf joint(std::move(axes), std::move(table));
  const std::vector<std::string> va{"a"}, vb{"b"}, vc{"c", "d"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mutual_information(joint, va, vb, vc));
  }
}
BENCHMARK(BM_MutualInformation);

void BM_EnumerateCoinJoint(benchmark::State& state) {
  const SeqPredProblem problem = coin_seqpred_problem(3);
  const IncrementalAgent agent = perfect_memory_agent(problem);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_joint(problem, agent));
  }
}
BENCHMARK(BM_EnumerateCoinJoint);

}  // namespace
