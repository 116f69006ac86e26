#include <benchmark/benchmark.h>

#include <vector>

#include "jointpred/agents.hpp"
#include "jointpred/bandit.hpp"
#include "jointpred/envs.hpp"

namespace {

using namespace jointpred;

void BM_PredictJoint(benchmark::State& state) {
  const int arms = static_cast<int>(state.range(0));
  const int tau = static_cast<int>(state.range(1));
  EnvModel env = EnvModel::independent_beta(
      std::vector<BetaParams>(static_cast<std::size_t>(arms), BetaParams(1, 1)));
  AgentState agent = AgentState::make(AgentKind::exact_posterior, env, RngStream(1, 0));
  RngStream rng(2, 0);
  ImaginedOutcomes out;
  for (auto _ : state) {
    predict_joint_into(agent, tau, rng, out);
    benchmark::DoNotOptimize(out.bits.data());
  }
  state.SetItemsProcessed(state.iterations() * arms * tau);
}
BENCHMARK(BM_PredictJoint)->Args({2, 16})->Args({10, 128});

void BM_ApproxTsStep(benchmark::State& state) {
  const int arms = static_cast<int>(state.range(0));
  const int tau = static_cast<int>(state.range(1));
  EnvModel env = EnvModel::independent_beta(
      std::vector<BetaParams>(static_cast<std::size_t>(arms), BetaParams(1, 1)));
  AgentState agent = AgentState::make(AgentKind::exact_posterior, env, RngStream(1, 0));
  RngStream rng(2, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        approx_ts_step(agent, env, tau, TsVariant::posterior_sample, rng));
  }
}
BENCHMARK(BM_ApproxTsStep)->Args({2, 16})->Args({10, 128});

void BM_RunBanditExactTs(benchmark::State& state) {
  BanditRunConfig cfg;
  cfg.env = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
  cfg.policy = BanditPolicy::exact_ts;
  cfg.T = 200;
  cfg.replications = 200;
  cfg.master_seed = 9;
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_bandit(cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.T * cfg.replications);
}
BENCHMARK(BM_RunBanditExactTs);

void BM_TargetSuboptimality(benchmark::State& state) {
  EnvModel env = EnvModel::independent_beta(
      std::vector<BetaParams>(5, BetaParams(1, 1)));
  const RngStream rng(4, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(target_suboptimality(env, 64, 2000, rng, 1));
  }
}
BENCHMARK(BM_TargetSuboptimality);

}  // namespace

BENCHMARK_MAIN();
