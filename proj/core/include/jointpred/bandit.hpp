#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jointpred/agents.hpp"
#include "jointpred/envs.hpp"
#include "jointpred/stats.hpp"

namespace jointpred {

enum class BanditPolicy { approx_ts, exact_ts, greedy_marginal, uniform_random };

// How Algorithm-1 turns imagined outcomes into the per-arm estimate it acts
// greedily on: a draw from the prior conditioned on the imagined data, or
// the imagined column means.
enum class TsVariant { posterior_sample, sample_mean };

// Smallest index attaining the maximum, with exact float comparison.
int min_argmax(std::span<const double> values);

// Draw an environment from the prior conditioned on imagined outcomes
// treated as tau observed K-vectors. Independent-Beta priors condition by
// per-arm conjugacy; hypothesis priors reweight by likelihood (in log space)
// and draw a hypothesis. When every hypothesis has zero likelihood (possible
// only with delta = 0), the prior weights are used instead and
// *contradiction_count is incremented. tau = 0 reduces to a prior draw.
SampledEnv conditional_posterior_given_imagined(const EnvModel& prior,
                                                const ImaginedOutcomes& imagined,
                                                RngStream& rng,
                                                long* contradiction_count = nullptr);

struct TsStepRecord {
  ImaginedOutcomes imagined;
  std::vector<double> sampled_probs;  // per-arm estimate the action is greedy to
  int action = 0;
  int reward = -1;  // unset until the environment responds
};

// One step of approximate Thompson sampling: imagine tau outcome vectors
// from the agent, derive sampled_probs per the variant, act min-argmax.
TsStepRecord approx_ts_step(const AgentState& agent, const EnvModel& prior, int tau,
                            TsVariant variant, RngStream& rng,
                            long* contradiction_count = nullptr);

// sqrt(K T log(K) / 2) + (K / sqrt(2 tau) + sqrt(2 epsilon)) T.
// tau may be +infinity, dropping its term.
double theorem2_bound(int K, long T, double tau, double epsilon);

// Monte Carlo estimate of the expected shortfall of the proxy-greedy target
// action: E[p_best - p_target] where tau outcome vectors are drawn from a
// realized environment, a parameter vector is drawn from the prior
// conditioned on them, and the target is its min-argmax.
MonteCarloEstimate target_suboptimality(const EnvModel& env_model, int tau, long n_mc,
                                        const RngStream& rng, int threads = 1);

struct RegretStep {
  int t = 0;
  int action = 0;
  int reward = 0;
  double step_regret = 0.0;
  double cum_regret = 0.0;
};

struct RegretTrace {
  int replication_id = 0;
  double best_arm_prob = 0.0;  // max_k p_k of the realized environment
  std::vector<RegretStep> steps;
};

struct ReplicationStat {
  double best_arm_prob = 0.0;
  double final_cum_regret = 0.0;
  int first_final_arm_pull = -1;  // step of the first pull of arm K-1, -1 if never
};

struct BanditRunConfig {
  EnvModel env = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
  BanditPolicy policy = BanditPolicy::exact_ts;
  AgentKind agent_kind = AgentKind::exact_posterior;
  TsVariant variant = TsVariant::posterior_sample;
  int T = 100;
  int tau = 16;
  long replications = 1000;
  std::uint64_t master_seed = 0;
  int threads = 1;         // 0 = hardware concurrency
  bool collect_traces = false;
  EnsembleOptions ensemble{};
};

struct BanditRunResult {
  int arms = 0;
  int T = 0;
  std::vector<double> mean_cum_regret;  // indexed by t
  std::vector<double> se_cum_regret;
  std::vector<ReplicationStat> replication_stats;
  std::vector<RegretTrace> traces;  // populated only when collect_traces
  long contradiction_count = 0;
};

// Run replications of a bandit policy against environments drawn from the
// prior. Replication r owns streams (master_seed, 3r) for the environment,
// (master_seed, 3r+1) for the agent state, and (master_seed, 3r+2) for
// policy randomness, so results are bit-reproducible for any thread count
// and the realized environments do not depend on the policy or agent.
BanditRunResult run_bandit(const BanditRunConfig& config);

// Steps until the final arm is first pulled (its first observation reveals
// the informative-arm value); censored replications count as T steps.
MonteCarloEstimate time_to_identify(const BanditRunResult& result);

}  // namespace jointpred
