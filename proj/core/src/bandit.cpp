#include "jointpred/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "jointpred/parallel.hpp"

namespace jointpred {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void conditional_posterior_into(const EnvModel& prior, const ImaginedOutcomes& imagined,
                                RngStream& rng, std::vector<double>& p_out,
                                std::vector<double>& log_weights,
                                long* contradiction_count) {
  const int arms = prior.arms();
  if (imagined.tau > 0 && imagined.arms != arms) {
    throw std::invalid_argument("conditional_posterior_given_imagined: arm count mismatch");
  }
  p_out.resize(static_cast<std::size_t>(arms));
  const int tau = imagined.tau;

  if (prior.kind() == EnvKind::independent_beta) {
    for (int k = 0; k < arms; ++k) {
      const int s = tau > 0 ? imagined.column_sum(k) : 0;
      const auto& b = prior.beta_priors()[static_cast<std::size_t>(k)];
      p_out[static_cast<std::size_t>(k)] = rng.beta(b.alpha() + s, b.beta() + (tau - s));
    }
    return;
  }

  const auto& hyps = prior.hypotheses();
  log_weights.resize(hyps.size());
  double max_ll = -kInf;
  for (std::size_t h = 0; h < hyps.size(); ++h) {
    double ll = hyps[h].weight > 0.0 ? std::log(hyps[h].weight) : -kInf;
    for (int k = 0; k < arms && ll > -kInf; ++k) {
      const int s = tau > 0 ? imagined.column_sum(k) : 0;
      const int f = tau - s;
      const double p = hyps[h].p[static_cast<std::size_t>(k)];
      if (s > 0) ll += p > 0.0 ? s * std::log(p) : -kInf;
      if (f > 0 && ll > -kInf) ll += p < 1.0 ? f * std::log(1.0 - p) : -kInf;
    }
    log_weights[h] = ll;
    max_ll = std::max(max_ll, ll);
  }

  std::size_t h_draw;
  if (max_ll == -kInf) {
    // Imagined data impossible under every hypothesis: fall back to the
    // prior weights.
    if (contradiction_count) ++*contradiction_count;
    for (std::size_t h = 0; h < hyps.size(); ++h) log_weights[h] = hyps[h].weight;
    h_draw = rng.categorical(log_weights);
  } else {
    for (double& lw : log_weights) lw = std::exp(lw - max_ll);
    h_draw = rng.categorical(log_weights);
  }
  p_out = hyps[h_draw].p;
}

}  // namespace

int min_argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("min_argmax: empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best);
}

SampledEnv conditional_posterior_given_imagined(const EnvModel& prior,
                                                const ImaginedOutcomes& imagined,
                                                RngStream& rng, long* contradiction_count) {
  SampledEnv env;
  std::vector<double> scratch;
  conditional_posterior_into(prior, imagined, rng, env.p, scratch, contradiction_count);
  return env;
}

namespace {

// Buffer-reusing core of approx_ts_step for the replication hot loop.
void approx_ts_step_into(const AgentState& agent, const EnvModel& prior, int tau,
                         TsVariant variant, RngStream& rng, TsStepRecord& rec,
                         std::vector<double>& scratch, long* contradiction_count) {
  if (tau < 1) throw std::invalid_argument("approx_ts_step: tau must be >= 1");
  predict_joint_into(agent, tau, rng, rec.imagined);
  if (variant == TsVariant::posterior_sample) {
    conditional_posterior_into(prior, rec.imagined, rng, rec.sampled_probs, scratch,
                               contradiction_count);
  } else {
    rec.sampled_probs.resize(static_cast<std::size_t>(rec.imagined.arms));
    for (int k = 0; k < rec.imagined.arms; ++k) {
      rec.sampled_probs[static_cast<std::size_t>(k)] =
          static_cast<double>(rec.imagined.column_sum(k)) / tau;
    }
  }
  rec.action = min_argmax(rec.sampled_probs);
  rec.reward = -1;
}

}  // namespace

TsStepRecord approx_ts_step(const AgentState& agent, const EnvModel& prior, int tau,
                            TsVariant variant, RngStream& rng, long* contradiction_count) {
  TsStepRecord rec;
  std::vector<double> scratch;
  approx_ts_step_into(agent, prior, tau, variant, rng, rec, scratch, contradiction_count);
  return rec;
}

double theorem2_bound(int K, long T, double tau, double epsilon) {
  if (K < 2) throw std::invalid_argument("theorem2_bound: K must be >= 2");
  if (T < 1) throw std::invalid_argument("theorem2_bound: T must be >= 1");
  if (!(tau >= 1.0)) throw std::invalid_argument("theorem2_bound: tau must be >= 1");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("theorem2_bound: epsilon must be >= 0");
  const double kd = static_cast<double>(K);
  const double td = static_cast<double>(T);
  const double tau_term = std::isinf(tau) ? 0.0 : kd / std::sqrt(2.0 * tau);
  return std::sqrt(0.5 * kd * td * std::log(kd)) +
         (tau_term + std::sqrt(2.0 * epsilon)) * td;
}

MonteCarloEstimate target_suboptimality(const EnvModel& env_model, int tau, long n_mc,
                                        const RngStream& rng, int threads) {
  if (tau < 1) throw std::invalid_argument("target_suboptimality: tau must be >= 1");
  if (n_mc < 1) throw std::invalid_argument("target_suboptimality: n_mc must be >= 1");

  constexpr long kChunk = 1024;
  auto chunks = run_chunked<MeanAccumulator>(
      n_mc, kChunk, threads, [&](long, long begin, long end) {
        MeanAccumulator acc;
        ImaginedOutcomes proxy_data;
        std::vector<double> target_p, scratch;
        for (long i = begin; i < end; ++i) {
          RngStream s = rng.substream(static_cast<std::uint64_t>(i));
          const SampledEnv real = env_sample(env_model, s);
          const double best = *std::max_element(real.p.begin(), real.p.end());
          proxy_data.resize(tau, env_model.arms());
          for (int t = 0; t < tau; ++t) {
            for (int k = 0; k < env_model.arms(); ++k) {
              proxy_data.set(t, k, s.bernoulli(real.p[static_cast<std::size_t>(k)]) ? 1 : 0);
            }
          }
          conditional_posterior_into(env_model, proxy_data, s, target_p, scratch, nullptr);
          const int target = min_argmax(target_p);
          acc.add(best - real.p[static_cast<std::size_t>(target)]);
        }
        return acc;
      });

  MeanAccumulator total;
  for (const auto& c : chunks) total.merge(c);
  return total.estimate();
}

namespace {

struct ChunkSummary {
  std::vector<double> cum_sum;     // per t
  std::vector<double> cum_sum_sq;  // per t
  long contradictions = 0;
};

int greedy_uniform_tie(std::span<const double> means, RngStream& rng) {
  double best = means[0];
  for (double m : means) best = std::max(best, m);
  int ties = 0;
  for (double m : means) {
    if (m == best) ++ties;
  }
  auto pick = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(ties)));
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k] == best && pick-- == 0) return static_cast<int>(k);
  }
  return static_cast<int>(means.size()) - 1;
}

}  // namespace

BanditRunResult run_bandit(const BanditRunConfig& config) {
  if (config.T < 1) throw std::invalid_argument("run_bandit: T must be >= 1");
  if (config.replications < 1) throw std::invalid_argument("run_bandit: replications must be >= 1");
  if (config.tau < 1 && config.policy == BanditPolicy::approx_ts) {
    throw std::invalid_argument("run_bandit: tau must be >= 1 for approx_ts");
  }
  if (config.policy == BanditPolicy::exact_ts &&
      config.agent_kind != AgentKind::exact_posterior) {
    throw std::invalid_argument("run_bandit: exact_ts requires the exact_posterior agent");
  }

  const int T = config.T;
  const int arms = config.env.arms();
  const long reps = config.replications;

  BanditRunResult result;
  result.arms = arms;
  result.T = T;
  result.replication_stats.resize(static_cast<std::size_t>(reps));
  if (config.collect_traces) result.traces.resize(static_cast<std::size_t>(reps));

  const bool needs_agent = config.policy != BanditPolicy::uniform_random;

  constexpr long kChunk = 64;
  auto chunks = run_chunked<ChunkSummary>(
      reps, kChunk, config.threads, [&](long, long begin, long end) {
        ChunkSummary summary;
        summary.cum_sum.assign(static_cast<std::size_t>(T), 0.0);
        summary.cum_sum_sq.assign(static_cast<std::size_t>(T), 0.0);

        TsStepRecord rec;
        std::vector<double> scratch, probs;

        for (long r = begin; r < end; ++r) {
          const auto rid = static_cast<std::uint64_t>(r);
          RngStream env_rng(config.master_seed, 3 * rid);
          RngStream agent_rng(config.master_seed, 3 * rid + 1);
          RngStream policy_rng(config.master_seed, 3 * rid + 2);

          const SampledEnv real = env_sample(config.env, env_rng);
          const double best = *std::max_element(real.p.begin(), real.p.end());

          AgentState agent =
              needs_agent
                  ? AgentState::make(config.agent_kind, config.env, agent_rng, config.ensemble)
                  : AgentState::make(AgentKind::static_prior, config.env, agent_rng);

          RegretTrace* trace = nullptr;
          if (config.collect_traces) {
            trace = &result.traces[static_cast<std::size_t>(r)];
            trace->replication_id = static_cast<int>(r);
            trace->best_arm_prob = best;
            trace->steps.resize(static_cast<std::size_t>(T));
          }

          double cum = 0.0;
          int first_final = -1;
          for (int t = 0; t < T; ++t) {
            int action = 0;
            switch (config.policy) {
              case BanditPolicy::approx_ts: {
                approx_ts_step_into(agent, config.env, config.tau, config.variant,
                                    policy_rng, rec, scratch, &summary.contradictions);
                action = rec.action;
                break;
              }
              case BanditPolicy::exact_ts: {
                // Direct posterior draw; Algorithm-1's tau -> infinity limit.
                if (config.env.kind() == EnvKind::independent_beta) {
                  probs.resize(static_cast<std::size_t>(arms));
                  const auto& post = agent.beta_posterior();
                  for (int k = 0; k < arms; ++k) {
                    const auto& b = post[static_cast<std::size_t>(k)];
                    probs[static_cast<std::size_t>(k)] = policy_rng.beta(b.alpha(), b.beta());
                  }
                } else {
                  const std::size_t h = policy_rng.categorical(agent.hypothesis_weights());
                  probs = config.env.hypotheses()[h].p;
                }
                action = min_argmax(probs);
                break;
              }
              case BanditPolicy::greedy_marginal: {
                probs = agent.posterior_marginal_means();
                action = greedy_uniform_tie(probs, policy_rng);
                break;
              }
              case BanditPolicy::uniform_random:
                action = static_cast<int>(policy_rng.uniform_int(
                    static_cast<std::uint64_t>(arms)));
                break;
            }

            const int reward = env_step(real, action, env_rng);
            const double step_regret = best - real.p[static_cast<std::size_t>(action)];
            cum += step_regret;
            if (action == arms - 1 && first_final < 0) first_final = t;

            summary.cum_sum[static_cast<std::size_t>(t)] += cum;
            summary.cum_sum_sq[static_cast<std::size_t>(t)] += cum * cum;
            if (trace) {
              trace->steps[static_cast<std::size_t>(t)] = {t, action, reward, step_regret, cum};
            }
            if (needs_agent && config.policy != BanditPolicy::uniform_random) {
              agent = update(std::move(agent), action, reward);
            }
          }
          result.replication_stats[static_cast<std::size_t>(r)] = {best, cum, first_final};
        }
        return summary;
      });

  result.mean_cum_regret.assign(static_cast<std::size_t>(T), 0.0);
  result.se_cum_regret.assign(static_cast<std::size_t>(T), 0.0);
  std::vector<double> sum(static_cast<std::size_t>(T), 0.0);
  std::vector<double> sum_sq(static_cast<std::size_t>(T), 0.0);
  for (const auto& c : chunks) {
    result.contradiction_count += c.contradictions;
    for (int t = 0; t < T; ++t) {
      sum[static_cast<std::size_t>(t)] += c.cum_sum[static_cast<std::size_t>(t)];
      sum_sq[static_cast<std::size_t>(t)] += c.cum_sum_sq[static_cast<std::size_t>(t)];
    }
  }
  const double n = static_cast<double>(reps);
  for (int t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const double mean = sum[ut] / n;
    result.mean_cum_regret[ut] = mean;
    if (reps > 1) {
      const double var = std::max(0.0, (sum_sq[ut] - n * mean * mean) / (n - 1.0));
      result.se_cum_regret[ut] = std::sqrt(var / n);
    }
  }
  return result;
}

MonteCarloEstimate time_to_identify(const BanditRunResult& result) {
  MeanAccumulator acc;
  for (const auto& stat : result.replication_stats) {
    const int steps = stat.first_final_arm_pull >= 0 ? stat.first_final_arm_pull + 1 : result.T;
    acc.add(static_cast<double>(steps));
  }
  return acc.estimate();
}

}  // namespace jointpred
