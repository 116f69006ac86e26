#include "jointpred/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "jointpred/envs.hpp"
#include "jointpred/parallel.hpp"

namespace jointpred {

double exact_dkl_tau(const FinitePmf& posterior_joint, const FinitePmf& agent_joint) {
  return kl_divergence(posterior_joint, agent_joint);
}

double exact_cross_entropy_tau(const FinitePmf& posterior_joint, const FinitePmf& agent_joint) {
  return cross_entropy(posterior_joint, agent_joint);
}

MonteCarloEstimate mc_cross_entropy(const PredictiveScenario& scenario, long n_samples,
                                    const RngStream& rng, int threads) {
  if (n_samples < 1) throw std::invalid_argument("mc_cross_entropy: n_samples must be >= 1");
  if (!scenario.realize) throw std::invalid_argument("mc_cross_entropy: scenario.realize unset");

  constexpr long kChunk = 1024;
  auto chunks = run_chunked<MeanAccumulator>(
      n_samples, kChunk, threads, [&](long, long begin, long end) {
        MeanAccumulator acc;
        for (long i = begin; i < end; ++i) {
          RngStream s = rng.substream(static_cast<std::uint64_t>(i));
          auto [env_joint, agent_joint] = scenario.realize(s);
          if (!env_joint.same_support(agent_joint)) {
            throw std::invalid_argument("mc_cross_entropy: realize() returned mismatched joints");
          }
          const std::size_t y = sample(env_joint, s);
          const double q = agent_joint.prob(y);
          acc.add(q > 0.0 ? -std::log(q) : std::numeric_limits<double>::infinity());
        }
        return acc;
      });

  MeanAccumulator total;
  for (const auto& c : chunks) total.merge(c);
  return total.estimate();
}

UniversalityGap universality_gap(const DecisionProblem& dp, const FinitePmf& posterior_joint,
                                 const FinitePmf& agent_joint) {
  if (dp.num_actions < 1) throw std::invalid_argument("universality_gap: empty action set");
  if (!posterior_joint.same_support(agent_joint)) {
    throw std::invalid_argument("universality_gap: mismatched outcome spaces");
  }

  const std::size_t n = posterior_joint.size();
  std::vector<double> value_agent(static_cast<std::size_t>(dp.num_actions), 0.0);
  std::vector<double> value_post(static_cast<std::size_t>(dp.num_actions), 0.0);
  for (int a = 0; a < dp.num_actions; ++a) {
    for (std::size_t y = 0; y < n; ++y) {
      const double r = dp.reward(a, y);
      if (!(r >= -1e-12) || !(r <= 1.0 + 1e-12)) {
        throw std::invalid_argument("universality_gap: reward outside [0,1]");
      }
      value_agent[static_cast<std::size_t>(a)] += agent_joint.prob(y) * r;
      value_post[static_cast<std::size_t>(a)] += posterior_joint.prob(y) * r;
    }
  }

  auto min_argmax = [](const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] > v[best]) best = i;
    }
    return static_cast<int>(best);
  };

  UniversalityGap out;
  out.agent_action = min_argmax(value_agent);
  out.posterior_action = min_argmax(value_post);
  out.gap = value_post[static_cast<std::size_t>(out.posterior_action)] -
            value_post[static_cast<std::size_t>(out.agent_action)];
  out.bound = std::sqrt(2.0 * exact_dkl_tau(posterior_joint, agent_joint));
  out.holds = out.gap <= out.bound + 1e-10;
  return out;
}

PredictiveScenario coin_scenario(int which_agent, int tau) {
  if (which_agent != 1 && which_agent != 2) {
    throw std::invalid_argument("coin_scenario: agent must be 1 or 2");
  }
  PredictiveScenario s;
  s.tau = tau;
  // The posterior predictive with no data is the prior mixture, i.e. the
  // agent-2 joint; the realized environment is one deterministic coin.
  s.realize = [which_agent, tau](RngStream& rng) {
    const bool heads_only = rng.bernoulli(2.0 / 3.0);
    const std::size_t cells = std::size_t{1} << tau;
    std::vector<double> env_probs(cells, 0.0);
    env_probs[heads_only ? cells - 1 : 0] = 1.0;
    FinitePmf env_joint(std::move(env_probs));
    FinitePmf agent_joint = which_agent == 1 ? coin_agent1_joint(tau) : coin_agent2_joint(tau);
    return std::make_pair(std::move(env_joint), std::move(agent_joint));
  };
  return s;
}

UniversalitySuiteResult run_universality_suite(int n_instances, std::uint64_t seed) {
  UniversalitySuiteResult result;
  result.instances = n_instances;
  result.max_gap_minus_bound = -std::numeric_limits<double>::infinity();

  for (int i = 0; i < n_instances; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const int tau = 1 + static_cast<int>(rng.uniform_int(3));
    const std::size_t outcomes = std::size_t{1} << tau;
    const int actions = 1 + static_cast<int>(rng.uniform_int(5));

    auto dirichlet = [&](std::size_t n) {
      std::vector<double> v(n);
      double total = 0.0;
      for (double& x : v) {
        x = rng.gamma(1.0);
        total += x;
      }
      for (double& x : v) x /= total;
      return FinitePmf(std::move(v));
    };
    FinitePmf posterior = dirichlet(outcomes);
    FinitePmf agent = dirichlet(outcomes);

    std::vector<double> rewards(static_cast<std::size_t>(actions) * outcomes);
    for (double& r : rewards) r = rng.uniform01();
    DecisionProblem dp;
    dp.num_actions = actions;
    dp.reward = [&rewards, outcomes](int a, std::size_t y) {
      return rewards[static_cast<std::size_t>(a) * outcomes + y];
    };

    const UniversalityGap g = universality_gap(dp, posterior, agent);
    result.max_gap_minus_bound = std::max(result.max_gap_minus_bound, g.gap - g.bound);
    if (!g.holds) ++result.violations;
  }
  result.holds_all = result.violations == 0;
  return result;
}

}  // namespace jointpred
