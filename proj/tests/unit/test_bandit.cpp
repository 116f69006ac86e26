#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "jointpred/bandit.hpp"
#include "jointpred/envs.hpp"

using namespace jointpred;

TEST_CASE("min argmax breaks ties to the smallest index") {
  std::vector<double> v{0.9, 0.2, 0.9};
  CHECK(min_argmax(v) == 0);
  std::vector<double> w{0.1, 0.4, 0.4};
  CHECK(min_argmax(w) == 1);
  CHECK_THROWS(min_argmax(std::vector<double>{}));
}

TEST_CASE("conditional posterior: beta conjugacy on imagined columns") {
  EnvModel prior = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
  ImaginedOutcomes imagined;
  imagined.resize(4, 2);
  for (int t = 0; t < 4; ++t) imagined.set(t, 0, 1);  // column sums (4, 0)

  RngStream rng(7, 0);
  const long n = 20000;
  double m0 = 0.0, m1 = 0.0;
  for (long i = 0; i < n; ++i) {
    SampledEnv env = conditional_posterior_given_imagined(prior, imagined, rng);
    m0 += env.p[0];
    m1 += env.p[1];
  }
  m0 /= static_cast<double>(n);
  m1 /= static_cast<double>(n);
  // Beta(5,1) and Beta(1,5) means with 5-sigma tolerances.
  const double se = std::sqrt(0.02) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(m0 - 5.0 / 6.0) < 5 * se);
  CHECK(std::abs(m1 - 1.0 / 6.0) < 5 * se);
}

TEST_CASE("conditional posterior: hypothesis reweighting is near-deterministic") {
  EnvModel prior = informative_arm_env(3, 1e-6);
  ImaginedOutcomes imagined;
  imagined.resize(5, 3);
  for (int t = 0; t < 5; ++t) imagined.set(t, 2, 1);  // final arm all ones
  RngStream rng(8, 0);
  for (int i = 0; i < 500; ++i) {
    SampledEnv env = conditional_posterior_given_imagined(prior, imagined, rng);
    CHECK(env.p[2] == doctest::Approx(1.0 - 1e-6));
  }
}

TEST_CASE("conditional posterior: empty matrix reduces to the prior") {
  EnvModel prior = EnvModel::finite_hypothesis({{1.0, {0.3, 0.6}}});
  ImaginedOutcomes empty;
  RngStream rng(9, 0);
  SampledEnv env = conditional_posterior_given_imagined(prior, empty, rng);
  CHECK(env.p == std::vector<double>{0.3, 0.6});
}

TEST_CASE("conditional posterior: contradiction falls back to the prior") {
  EnvModel prior = informative_arm_env(2, 0.0);
  ImaginedOutcomes imagined;
  imagined.resize(2, 2);
  imagined.set(0, 1, 1);  // final-arm column (1, 0): impossible at delta = 0
  RngStream rng(10, 0);
  long contradictions = 0;
  (void)conditional_posterior_given_imagined(prior, imagined, rng, &contradictions);
  CHECK(contradictions == 1);
}

TEST_CASE("approx ts step acts greedily on the sampled probabilities") {
  // Known informative-arm value forces the final arm.
  EnvModel env = informative_arm_env(4, 0.0);
  AgentState agent = AgentState::make(AgentKind::exact_posterior, env, RngStream(1, 0));
  agent = update(std::move(agent), 3, 1);
  RngStream rng(2, 0);
  for (int i = 0; i < 100; ++i) {
    TsStepRecord rec = approx_ts_step(agent, env, 6, TsVariant::posterior_sample, rng);
    CHECK(rec.action == 3);
    CHECK(rec.reward == -1);
  }

  // sample_mean on an all-zeros imagination: zero vector, min-argmax = 0.
  EnvModel zeros = EnvModel::finite_hypothesis({{1.0, {0.0, 0.0, 0.0}}});
  AgentState zero_agent = AgentState::make(AgentKind::exact_posterior, zeros, RngStream(1, 1));
  TsStepRecord rec = approx_ts_step(zero_agent, zeros, 3, TsVariant::sample_mean, rng);
  CHECK(rec.sampled_probs == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(rec.action == 0);
}

TEST_CASE("theorem 2 bound arithmetic") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(theorem2_bound(10, 1000, inf, 0.0) ==
        doctest::Approx(107.29830131446737).epsilon(1e-12));
  CHECK(theorem2_bound(10, 1000, 1000.0, 0.0) ==
        doctest::Approx(330.90509906444635).epsilon(1e-12));
  CHECK(theorem2_bound(10, 100, inf, 0.02) ==
        doctest::Approx(53.93070212207556).epsilon(1e-12));
  CHECK_THROWS(theorem2_bound(1, 100, 16.0, 0.0));
  CHECK_THROWS(theorem2_bound(2, 0, 16.0, 0.0));
  CHECK_THROWS(theorem2_bound(2, 100, 0.5, 0.0));
  CHECK_THROWS(theorem2_bound(2, 100, 16.0, -0.1));
}

TEST_CASE("target suboptimality") {
  // Single hypothesis: the target action is always optimal.
  EnvModel single = EnvModel::finite_hypothesis({{1.0, {0.2, 0.7}}});
  MonteCarloEstimate zero = target_suboptimality(single, 4, 2000, RngStream(3, 0));
  CHECK(zero.mean == 0.0);

  // Long imagination: the proxy posterior concentrates.
  EnvModel beta2 = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
  MonteCarloEstimate big_tau = target_suboptimality(beta2, 4096, 4000, RngStream(4, 0));
  CHECK(big_tau.mean <= 0.05);

  // The proof-sketch inequality at a few (K, tau) points.
  for (int K : {2, 5}) {
    for (int tau : {4, 64}) {
      std::vector<BetaParams> priors(static_cast<std::size_t>(K), BetaParams(1, 1));
      EnvModel env = EnvModel::independent_beta(priors);
      MonteCarloEstimate est = target_suboptimality(env, tau, 4000, RngStream(5, 0));
      CHECK(est.mean <= K / std::sqrt(2.0 * tau) + 5 * est.std_error);
    }
  }
}

TEST_CASE("uniform random baseline matches the order-statistics regret") {
  BanditRunConfig cfg;
  cfg.env = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
  cfg.policy = BanditPolicy::uniform_random;
  cfg.T = 50;
  cfg.replications = 10000;
  cfg.master_seed = 123;
  BanditRunResult result = run_bandit(cfg);
  // Mean per-step regret E[max(p1,p2)] - 1/2 = 1/6.
  const double per_step = result.mean_cum_regret.back() / cfg.T;
  const double se = result.se_cum_regret.back() / cfg.T;
  CHECK(std::abs(per_step - 1.0 / 6.0) < 5 * se);
  // Per-step regret is nonnegative, so cumulative regret is monotone.
  for (int t = 1; t < cfg.T; ++t) {
    CHECK(result.mean_cum_regret[static_cast<std::size_t>(t)] >=
          result.mean_cum_regret[static_cast<std::size_t>(t - 1)] - 1e-12);
  }
}

TEST_CASE("traces are bit-identical across runs and thread counts") {
  BanditRunConfig cfg;
  cfg.env = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
  cfg.policy = BanditPolicy::approx_ts;
  cfg.agent_kind = AgentKind::exact_posterior;
  cfg.T = 40;
  cfg.tau = 8;
  cfg.replications = 300;
  cfg.master_seed = 77;
  cfg.collect_traces = true;

  cfg.threads = 1;
  BanditRunResult a = run_bandit(cfg);
  BanditRunResult b = run_bandit(cfg);
  cfg.threads = 4;
  BanditRunResult c = run_bandit(cfg);

  REQUIRE(a.traces.size() == 300);
  for (std::size_t r = 0; r < a.traces.size(); ++r) {
    for (int t = 0; t < cfg.T; ++t) {
      const auto& sa = a.traces[r].steps[static_cast<std::size_t>(t)];
      const auto& sb = b.traces[r].steps[static_cast<std::size_t>(t)];
      const auto& sc = c.traces[r].steps[static_cast<std::size_t>(t)];
      CHECK(sa.action == sb.action);
      CHECK(sa.reward == sb.reward);
      CHECK(sa.cum_regret == sb.cum_regret);
      CHECK(sa.action == sc.action);
      CHECK(sa.reward == sc.reward);
      CHECK(sa.cum_regret == sc.cum_regret);
    }
  }
  for (int t = 0; t < cfg.T; ++t) {
    CHECK(a.mean_cum_regret[static_cast<std::size_t>(t)] ==
          c.mean_cum_regret[static_cast<std::size_t>(t)]);
    CHECK(a.se_cum_regret[static_cast<std::size_t>(t)] ==
          c.se_cum_regret[static_cast<std::size_t>(t)]);
  }
}

TEST_CASE("realized environments do not depend on the policy") {
  BanditRunConfig cfg;
  cfg.env = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1), BetaParams(1, 1)});
  cfg.T = 10;
  cfg.replications = 50;
  cfg.master_seed = 31;
  cfg.collect_traces = true;

  cfg.policy = BanditPolicy::exact_ts;
  BanditRunResult ts = run_bandit(cfg);
  cfg.policy = BanditPolicy::uniform_random;
  BanditRunResult ur = run_bandit(cfg);
  for (std::size_t r = 0; r < 50; ++r) {
    CHECK(ts.traces[r].best_arm_prob == ur.traces[r].best_arm_prob);
  }
}

TEST_CASE("exact ts probes the informative arm immediately") {
  BanditRunConfig cfg;
  cfg.env = informative_arm_env(8, 1e-6);
  cfg.policy = BanditPolicy::exact_ts;
  cfg.T = 64;
  cfg.replications = 3000;
  cfg.master_seed = 5;
  BanditRunResult result = run_bandit(cfg);
  MonteCarloEstimate t_id = time_to_identify(result);
  // Geometric(1/2) first-probe time: mean 2; spec ceiling is 3 pulls, and
  // non-final pulls before the first probe average 1 (<= 2).
  CHECK(t_id.mean <= 3.0);
  double non_final = 0.0;
  for (const auto& stat : result.replication_stats) {
    non_final += stat.first_final_arm_pull >= 0 ? stat.first_final_arm_pull : cfg.T;
  }
  non_final /= static_cast<double>(cfg.replications);
  CHECK(non_final <= 2.0);
}

TEST_CASE("greedy on marginal means needs about K pulls to find the informative arm") {
  BanditRunConfig cfg;
  cfg.env = informative_arm_env(6, 1e-6);
  cfg.policy = BanditPolicy::greedy_marginal;
  cfg.agent_kind = AgentKind::marginal_product;
  cfg.T = 96;
  cfg.replications = 4000;
  cfg.master_seed = 6;
  BanditRunResult result = run_bandit(cfg);
  MonteCarloEstimate t_id = time_to_identify(result);
  // Geometric(1/K): mean K.
  CHECK(std::abs(t_id.mean - 6.0) < 5 * t_id.std_error);
}

TEST_CASE("approx ts with the exact agent works with both variants") {
  for (TsVariant variant : {TsVariant::posterior_sample, TsVariant::sample_mean}) {
    BanditRunConfig cfg;
    cfg.env = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
    cfg.policy = BanditPolicy::approx_ts;
    cfg.variant = variant;
    cfg.T = 60;
    cfg.tau = 16;
    cfg.replications = 2000;
    cfg.master_seed = 7;
    BanditRunResult result = run_bandit(cfg);
    // Learns: final mean per-step regret well under the uniform baseline 1/6.
    const double early = result.mean_cum_regret[9] / 10.0;
    const double late =
        (result.mean_cum_regret.back() - result.mean_cum_regret[39]) / 20.0;
    CHECK(late < early);
    CHECK(late < 1.0 / 6.0);
  }
}

TEST_CASE("run bandit validates configuration") {
  BanditRunConfig cfg;
  cfg.policy = BanditPolicy::exact_ts;
  cfg.agent_kind = AgentKind::marginal_product;
  CHECK_THROWS(run_bandit(cfg));
  BanditRunConfig bad_t;
  bad_t.T = 0;
  CHECK_THROWS(run_bandit(bad_t));
}
