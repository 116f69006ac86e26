#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "jointpred/envs.hpp"
#include "jointpred/info.hpp"
#include "jointpred/rng.hpp"

using namespace jointpred;

TEST_CASE("coin agents: identical marginals, different joints") {
  for (int tau = 1; tau <= 6; ++tau) {
    FinitePmf a1 = coin_agent1_joint(tau);
    FinitePmf a2 = coin_agent2_joint(tau);
    // Marginal P(first toss = 0) is 1/3 under both.
    double a1_first_zero = 0.0, a2_first_zero = 0.0;
    for (std::size_t idx = 0; idx < a1.size(); ++idx) {
      if ((idx & 1u) == 0) {
        a1_first_zero += a1.prob(idx);
        a2_first_zero += a2.prob(idx);
      }
    }
    CHECK(a1_first_zero == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(a2_first_zero == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // All-zeros: 1/3^tau versus 1/3.
    CHECK(a1.prob(0) == doctest::Approx(std::pow(1.0 / 3.0, tau)).epsilon(1e-12));
    CHECK(a2.prob(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  // Agent 2 assigns zero to mixed sequences.
  FinitePmf a2 = coin_agent2_joint(2);
  CHECK(a2.prob(1) == 0.0);  // "10"
  CHECK(a2.prob(2) == 0.0);  // "01"
}

TEST_CASE("table 1 logistic entries to two decimals") {
  RecommenderInstance inst = table1_instance();
  const double expected[2][4] = {{1.0, 0.0, 0.73, 0.5}, {0.0, 1.0, 0.5, 0.73}};
  for (int t = 0; t < 2; ++t) {
    for (int m = 0; m < 4; ++m) {
      CHECK(std::abs(enjoy_prob(inst, t, m) - expected[t][m]) < 0.005);
    }
  }
  CHECK(enjoy_prob(inst, 0, 2) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("recommender pair probabilities") {
  RecommenderInstance inst = table1_instance();
  // (X_1, X_2): one of the pair is near-certain for every type.
  CHECK(recommender_success_prob(inst, {0, 1}) > 0.999);
  // (X_3, X_4): per-type miss probability (1-sigma(1))(1-sigma(0)) ~ 0.1345.
  const double s34 = recommender_success_prob(inst, {2, 3});
  CHECK(1.0 - s34 == doctest::Approx(0.13447071068499755).epsilon(1e-9));
  CHECK(1.0 - s34 > 0.10);

  CHECK_THROWS(recommender_success_prob(inst, {0, 7}));
  CHECK_THROWS(recommender_success_prob(inst, {1, 1}));
}

TEST_CASE("marginal selector and joint selector disagree on table 1") {
  PairSelection sel = marginal_vs_joint_pair(table1_instance());
  CHECK(sel.marginal_set == std::vector<int>{2, 3});
  CHECK(sel.joint_set == std::vector<int>{0, 1});
}

TEST_CASE("single-type instance: joint selection dominates and contains the top movie") {
  RecommenderInstance inst = table1_instance();
  inst.user_types = {{1.0, {1.0, 0.0}}};  // phi1 only
  PairSelection sel = marginal_vs_joint_pair(inst);
  const double joint_val = recommender_success_prob(
      inst, std::vector<int>(sel.joint_set.begin(), sel.joint_set.end()));
  const double marginal_val = recommender_success_prob(
      inst, std::vector<int>(sel.marginal_set.begin(), sel.marginal_set.end()));
  CHECK(joint_val >= marginal_val - 1e-12);
  // X_1 is best under phi1 (dot = 10); both selectors keep it.
  CHECK(std::find(sel.joint_set.begin(), sel.joint_set.end(), 0) != sel.joint_set.end());
  CHECK(std::find(sel.marginal_set.begin(), sel.marginal_set.end(), 0) !=
        sel.marginal_set.end());
}

TEST_CASE("recommender symmetry under swapping types with movie pairs") {
  RecommenderInstance inst = table1_instance();
  RecommenderInstance swapped = inst;
  std::swap(swapped.user_types[0], swapped.user_types[1]);
  std::swap(swapped.movies[0], swapped.movies[1]);
  std::swap(swapped.movies[2], swapped.movies[3]);
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      CHECK(recommender_success_prob(inst, {a, b}) ==
            doctest::Approx(recommender_success_prob(swapped, {a, b})).epsilon(1e-12));
    }
  }
}

TEST_CASE("informative arm env marginals") {
  EnvModel env = informative_arm_env(4, 0.0);
  for (int k = 0; k < 4; ++k) CHECK(env.arm_mean(k) == 0.5);

  // Expected best-arm value: (1/2)(1) + (1/2)(0.5).
  double e_max = 0.0;
  for (const auto& h : env.hypotheses()) {
    double mx = 0.0;
    for (double p : h.p) mx = std::max(mx, p);
    e_max += h.weight * mx;
  }
  CHECK(e_max == doctest::Approx(0.75).epsilon(1e-12));

  CHECK_THROWS(informative_arm_env(1, 0.0));
  CHECK_THROWS(informative_arm_env(4, 0.5));
}

TEST_CASE("informative arm env posterior after one revealing pull") {
  const double delta = 1e-6;
  EnvModel env = informative_arm_env(4, delta);
  // Bayes: weight on the high hypothesis after observing outcome 1 at arm K.
  const double w_high = (1.0 - delta) / ((1.0 - delta) + delta);
  CHECK(w_high == doctest::Approx(1.0 - delta).epsilon(1e-9));
  CHECK(w_high > 0.9999);
  CHECK(env.hypotheses()[0].p.back() == doctest::Approx(1.0 - delta));
}

TEST_CASE("env sampling and stepping") {
  RngStream rng(11, 3);
  EnvModel single = EnvModel::finite_hypothesis({{1.0, {0.3, 0.9}}});
  for (int i = 0; i < 20; ++i) {
    SampledEnv env = env_sample(single, rng);
    CHECK(env.p == std::vector<double>{0.3, 0.9});
  }

  SampledEnv sure{{1.0}};
  for (int i = 0; i < 50; ++i) CHECK(env_step(sure, 0, rng) == 1);
  CHECK_THROWS(env_step(sure, 2, rng));

  EnvModel uniform = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
  const long n = 100000;
  double mean0 = 0.0;
  for (long i = 0; i < n; ++i) mean0 += env_sample(uniform, rng).p[0];
  CHECK(std::abs(mean0 / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("analytic arm marginal matches monte carlo") {
  RngStream rng(99, 0);
  std::vector<EnvModel> models;
  models.push_back(EnvModel::independent_beta({BetaParams(2, 5), BetaParams(1, 1)}));
  models.push_back(informative_arm_env(3, 0.1));
  models.push_back(coin_env_model());
  for (const auto& model : models) {
    const long n = 40000;
    for (int k = 0; k < model.arms(); ++k) {
      double hits = 0.0;
      for (long i = 0; i < n; ++i) {
        SampledEnv env = env_sample(model, rng);
        hits += env_step(env, k, rng);
      }
      const double mc = hits / static_cast<double>(n);
      const double se = std::sqrt(0.25 / static_cast<double>(n));
      CHECK(std::abs(mc - model.arm_mean(k)) < 5 * se);
    }
  }
}

TEST_CASE("env model validation") {
  CHECK_THROWS(EnvModel::finite_hypothesis({{0.7, {0.5}}, {0.2, {0.5}}}));
  CHECK_THROWS(EnvModel::finite_hypothesis({{1.0, {1.5}}}));
  CHECK_THROWS(EnvModel::finite_hypothesis({{0.5, {0.5}}, {0.5, {0.5, 0.5}}}));
  CHECK_THROWS(EnvModel::independent_beta({}));
}
