#pragma once

#include <utility>
#include <vector>

#include "jointpred/pmf.hpp"
#include "jointpred/rng.hpp"

namespace jointpred {

enum class EnvKind { independent_beta, finite_hypothesis };

struct Hypothesis {
  double weight = 0.0;
  std::vector<double> p;  // per-arm success probabilities in [0,1]
};

// Prior over Bernoulli-bandit environments: either independent Beta arms or
// a finite weighted hypothesis set over p-vectors.
class EnvModel {
 public:
  static EnvModel independent_beta(std::vector<BetaParams> priors);
  static EnvModel finite_hypothesis(std::vector<Hypothesis> hypotheses);

  EnvKind kind() const { return kind_; }
  int arms() const { return arms_; }
  const std::vector<BetaParams>& beta_priors() const { return beta_priors_; }
  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }

  // Prior mean of the arm's success probability.
  double arm_mean(int arm) const;

 private:
  EnvKind kind_ = EnvKind::independent_beta;
  int arms_ = 0;
  std::vector<BetaParams> beta_priors_;
  std::vector<Hypothesis> hypotheses_;
};

// One realized environment.
struct SampledEnv {
  std::vector<double> p;
};

SampledEnv env_sample(const EnvModel& model, RngStream& rng);
// Binary reward from the realized environment's chosen arm.
int env_step(const SampledEnv& env, int arm, RngStream& rng);

// Two-hypothesis environment where arms 0..K-2 are known Ber(0.5) and the
// final arm is deterministic-but-unknown up to delta smoothing: p = 1-delta
// under one equally likely hypothesis and p = delta under the other.
// delta = 0 is allowed for exact-enumeration uses.
EnvModel informative_arm_env(int K, double delta);

// Coin with unknown bias: heads-only with probability 2/3, tails-only with
// probability 1/3, as a single-arm hypothesis environment.
EnvModel coin_env_model();

// Joint pmfs over tau-length binary sequences (element 0 is bit 0 of the
// outcome index) for the two coin agents: agent 1 believes a fixed bias of
// 2/3 with independent tosses; agent 2 believes the coin is deterministic,
// all-heads with probability 2/3.
FinitePmf coin_agent1_joint(int tau);
FinitePmf coin_agent2_joint(int tau);

// ----- Movie recommender -----

struct UserType {
  double weight = 0.0;
  std::vector<double> phi;
};

struct RecommenderInstance {
  std::vector<std::vector<double>> movies;  // feature vectors X_i
  std::vector<UserType> user_types;
  int k_select = 2;
};

// The four-movie, two-user-type instance with features (+-10, +-10) and
// unit vectors, selection size 2.
RecommenderInstance table1_instance();

double logistic(double x);

// sigma(phi_j . X_i) for one user type.
double enjoy_prob(const RecommenderInstance& inst, int type_idx, int movie_idx);

// Mixture-weighted probability that the user enjoys at least one movie of
// the set.
double recommender_success_prob(const RecommenderInstance& inst,
                                std::span<const int> movie_set);
double recommender_success_prob(const RecommenderInstance& inst,
                                std::pair<int, int> pair);

struct PairSelection {
  std::vector<int> marginal_set;  // top-k by per-movie mixture mean
  std::vector<int> joint_set;     // argmax of set success probability
};

// Marginal-vs-joint selection; ties by smallest index (lexicographically
// smallest set for the joint selector). Indices are 0-based.
PairSelection marginal_vs_joint_pair(const RecommenderInstance& inst);

// Exact joint of enjoyment indicators (Y_1..Y_N) under the type mixture;
// outcome index packs movie i into bit i.
FinitePmf recommender_posterior_joint(const RecommenderInstance& inst);
// Product of the mixture marginals over the same outcome space.
FinitePmf recommender_marginal_product_joint(const RecommenderInstance& inst);

}  // namespace jointpred
