#include "jointpred/envs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "jointpred/stats.hpp"

namespace jointpred {

EnvModel EnvModel::independent_beta(std::vector<BetaParams> priors) {
  if (priors.empty()) throw std::invalid_argument("EnvModel: need at least one arm");
  EnvModel m;
  m.kind_ = EnvKind::independent_beta;
  m.arms_ = static_cast<int>(priors.size());
  m.beta_priors_ = std::move(priors);
  return m;
}

EnvModel EnvModel::finite_hypothesis(std::vector<Hypothesis> hypotheses) {
  if (hypotheses.empty()) throw std::invalid_argument("EnvModel: need at least one hypothesis");
  const std::size_t arms = hypotheses.front().p.size();
  if (arms == 0) throw std::invalid_argument("EnvModel: need at least one arm");
  std::vector<double> weights;
  weights.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    if (h.p.size() != arms) {
      throw std::invalid_argument("EnvModel: hypotheses disagree on arm count");
    }
    if (!(h.weight >= 0.0)) throw std::invalid_argument("EnvModel: negative hypothesis weight");
    for (double p : h.p) {
      if (!(p >= 0.0) || !(p <= 1.0)) {
        throw std::invalid_argument("EnvModel: hypothesis p outside [0,1]");
      }
    }
    weights.push_back(h.weight);
  }
  const double total = compensated_sum(weights);
  if (std::abs(total - 1.0) > FinitePmf::kNormalizationTolerance) {
    throw std::invalid_argument("EnvModel: hypothesis weights sum to " + std::to_string(total));
  }
  EnvModel m;
  m.kind_ = EnvKind::finite_hypothesis;
  m.arms_ = static_cast<int>(arms);
  m.hypotheses_ = std::move(hypotheses);
  if (total != 1.0) {
    for (auto& h : m.hypotheses_) h.weight /= total;
  }
  return m;
}

double EnvModel::arm_mean(int arm) const {
  if (arm < 0 || arm >= arms_) throw std::out_of_range("EnvModel::arm_mean: invalid arm");
  if (kind_ == EnvKind::independent_beta) {
    return beta_priors_[static_cast<std::size_t>(arm)].mean();
  }
  double m = 0.0;
  for (const auto& h : hypotheses_) m += h.weight * h.p[static_cast<std::size_t>(arm)];
  return m;
}

SampledEnv env_sample(const EnvModel& model, RngStream& rng) {
  SampledEnv env;
  env.p.resize(static_cast<std::size_t>(model.arms()));
  if (model.kind() == EnvKind::independent_beta) {
    for (std::size_t k = 0; k < env.p.size(); ++k) {
      env.p[k] = sample(model.beta_priors()[k], rng);
    }
  } else {
    std::vector<double> weights;
    weights.reserve(model.hypotheses().size());
    for (const auto& h : model.hypotheses()) weights.push_back(h.weight);
    env.p = model.hypotheses()[rng.categorical(weights)].p;
  }
  return env;
}

int env_step(const SampledEnv& env, int arm, RngStream& rng) {
  if (arm < 0 || static_cast<std::size_t>(arm) >= env.p.size()) {
    throw std::out_of_range("env_step: invalid arm");
  }
  return rng.bernoulli(env.p[static_cast<std::size_t>(arm)]) ? 1 : 0;
}

EnvModel informative_arm_env(int K, double delta) {
  if (K < 2) throw std::invalid_argument("informative_arm_env: K must be >= 2");
  if (!(delta >= 0.0) || !(delta < 0.5)) {
    throw std::invalid_argument("informative_arm_env: delta must lie in [0, 0.5)");
  }
  std::vector<double> high(static_cast<std::size_t>(K), 0.5);
  std::vector<double> low(static_cast<std::size_t>(K), 0.5);
  high.back() = 1.0 - delta;
  low.back() = delta;
  return EnvModel::finite_hypothesis({{0.5, std::move(high)}, {0.5, std::move(low)}});
}

EnvModel coin_env_model() {
  return EnvModel::finite_hypothesis({{2.0 / 3.0, {1.0}}, {1.0 / 3.0, {0.0}}});
}

FinitePmf coin_agent1_joint(int tau) {
  if (tau < 1) throw std::invalid_argument("coin_agent1_joint: tau must be >= 1");
  if (tau > 25) throw std::invalid_argument("coin_agent1_joint: tau too large to enumerate");
  const std::size_t n = std::size_t{1} << tau;
  std::vector<double> probs(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const int heads = std::popcount(idx);
    probs[idx] = std::pow(2.0 / 3.0, heads) * std::pow(1.0 / 3.0, tau - heads);
  }
  return FinitePmf(std::move(probs));
}

FinitePmf coin_agent2_joint(int tau) {
  if (tau < 1) throw std::invalid_argument("coin_agent2_joint: tau must be >= 1");
  if (tau > 25) throw std::invalid_argument("coin_agent2_joint: tau too large to enumerate");
  const std::size_t n = std::size_t{1} << tau;
  std::vector<double> probs(n, 0.0);
  probs[0] = 1.0 / 3.0;
  probs[n - 1] = 2.0 / 3.0;
  return FinitePmf(std::move(probs));
}

RecommenderInstance table1_instance() {
  RecommenderInstance inst;
  inst.movies = {{10.0, -10.0}, {-10.0, 10.0}, {1.0, 0.0}, {0.0, 1.0}};
  inst.user_types = {{0.5, {1.0, 0.0}}, {0.5, {0.0, 1.0}}};
  inst.k_select = 2;
  return inst;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

void check_instance(const RecommenderInstance& inst) {
  if (inst.movies.empty() || inst.user_types.empty()) {
    throw std::invalid_argument("RecommenderInstance: movies and user types required");
  }
  const std::size_t d = inst.user_types.front().phi.size();
  for (const auto& t : inst.user_types) {
    if (t.phi.size() != d) {
      throw std::invalid_argument("RecommenderInstance: inconsistent feature dimension");
    }
  }
  for (const auto& x : inst.movies) {
    if (x.size() != d) {
      throw std::invalid_argument("RecommenderInstance: inconsistent feature dimension");
    }
  }
  if (inst.k_select < 1 || static_cast<std::size_t>(inst.k_select) > inst.movies.size()) {
    throw std::invalid_argument("RecommenderInstance: k_select out of range");
  }
}

double type_weight_total(const RecommenderInstance& inst) {
  double total = 0.0;
  for (const auto& t : inst.user_types) total += t.weight;
  return total;
}

// All size-k index subsets of 0..n-1 in lexicographic order.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace

double enjoy_prob(const RecommenderInstance& inst, int type_idx, int movie_idx) {
  check_instance(inst);
  if (type_idx < 0 || static_cast<std::size_t>(type_idx) >= inst.user_types.size() ||
      movie_idx < 0 || static_cast<std::size_t>(movie_idx) >= inst.movies.size()) {
    throw std::out_of_range("enjoy_prob: index out of range");
  }
  const auto& phi = inst.user_types[static_cast<std::size_t>(type_idx)].phi;
  const auto& x = inst.movies[static_cast<std::size_t>(movie_idx)];
  double dot = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) dot += phi[i] * x[i];
  return logistic(dot);
}

double recommender_success_prob(const RecommenderInstance& inst,
                                std::span<const int> movie_set) {
  check_instance(inst);
  std::vector<int> seen;
  for (int i : movie_set) {
    if (i < 0 || static_cast<std::size_t>(i) >= inst.movies.size()) {
      throw std::out_of_range("recommender_success_prob: movie index out of range");
    }
    if (std::find(seen.begin(), seen.end(), i) != seen.end()) {
      throw std::invalid_argument("recommender_success_prob: duplicate movie index");
    }
    seen.push_back(i);
  }
  const double total = type_weight_total(inst);
  double success = 0.0;
  for (std::size_t t = 0; t < inst.user_types.size(); ++t) {
    double miss = 1.0;
    for (int i : movie_set) miss *= 1.0 - enjoy_prob(inst, static_cast<int>(t), i);
    success += inst.user_types[t].weight / total * (1.0 - miss);
  }
  return success;
}

double recommender_success_prob(const RecommenderInstance& inst, std::pair<int, int> pair) {
  const int set[2] = {pair.first, pair.second};
  return recommender_success_prob(inst, set);
}

PairSelection marginal_vs_joint_pair(const RecommenderInstance& inst) {
  check_instance(inst);
  const int n = static_cast<int>(inst.movies.size());
  const double total = type_weight_total(inst);

  std::vector<double> means(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < inst.user_types.size(); ++t) {
      means[static_cast<std::size_t>(i)] +=
          inst.user_types[t].weight / total * enjoy_prob(inst, static_cast<int>(t), i);
    }
  }

  PairSelection sel;
  // Top-k by mean, ties by smallest index: stable sort on descending mean.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return means[static_cast<std::size_t>(a)] > means[static_cast<std::size_t>(b)];
  });
  sel.marginal_set.assign(order.begin(), order.begin() + inst.k_select);
  std::sort(sel.marginal_set.begin(), sel.marginal_set.end());

  double best = -1.0;
  for_each_subset(n, inst.k_select, [&](const std::vector<int>& subset) {
    const double v = recommender_success_prob(inst, subset);
    if (v > best) {
      best = v;
      sel.joint_set = subset;
    }
  });
  return sel;
}

FinitePmf recommender_posterior_joint(const RecommenderInstance& inst) {
  check_instance(inst);
  const int n = static_cast<int>(inst.movies.size());
  if (n > 20) throw std::invalid_argument("recommender_posterior_joint: too many movies");
  const double total = type_weight_total(inst);
  const std::size_t cells = std::size_t{1} << n;
  std::vector<double> probs(cells, 0.0);
  for (std::size_t t = 0; t < inst.user_types.size(); ++t) {
    const double w = inst.user_types[t].weight / total;
    for (std::size_t idx = 0; idx < cells; ++idx) {
      double p = 1.0;
      for (int i = 0; i < n; ++i) {
        const double e = enjoy_prob(inst, static_cast<int>(t), i);
        p *= ((idx >> i) & 1u) ? e : 1.0 - e;
      }
      probs[idx] += w * p;
    }
  }
  return FinitePmf(std::move(probs));
}

FinitePmf recommender_marginal_product_joint(const RecommenderInstance& inst) {
  check_instance(inst);
  const int n = static_cast<int>(inst.movies.size());
  if (n > 20) throw std::invalid_argument("recommender_marginal_product_joint: too many movies");
  const double total = type_weight_total(inst);
  std::vector<double> means(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < inst.user_types.size(); ++t) {
      means[static_cast<std::size_t>(i)] +=
          inst.user_types[t].weight / total * enjoy_prob(inst, static_cast<int>(t), i);
    }
  }
  const std::size_t cells = std::size_t{1} << n;
  std::vector<double> probs(cells, 1.0);
  for (std::size_t idx = 0; idx < cells; ++idx) {
    for (int i = 0; i < n; ++i) {
      const double m = means[static_cast<std::size_t>(i)];
      probs[idx] *= ((idx >> i) & 1u) ? m : 1.0 - m;
    }
  }
  return FinitePmf(std::move(probs));
}

}  // namespace jointpred
