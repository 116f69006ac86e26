#include "jointpred/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "jointpred/stats.hpp"

namespace jointpred {

namespace {

// Probability of a complete tau-step Bernoulli sequence with `successes`
// ones under a Beta(alpha, beta) parameter: the Polya / Beta-binomial
// sequence probability.
double beta_sequence_prob(const BetaParams& prior, int successes, int tau) {
  double num = 1.0;
  for (int i = 0; i < successes; ++i) num *= prior.alpha() + i;
  for (int j = 0; j < tau - successes; ++j) num *= prior.beta() + j;
  double den = 1.0;
  for (int n = 0; n < tau; ++n) den *= prior.alpha() + prior.beta() + n;
  return num / den;
}

double product_likelihood(const std::vector<double>& p, const std::vector<int>& successes,
                          int tau) {
  double like = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const int s = successes[k];
    like *= std::pow(p[k], s) * std::pow(1.0 - p[k], tau - s);
  }
  return like;
}

}  // namespace

AgentState AgentState::make(AgentKind kind, const EnvModel& prior, RngStream rng,
                            EnsembleOptions ensemble) {
  AgentState state;
  state.kind_ = kind;
  state.prior_ = prior;
  state.rng_ = rng;
  state.ensemble_opts_ = ensemble;
  switch (kind) {
    case AgentKind::exact_posterior:
    case AgentKind::marginal_product:
    case AgentKind::static_prior:
      if (prior.kind() == EnvKind::independent_beta) {
        state.beta_post_ = prior.beta_priors();
      } else {
        state.hyp_weights_.reserve(prior.hypotheses().size());
        for (const auto& h : prior.hypotheses()) state.hyp_weights_.push_back(h.weight);
      }
      break;
    case AgentKind::ensemble: {
      if (ensemble.size < 1) throw std::invalid_argument("ensemble size must be >= 1");
      if (!(ensemble.resample_ess_fraction > 0.0) || ensemble.resample_ess_fraction > 1.0) {
        throw std::invalid_argument("ensemble resample_ess_fraction must lie in (0, 1]");
      }
      state.members_.reserve(static_cast<std::size_t>(ensemble.size));
      for (int m = 0; m < ensemble.size; ++m) {
        state.members_.push_back(env_sample(prior, state.rng_));
      }
      state.member_weights_.assign(static_cast<std::size_t>(ensemble.size),
                                   1.0 / ensemble.size);
      break;
    }
  }
  return state;
}

SampledEnv AgentState::draw_environment(RngStream& rng) const {
  switch (kind_) {
    case AgentKind::static_prior:
      return env_sample(prior_, rng);
    case AgentKind::ensemble:
      return members_[rng.categorical(member_weights_)];
    case AgentKind::exact_posterior:
    case AgentKind::marginal_product:
      if (prior_.kind() == EnvKind::independent_beta) {
        SampledEnv env;
        env.p.resize(beta_post_.size());
        for (std::size_t k = 0; k < beta_post_.size(); ++k) {
          env.p[k] = sample(beta_post_[k], rng);
        }
        return env;
      } else {
        return SampledEnv{prior_.hypotheses()[rng.categorical(hyp_weights_)].p};
      }
  }
  throw std::logic_error("unreachable");
}

std::vector<double> AgentState::posterior_marginal_means() const {
  std::vector<double> means(static_cast<std::size_t>(arms()), 0.0);
  switch (kind_) {
    case AgentKind::static_prior:
      for (int k = 0; k < arms(); ++k) means[static_cast<std::size_t>(k)] = prior_.arm_mean(k);
      break;
    case AgentKind::ensemble: {
      const double total = compensated_sum(member_weights_);
      for (std::size_t m = 0; m < members_.size(); ++m) {
        for (std::size_t k = 0; k < means.size(); ++k) {
          means[k] += member_weights_[m] / total * members_[m].p[k];
        }
      }
      break;
    }
    case AgentKind::exact_posterior:
    case AgentKind::marginal_product:
      if (prior_.kind() == EnvKind::independent_beta) {
        for (std::size_t k = 0; k < means.size(); ++k) means[k] = beta_post_[k].mean();
      } else {
        const double total = compensated_sum(hyp_weights_);
        for (std::size_t h = 0; h < hyp_weights_.size(); ++h) {
          for (std::size_t k = 0; k < means.size(); ++k) {
            means[k] += hyp_weights_[h] / total * prior_.hypotheses()[h].p[k];
          }
        }
      }
      break;
  }
  return means;
}

void predict_joint_into(const AgentState& state, int tau, RngStream& rng,
                        ImaginedOutcomes& out) {
  if (tau < 1) throw std::invalid_argument("predict_joint: tau must be >= 1");
  const int arms = state.arms();
  out.resize(tau, arms);

  // Entry (t, k) ~ Ber(p_k), t-major draw order; integer thresholds replay
  // uniform01() < p_k per entry.
  auto fill = [&](const std::vector<double>& p) {
    constexpr int kStackArms = 64;
    std::uint64_t stack_thresholds[kStackArms];
    std::vector<std::uint64_t> heap_thresholds;
    std::uint64_t* thresholds = stack_thresholds;
    if (arms > kStackArms) {
      heap_thresholds.resize(static_cast<std::size_t>(arms));
      thresholds = heap_thresholds.data();
    }
    for (int k = 0; k < arms; ++k) {
      thresholds[k] = rng.bernoulli_threshold(p[static_cast<std::size_t>(k)]);
    }
    std::uint8_t* bits = out.bits.data();
    for (int t = 0; t < tau; ++t) {
      for (int k = 0; k < arms; ++k) {
        *bits++ = rng.bernoulli_by_threshold(thresholds[k]) ? 1 : 0;
      }
    }
  };

  if (state.kind_ == AgentKind::marginal_product) {
    fill(state.posterior_marginal_means());
    return;
  }
  // Conditionally i.i.d. rows given one environment draw.
  const SampledEnv env = state.draw_environment(rng);
  fill(env.p);
}

ImaginedOutcomes predict_joint(const AgentState& state, int tau, RngStream& rng) {
  ImaginedOutcomes out;
  predict_joint_into(state, tau, rng, out);
  return out;
}

FinitePmf joint_pmf(const AgentState& state, int tau) {
  if (tau < 1) throw std::invalid_argument("joint_pmf: tau must be >= 1");
  const int arms = state.arms();
  const long bits = static_cast<long>(tau) * arms;
  if (bits > 20) {
    throw std::invalid_argument("joint_pmf: tau*K exceeds the enumeration cutoff of 20 bits");
  }
  const std::size_t cells = std::size_t{1} << bits;
  std::vector<double> probs(cells, 0.0);
  std::vector<int> successes(static_cast<std::size_t>(arms));

  auto column_sums = [&](std::size_t idx) {
    std::fill(successes.begin(), successes.end(), 0);
    for (long b = 0; b < bits; ++b) {
      if ((idx >> b) & 1u) ++successes[static_cast<std::size_t>(b % arms)];
    }
  };

  const bool product_form = state.kind_ == AgentKind::marginal_product;
  const bool beta_mixture =
      !product_form && state.prior_.kind() == EnvKind::independent_beta &&
      (state.kind_ == AgentKind::exact_posterior || state.kind_ == AgentKind::static_prior);

  if (product_form) {
    const std::vector<double> means = state.posterior_marginal_means();
    for (std::size_t idx = 0; idx < cells; ++idx) {
      double p = 1.0;
      for (long b = 0; b < bits; ++b) {
        const double m = means[static_cast<std::size_t>(b % arms)];
        p *= ((idx >> b) & 1u) ? m : 1.0 - m;
      }
      probs[idx] = p;
    }
  } else if (beta_mixture) {
    const auto& params =
        state.kind_ == AgentKind::static_prior ? state.prior_.beta_priors() : state.beta_post_;
    for (std::size_t idx = 0; idx < cells; ++idx) {
      column_sums(idx);
      double p = 1.0;
      for (int k = 0; k < arms; ++k) {
        p *= beta_sequence_prob(params[static_cast<std::size_t>(k)],
                                successes[static_cast<std::size_t>(k)], tau);
      }
      probs[idx] = p;
    }
  } else {
    // Weighted mixture over explicit environments: hypothesis posteriors,
    // the frozen hypothesis prior, or ensemble members.
    std::vector<std::pair<double, const std::vector<double>*>> mix;
    if (state.kind_ == AgentKind::ensemble) {
      const double total = compensated_sum(state.member_weights_);
      for (std::size_t m = 0; m < state.members_.size(); ++m) {
        mix.emplace_back(state.member_weights_[m] / total, &state.members_[m].p);
      }
    } else if (state.kind_ == AgentKind::static_prior) {
      for (const auto& h : state.prior_.hypotheses()) mix.emplace_back(h.weight, &h.p);
    } else {
      const double total = compensated_sum(state.hyp_weights_);
      for (std::size_t h = 0; h < state.hyp_weights_.size(); ++h) {
        mix.emplace_back(state.hyp_weights_[h] / total, &state.prior_.hypotheses()[h].p);
      }
    }
    for (std::size_t idx = 0; idx < cells; ++idx) {
      column_sums(idx);
      double acc = 0.0;
      for (const auto& [w, p_vec] : mix) {
        acc += w * product_likelihood(*p_vec, successes, tau);
      }
      probs[idx] = acc;
    }
  }
  return FinitePmf(std::move(probs));
}

AgentState update(AgentState state, int arm, int reward) {
  if (arm < 0 || arm >= state.arms()) throw std::out_of_range("update: invalid arm");
  if (reward != 0 && reward != 1) throw std::invalid_argument("update: reward must be 0 or 1");

  switch (state.kind_) {
    case AgentKind::static_prior:
      return state;
    case AgentKind::exact_posterior:
    case AgentKind::marginal_product: {
      if (state.prior_.kind() == EnvKind::independent_beta) {
        auto& post = state.beta_post_[static_cast<std::size_t>(arm)];
        post = beta_update(post, reward, 1 - reward);
      } else {
        double total = 0.0;
        for (std::size_t h = 0; h < state.hyp_weights_.size(); ++h) {
          const double p = state.prior_.hypotheses()[h].p[static_cast<std::size_t>(arm)];
          state.hyp_weights_[h] *= reward ? p : 1.0 - p;
          total += state.hyp_weights_[h];
        }
        if (!(total > 0.0)) {
          throw std::runtime_error(
              "update: observation has zero likelihood under every hypothesis "
              "(contradictory data with delta = 0)");
        }
        for (double& w : state.hyp_weights_) w /= total;
      }
      return state;
    }
    case AgentKind::ensemble: {
      double total = 0.0;
      for (std::size_t m = 0; m < state.members_.size(); ++m) {
        const double p = state.members_[m].p[static_cast<std::size_t>(arm)];
        state.member_weights_[m] *= reward ? p : 1.0 - p;
        total += state.member_weights_[m];
      }
      if (!(total > 0.0)) {
        throw std::runtime_error(
            "update: observation has zero likelihood under every ensemble member "
            "(contradictory data with delta = 0)");
      }
      double ess_num = 0.0, ess_den = 0.0;
      for (double& w : state.member_weights_) {
        w /= total;
        ess_num += w;
        ess_den += w * w;
      }
      const double ess = ess_num * ess_num / ess_den;
      const double m = static_cast<double>(state.members_.size());
      if (ess < state.ensemble_opts_.resample_ess_fraction * m) {
        std::vector<SampledEnv> resampled;
        resampled.reserve(state.members_.size());
        for (std::size_t i = 0; i < state.members_.size(); ++i) {
          resampled.push_back(state.members_[state.rng_.categorical(state.member_weights_)]);
        }
        state.members_ = std::move(resampled);
        state.member_weights_.assign(state.members_.size(), 1.0 / m);
        ++state.resample_count_;
      }
      return state;
    }
  }
  throw std::logic_error("unreachable");
}

AgentState agent_from_history(AgentKind kind, const EnvModel& prior, RngStream rng,
                              const BanditHistory& history, EnsembleOptions ensemble) {
  AgentState state = AgentState::make(kind, prior, rng, ensemble);
  for (const auto& [arm, reward] : history.steps) {
    state = update(std::move(state), arm, reward);
  }
  return state;
}

}  // namespace jointpred
