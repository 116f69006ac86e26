#pragma once

#include <cstdint>
#include <vector>

#include "jointpred/envs.hpp"
#include "jointpred/pmf.hpp"
#include "jointpred/rng.hpp"

namespace jointpred {

enum class AgentKind { exact_posterior, marginal_product, ensemble, static_prior };

struct EnsembleOptions {
  int size = 30;
  // Multinomial resampling triggers when the effective sample size drops
  // below this fraction of the member count.
  double resample_ess_fraction = 0.5;
};

// tau x K binary matrix of imagined outcomes, row-major (time major).
struct ImaginedOutcomes {
  int tau = 0;
  int arms = 0;
  std::vector<std::uint8_t> bits;

  void resize(int tau_in, int arms_in) {
    tau = tau_in;
    arms = arms_in;
    bits.assign(static_cast<std::size_t>(tau) * static_cast<std::size_t>(arms), 0);
  }
  std::uint8_t at(int t, int k) const {
    return bits[static_cast<std::size_t>(t) * static_cast<std::size_t>(arms) +
                static_cast<std::size_t>(k)];
  }
  void set(int t, int k, std::uint8_t v) {
    bits[static_cast<std::size_t>(t) * static_cast<std::size_t>(arms) +
         static_cast<std::size_t>(k)] = v;
  }
  int column_sum(int k) const {
    int s = 0;
    for (int t = 0; t < tau; ++t) s += at(t, k);
    return s;
  }
  // Flat outcome index; entry (t, k) occupies bit t*arms + k. Valid while
  // tau*arms <= 63.
  std::uint64_t packed() const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      idx |= static_cast<std::uint64_t>(bits[i]) << i;
    }
    return idx;
  }
};

// An agent's belief state over a Bernoulli-bandit environment plus its own
// randomness stream. Values are cheap to copy; update() returns the
// successor state.
class AgentState {
 public:
  static AgentState make(AgentKind kind, const EnvModel& prior, RngStream rng,
                         EnsembleOptions ensemble = {});

  AgentKind kind() const { return kind_; }
  const EnvModel& prior() const { return prior_; }
  int arms() const { return prior_.arms(); }
  RngStream& rng() { return rng_; }

  // Posterior mean success probability per arm under the agent's belief.
  std::vector<double> posterior_marginal_means() const;

  // Kind-specific internals, exposed for verification.
  const std::vector<BetaParams>& beta_posterior() const { return beta_post_; }
  const std::vector<double>& hypothesis_weights() const { return hyp_weights_; }
  const std::vector<SampledEnv>& ensemble_members() const { return members_; }
  const std::vector<double>& ensemble_weights() const { return member_weights_; }
  long ensemble_resample_count() const { return resample_count_; }

  friend ImaginedOutcomes predict_joint(const AgentState&, int, RngStream&);
  friend void predict_joint_into(const AgentState&, int, RngStream&, ImaginedOutcomes&);
  friend FinitePmf joint_pmf(const AgentState&, int);
  friend AgentState update(AgentState, int, int);

 private:
  AgentKind kind_ = AgentKind::exact_posterior;
  EnvModel prior_ = EnvModel::independent_beta({BetaParams(1.0, 1.0)});
  RngStream rng_{0, 0};
  EnsembleOptions ensemble_opts_;

  std::vector<BetaParams> beta_post_;     // independent_beta posteriors
  std::vector<double> hyp_weights_;       // finite_hypothesis posterior weights
  std::vector<SampledEnv> members_;       // ensemble particles
  std::vector<double> member_weights_;
  long resample_count_ = 0;

  SampledEnv draw_environment(RngStream& rng) const;
};

// Sample tau imagined K-vectors from the agent's joint predictive
// distribution.
ImaginedOutcomes predict_joint(const AgentState& state, int tau, RngStream& rng);
void predict_joint_into(const AgentState& state, int tau, RngStream& rng,
                        ImaginedOutcomes& out);

// Exact enumeration of predict_joint's law over {0,1}^(tau*K); requires
// tau*K <= 20.
FinitePmf joint_pmf(const AgentState& state, int tau);

// Incorporate one (arm, reward) observation; reward in {0,1}.
AgentState update(AgentState state, int arm, int reward);

// Bandit interaction history H_t.
struct BanditHistory {
  std::vector<std::pair<int, int>> steps;  // (arm, reward)
};

// Replay a history through update(); the batch counterpart of incremental
// conditioning.
AgentState agent_from_history(AgentKind kind, const EnvModel& prior, RngStream rng,
                              const BanditHistory& history, EnsembleOptions ensemble = {});

}  // namespace jointpred
