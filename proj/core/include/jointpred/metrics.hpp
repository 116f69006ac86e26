#pragma once

#include <functional>
#include <utility>

#include "jointpred/info.hpp"
#include "jointpred/pmf.hpp"
#include "jointpred/rng.hpp"
#include "jointpred/stats.hpp"

namespace jointpred {

// Exact-enumeration ceiling for outer expectations; larger supports fall
// back to Monte Carlo.
inline constexpr std::size_t kMaxEnumerationEntries = std::size_t{1} << 20;

// One supervised-prediction evaluation setup. realize() draws everything the
// tau-th-order metrics condition on (environment, training data, agent
// parameters) and returns the pair of joint pmfs over the same tau-sequence
// outcome space: first the predictive distribution of the realized
// environment (which test labels are drawn from), second the agent's joint
// predictive distribution.
struct PredictiveScenario {
  int tau = 1;
  std::function<std::pair<FinitePmf, FinitePmf>(RngStream&)> realize;
};

// Inner term of the tau-th-order expected KL for one realization; the outer
// expectation is the caller's (enumeration or Monte Carlo).
double exact_dkl_tau(const FinitePmf& posterior_joint, const FinitePmf& agent_joint);

// -sum posterior ln agent; the exact cross-entropy counterpart.
double exact_cross_entropy_tau(const FinitePmf& posterior_joint, const FinitePmf& agent_joint);

// Monte Carlo tau-th-order cross-entropy: mean of -ln P_agent(Y) over
// independent draws of (environment, data, Y). Sample i uses
// rng.substream(i), so the estimate is reproducible and independent of
// thread schedule.
MonteCarloEstimate mc_cross_entropy(const PredictiveScenario& scenario, long n_samples,
                                    const RngStream& rng, int threads = 1);

// Finite-action decision problem judged against a tau-sequence outcome
// space; rewards must lie in [0,1] (checked exhaustively).
struct DecisionProblem {
  int num_actions = 0;
  std::function<double(int action, std::size_t outcome)> reward;
};

struct UniversalityGap {
  double gap = 0.0;    // posterior-optimal value minus value of the agent's pick
  double bound = 0.0;  // sqrt(2 * exact_dkl_tau)
  bool holds = false;  // gap <= bound + 1e-10
  int agent_action = 0;
  int posterior_action = 0;
};

// Certificate that acting greedily under the agent's joint costs at most
// sqrt(2 d_KL) of posterior-expected reward. Argmax ties break to the
// smallest action index.
UniversalityGap universality_gap(const DecisionProblem& dp, const FinitePmf& posterior_joint,
                                 const FinitePmf& agent_joint);

// Coin scenario (Section-2-style): no training data, the posterior equals
// the deterministic-coin mixture; `which_agent` selects agent 1 (independent
// Ber(2/3)) or agent 2 (the mixture itself).
PredictiveScenario coin_scenario(int which_agent, int tau);

struct UniversalitySuiteResult {
  int instances = 0;
  int violations = 0;
  bool holds_all = false;
  double max_gap_minus_bound = 0.0;
};

// Randomized small decision problems (binary outcomes, tau <= 3, up to 5
// actions, Dirichlet(1) pmfs, uniform rewards); the proposition itself is
// the oracle. Instance i is reproducible from RngStream(seed, i).
UniversalitySuiteResult run_universality_suite(int n_instances, std::uint64_t seed);

}  // namespace jointpred
