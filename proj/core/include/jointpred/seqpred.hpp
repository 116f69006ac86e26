#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "jointpred/info.hpp"
#include "jointpred/pmf.hpp"
#include "jointpred/rng.hpp"

namespace jointpred {

// One environment hypothesis for sequential prediction: a label pmf per
// input symbol.
struct SeqPredEnv {
  std::vector<FinitePmf> label_pmf_per_input;
};

// Finite-support sequential prediction problem with a fixed input sequence.
// Keeping the inputs degenerate turns conditional information quantities
// into unconditional ones without changing the claims being verified.
struct SeqPredProblem {
  std::vector<double> env_weights;
  std::vector<SeqPredEnv> envs;
  std::vector<int> inputs;  // X_0..X_{T-1}, indices into the input alphabet
  int num_inputs = 1;
  int num_labels = 2;
  int T = 0;

  void validate() const;
};

// Agent with a finite parameter set, an initial parameter pmf, a stochastic
// incremental update kernel over (state, input, label, t), and a per-state
// predictor. Rows are materialized densely and validated as pmfs.
class IncrementalAgent {
 public:
  using KernelFn = std::function<std::vector<double>(int state, int input, int label, int t)>;
  using PredictorFn = std::function<std::vector<double>(int state, int input)>;

  static IncrementalAgent build(int num_states, int num_inputs, int num_labels, int T,
                                std::vector<double> init, const KernelFn& kernel,
                                const PredictorFn& predictor);

  int num_states() const { return num_states_; }
  int num_inputs() const { return num_inputs_; }
  int num_labels() const { return num_labels_; }
  int horizon() const { return horizon_; }
  std::span<const double> init() const { return init_; }
  std::span<const double> kernel_row(int state, int input, int label, int t) const;
  std::span<const double> predictor_row(int state, int input) const;

 private:
  int num_states_ = 1;
  int num_inputs_ = 1;
  int num_labels_ = 2;
  int horizon_ = 0;
  std::vector<double> init_;
  std::vector<double> kernel_;     // [(t*X + x)*L + y)*S + s][s']
  std::vector<double> predictor_;  // [s*X + x][y]
};

// Exact joint over (environment, Y_1..Y_T, theta_0..theta_T) under the
// generative process: theta_0 ~ init, Y_{t+1} ~ env(.|x_t),
// theta_{t+1} ~ kernel(theta_t, x_t, Y_{t+1}, t). Axes are named
// "env", "Y1".."YT", "th0".."thT".
JointPmf enumerate_joint(const SeqPredProblem& problem, const IncrementalAgent& agent,
                         std::size_t max_entries = 10'000'000);

struct CumulativeKl {
  double total = 0.0;
  std::vector<double> per_step;  // expected KL of the predictor at each t
  long zero_support_events = 0;  // predictor zeros on posterior-positive labels
};

// Exact cumulative expected KL between the step-t posterior predictive and
// the agent's predictor, by forward enumeration over (env, prefix, state).
CumulativeKl cumulative_kl(const SeqPredProblem& problem, const IncrementalAgent& agent);

struct Theorem1Record {
  int t = 0;
  double epsilon = 0.0;     // sum of expected per-step KLs from t onward
  double info_theta = 0.0;  // I(Y_{t+1:T}; theta_t)
  double info_data = 0.0;   // I(Y_{t+1:T}; Y_{1:t})
  bool holds = false;       // info_theta >= info_data - epsilon - 1e-9
};

Theorem1Record verify_theorem1(const SeqPredProblem& problem, const IncrementalAgent& agent,
                               int t, std::size_t max_entries = 10'000'000);

struct Lemma3Check {
  double base = 0.0;  // expected KL against the induced conditional P(Y|theta)
  std::vector<double> candidate_values;
  bool holds = false;  // every candidate >= base - 1e-9
};

// Candidate predictors are per-state label pmfs (S x L row-major) evaluated
// at time t's input.
Lemma3Check lemma3_check(const SeqPredProblem& problem, const IncrementalAgent& agent, int t,
                         std::span<const std::vector<double>> candidates);
bool verify_lemma3(const SeqPredProblem& problem, const IncrementalAgent& agent, int t,
                   std::span<const std::vector<double>> candidates);

// ----- Builders -----

// The deterministic-coin problem: heads-only with weight 2/3, tails-only
// with weight 1/3, one input symbol.
SeqPredProblem coin_seqpred_problem(int T);

// Bayes agent whose state is the observed label prefix.
IncrementalAgent perfect_memory_agent(const SeqPredProblem& problem);
// Constant-state agent predicting the prior predictive at every step.
IncrementalAgent amnesiac_agent(const SeqPredProblem& problem);

// State id of a label prefix in the perfect-memory encoding.
int perfect_memory_state_id(std::span<const int> prefix, int num_labels);

struct RandomInstanceLimits {
  int max_envs = 3;
  int max_states = 4;
  int min_T = 2;
  int max_T = 4;
  int max_inputs = 2;
  int num_labels = 2;
};

// Random enumerable instance; all pmf rows are symmetric Dirichlet(1).
std::pair<SeqPredProblem, IncrementalAgent> random_instance(RngStream& rng,
                                                            const RandomInstanceLimits& limits = {});

struct Theorem1SuiteResult {
  int instances = 0;
  int records = 0;
  int violations = 0;
  int data_processing_violations = 0;
  bool holds_all = false;
};

// Randomized Theorem-1 verification; instance i is reproducible from
// RngStream(seed, i). Checks every t of every instance, plus the
// data-processing direction info_data >= info_theta.
Theorem1SuiteResult run_theorem1_suite(int n_instances, std::uint64_t seed, int threads = 1);

struct Lemma3SuiteResult {
  int instances = 0;
  int candidates_checked = 0;
  int violations = 0;
  bool holds_all = false;
};

Lemma3SuiteResult run_lemma3_suite(int n_instances, int random_candidates_per_instance,
                                   std::uint64_t seed, int threads = 1);

}  // namespace jointpred
