#include "jointpred/seqpred.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jointpred/parallel.hpp"
#include "jointpred/stats.hpp"

namespace jointpred {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> validated_row(std::vector<double> row, std::size_t expected,
                                  const char* what) {
  if (row.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": row has wrong length");
  }
  FinitePmf pmf(std::move(row));  // validates and renormalizes
  return pmf.probs();
}

// KL(p || q) over small dense label rows with zero-event counting.
double kl_row(std::span<const double> p, std::span<const double> q, long* zero_events) {
  double acc = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] == 0.0) continue;
    if (q[y] == 0.0) {
      if (zero_events) ++*zero_events;
      return kInf;
    }
    acc += p[y] * std::log(p[y] / q[y]);
  }
  return acc < 0.0 ? 0.0 : acc;
}

}  // namespace

void SeqPredProblem::validate() const {
  if (T < 1) throw std::invalid_argument("SeqPredProblem: T must be >= 1");
  if (num_labels < 2) throw std::invalid_argument("SeqPredProblem: need at least two labels");
  if (envs.empty() || envs.size() != env_weights.size()) {
    throw std::invalid_argument("SeqPredProblem: env_weights and envs must match and be non-empty");
  }
  const double total = compensated_sum(env_weights);
  if (std::abs(total - 1.0) > FinitePmf::kNormalizationTolerance) {
    throw std::invalid_argument("SeqPredProblem: environment weights must sum to 1");
  }
  if (static_cast<int>(inputs.size()) != T) {
    throw std::invalid_argument("SeqPredProblem: inputs must have length T");
  }
  for (int x : inputs) {
    if (x < 0 || x >= num_inputs) throw std::invalid_argument("SeqPredProblem: input out of range");
  }
  for (const auto& env : envs) {
    if (static_cast<int>(env.label_pmf_per_input.size()) != num_inputs) {
      throw std::invalid_argument("SeqPredProblem: each env needs a pmf per input symbol");
    }
    for (const auto& pmf : env.label_pmf_per_input) {
      if (static_cast<int>(pmf.size()) != num_labels) {
        throw std::invalid_argument("SeqPredProblem: label pmf has wrong size");
      }
    }
  }
}

IncrementalAgent IncrementalAgent::build(int num_states, int num_inputs, int num_labels, int T,
                                         std::vector<double> init, const KernelFn& kernel,
                                         const PredictorFn& predictor) {
  if (num_states < 1 || num_inputs < 1 || num_labels < 2 || T < 1) {
    throw std::invalid_argument("IncrementalAgent: invalid dimensions");
  }
  IncrementalAgent agent;
  agent.num_states_ = num_states;
  agent.num_inputs_ = num_inputs;
  agent.num_labels_ = num_labels;
  agent.horizon_ = T;
  agent.init_ = validated_row(std::move(init), static_cast<std::size_t>(num_states),
                              "IncrementalAgent init");

  const std::size_t s_sz = static_cast<std::size_t>(num_states);
  agent.kernel_.resize(static_cast<std::size_t>(T) * num_inputs * num_labels * s_sz * s_sz);
  for (int t = 0; t < T; ++t) {
    for (int x = 0; x < num_inputs; ++x) {
      for (int y = 0; y < num_labels; ++y) {
        for (int s = 0; s < num_states; ++s) {
          auto row = validated_row(kernel(s, x, y, t), s_sz, "IncrementalAgent kernel");
          const std::size_t base =
              ((((static_cast<std::size_t>(t) * num_inputs + x) * num_labels + y) * s_sz) + s) *
              s_sz;
          std::copy(row.begin(), row.end(), agent.kernel_.begin() + static_cast<long>(base));
        }
      }
    }
  }
  agent.predictor_.resize(s_sz * num_inputs * static_cast<std::size_t>(num_labels));
  for (int s = 0; s < num_states; ++s) {
    for (int x = 0; x < num_inputs; ++x) {
      auto row = validated_row(predictor(s, x), static_cast<std::size_t>(num_labels),
                               "IncrementalAgent predictor");
      const std::size_t base =
          (static_cast<std::size_t>(s) * num_inputs + x) * static_cast<std::size_t>(num_labels);
      std::copy(row.begin(), row.end(), agent.predictor_.begin() + static_cast<long>(base));
    }
  }
  return agent;
}

std::span<const double> IncrementalAgent::kernel_row(int state, int input, int label,
                                                     int t) const {
  const std::size_t s_sz = static_cast<std::size_t>(num_states_);
  const std::size_t base =
      ((((static_cast<std::size_t>(t) * num_inputs_ + input) * num_labels_ + label) * s_sz) +
       static_cast<std::size_t>(state)) *
      s_sz;
  return {kernel_.data() + base, s_sz};
}

std::span<const double> IncrementalAgent::predictor_row(int state, int input) const {
  const std::size_t base = (static_cast<std::size_t>(state) * num_inputs_ + input) *
                           static_cast<std::size_t>(num_labels_);
  return {predictor_.data() + base, static_cast<std::size_t>(num_labels_)};
}

JointPmf enumerate_joint(const SeqPredProblem& problem, const IncrementalAgent& agent,
                         std::size_t max_entries) {
  problem.validate();
  if (agent.num_labels() != problem.num_labels || agent.num_inputs() < problem.num_inputs ||
      agent.horizon() < problem.T) {
    throw std::invalid_argument("enumerate_joint: agent dimensions do not cover the problem");
  }
  const int T = problem.T;
  const int L = problem.num_labels;
  const int S = agent.num_states();
  const auto E = problem.envs.size();

  double cells_d = static_cast<double>(E);
  for (int t = 0; t < T; ++t) cells_d *= L;
  for (int t = 0; t <= T; ++t) cells_d *= S;
  if (cells_d > static_cast<double>(max_entries)) {
    throw std::invalid_argument("enumerate_joint: table would exceed the enumeration cutoff");
  }

  std::vector<Axis> axes;
  axes.push_back({"env", static_cast<int>(E)});
  for (int t = 1; t <= T; ++t) axes.push_back({"Y" + std::to_string(t), L});
  for (int t = 0; t <= T; ++t) axes.push_back({"th" + std::to_string(t), S});

  const auto cells = static_cast<std::size_t>(cells_d);
  std::vector<double> table(cells);
  std::vector<int> coord(axes.size());
  for (std::size_t flat = 0; flat < cells; ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = axes.size(); a-- > 0;) {
      coord[a] = static_cast<int>(rem % static_cast<std::size_t>(axes[a].size));
      rem /= static_cast<std::size_t>(axes[a].size);
    }
    const int e = coord[0];
    const int* y = coord.data() + 1;      // y[t] = Y_{t+1}
    const int* th = coord.data() + 1 + T; // th[t] = theta_t
    double p = problem.env_weights[static_cast<std::size_t>(e)] *
               agent.init()[static_cast<std::size_t>(th[0])];
    for (int t = 0; t < T && p > 0.0; ++t) {
      const int x = problem.inputs[static_cast<std::size_t>(t)];
      p *= problem.envs[static_cast<std::size_t>(e)]
               .label_pmf_per_input[static_cast<std::size_t>(x)]
               .prob(static_cast<std::size_t>(y[t]));
      p *= agent.kernel_row(th[t], x, y[t], t)[static_cast<std::size_t>(th[t + 1])];
    }
    table[flat] = p;
  }
  return JointPmf(std::move(axes), std::move(table));
}

CumulativeKl cumulative_kl(const SeqPredProblem& problem, const IncrementalAgent& agent) {
  problem.validate();
  if (agent.num_labels() != problem.num_labels || agent.horizon() < problem.T) {
    throw std::invalid_argument("cumulative_kl: agent dimensions do not cover the problem");
  }
  const int T = problem.T;
  const int L = problem.num_labels;
  const int S = agent.num_states();
  const auto E = problem.envs.size();

  CumulativeKl out;
  out.per_step.assign(static_cast<std::size_t>(T), 0.0);

  // f[(e * prefixes + prefix) * S + s] = P(env = e, Y_{1:t} = prefix, theta_t = s)
  std::size_t prefixes = 1;
  std::vector<double> f(E * S, 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    for (int s = 0; s < S; ++s) {
      f[e * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)] =
          problem.env_weights[e] * agent.init()[static_cast<std::size_t>(s)];
    }
  }

  std::vector<double> posterior_label(static_cast<std::size_t>(L));
  for (int t = 0; t < T; ++t) {
    const int x = problem.inputs[static_cast<std::size_t>(t)];
    std::vector<double> next(E * prefixes * static_cast<std::size_t>(L) * S, 0.0);
    double step_term = 0.0;
    bool step_inf = false;

    for (std::size_t prefix = 0; prefix < prefixes; ++prefix) {
      double prefix_mass = 0.0;
      std::fill(posterior_label.begin(), posterior_label.end(), 0.0);
      for (std::size_t e = 0; e < E; ++e) {
        double pe = 0.0;
        for (int s = 0; s < S; ++s) {
          pe += f[(e * prefixes + prefix) * static_cast<std::size_t>(S) +
                  static_cast<std::size_t>(s)];
        }
        prefix_mass += pe;
        const auto& env_pmf =
            problem.envs[e].label_pmf_per_input[static_cast<std::size_t>(x)];
        for (int y = 0; y < L; ++y) {
          posterior_label[static_cast<std::size_t>(y)] +=
              pe * env_pmf.prob(static_cast<std::size_t>(y));
        }
      }
      if (prefix_mass == 0.0) continue;
      for (double& v : posterior_label) v /= prefix_mass;

      for (int s = 0; s < S; ++s) {
        double w = 0.0;
        for (std::size_t e = 0; e < E; ++e) {
          w += f[(e * prefixes + prefix) * static_cast<std::size_t>(S) +
                 static_cast<std::size_t>(s)];
        }
        if (w == 0.0) continue;
        const double kl = kl_row(posterior_label, agent.predictor_row(s, x),
                                 &out.zero_support_events);
        if (std::isinf(kl)) {
          step_inf = true;
        } else {
          step_term += w * kl;
        }
      }

      // Advance the forward joint.
      for (std::size_t e = 0; e < E; ++e) {
        const auto& env_pmf =
            problem.envs[e].label_pmf_per_input[static_cast<std::size_t>(x)];
        for (int s = 0; s < S; ++s) {
          const double base = f[(e * prefixes + prefix) * static_cast<std::size_t>(S) +
                                static_cast<std::size_t>(s)];
          if (base == 0.0) continue;
          for (int y = 0; y < L; ++y) {
            const double withy = base * env_pmf.prob(static_cast<std::size_t>(y));
            if (withy == 0.0) continue;
            const auto kernel = agent.kernel_row(s, x, y, t);
            const std::size_t new_prefix = prefix * static_cast<std::size_t>(L) +
                                           static_cast<std::size_t>(y);
            for (int s2 = 0; s2 < S; ++s2) {
              next[(e * (prefixes * static_cast<std::size_t>(L)) + new_prefix) *
                       static_cast<std::size_t>(S) +
                   static_cast<std::size_t>(s2)] += withy * kernel[static_cast<std::size_t>(s2)];
            }
          }
        }
      }
    }

    out.per_step[static_cast<std::size_t>(t)] = step_inf ? kInf : step_term;
    f = std::move(next);
    prefixes *= static_cast<std::size_t>(L);
  }

  out.total = compensated_sum(out.per_step);
  for (double v : out.per_step) {
    if (std::isinf(v)) out.total = kInf;
  }
  return out;
}

Theorem1Record verify_theorem1(const SeqPredProblem& problem, const IncrementalAgent& agent,
                               int t, std::size_t max_entries) {
  if (t < 0 || t >= problem.T) throw std::invalid_argument("verify_theorem1: t out of range");
  const CumulativeKl kl = cumulative_kl(problem, agent);
  Theorem1Record rec;
  rec.t = t;
  rec.epsilon = 0.0;
  for (int u = t; u < problem.T; ++u) {
    const double v = kl.per_step[static_cast<std::size_t>(u)];
    rec.epsilon = std::isinf(v) ? kInf : rec.epsilon + v;
    if (std::isinf(rec.epsilon)) break;
  }

  const JointPmf joint = enumerate_joint(problem, agent, max_entries);
  std::vector<std::string> future;
  for (int u = t + 1; u <= problem.T; ++u) future.push_back("Y" + std::to_string(u));
  std::vector<std::string> theta = {"th" + std::to_string(t)};
  std::vector<std::string> data;
  for (int u = 1; u <= t; ++u) data.push_back("Y" + std::to_string(u));

  rec.info_theta = mutual_information(joint, future, theta);
  bool empty_data = false;
  rec.info_data = mutual_information(joint, future, data, {}, &empty_data);
  rec.holds = rec.info_theta >= rec.info_data - rec.epsilon - 1e-9;
  return rec;
}

Lemma3Check lemma3_check(const SeqPredProblem& problem, const IncrementalAgent& agent, int t,
                         std::span<const std::vector<double>> candidates) {
  if (t < 0 || t >= problem.T) throw std::invalid_argument("lemma3_check: t out of range");
  problem.validate();
  const int L = problem.num_labels;
  const int S = agent.num_states();
  const auto E = problem.envs.size();
  const int x = problem.inputs[static_cast<std::size_t>(t)];

  for (const auto& q : candidates) {
    if (static_cast<int>(q.size()) != S * L) {
      throw std::invalid_argument("lemma3_check: candidate must be an S x L table");
    }
  }

  // Forward to time t: f over (env, prefix, state).
  std::size_t prefixes = 1;
  std::vector<double> f(E * static_cast<std::size_t>(S), 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    for (int s = 0; s < S; ++s) {
      f[e * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)] =
          problem.env_weights[e] * agent.init()[static_cast<std::size_t>(s)];
    }
  }
  for (int u = 0; u < t; ++u) {
    const int xu = problem.inputs[static_cast<std::size_t>(u)];
    std::vector<double> next(E * prefixes * static_cast<std::size_t>(L) * S, 0.0);
    for (std::size_t e = 0; e < E; ++e) {
      const auto& env_pmf = problem.envs[e].label_pmf_per_input[static_cast<std::size_t>(xu)];
      for (std::size_t prefix = 0; prefix < prefixes; ++prefix) {
        for (int s = 0; s < S; ++s) {
          const double base = f[(e * prefixes + prefix) * static_cast<std::size_t>(S) +
                                static_cast<std::size_t>(s)];
          if (base == 0.0) continue;
          for (int y = 0; y < L; ++y) {
            const double withy = base * env_pmf.prob(static_cast<std::size_t>(y));
            if (withy == 0.0) continue;
            const auto kernel = agent.kernel_row(s, xu, y, u);
            const std::size_t new_prefix =
                prefix * static_cast<std::size_t>(L) + static_cast<std::size_t>(y);
            for (int s2 = 0; s2 < S; ++s2) {
              next[(e * (prefixes * static_cast<std::size_t>(L)) + new_prefix) *
                       static_cast<std::size_t>(S) +
                   static_cast<std::size_t>(s2)] += withy * kernel[static_cast<std::size_t>(s2)];
            }
          }
        }
      }
    }
    f = std::move(next);
    prefixes *= static_cast<std::size_t>(L);
  }

  // P(prefix, s), posterior label pmf per prefix, induced conditional per state.
  std::vector<double> joint_ps(prefixes * static_cast<std::size_t>(S), 0.0);
  std::vector<double> posterior(prefixes * static_cast<std::size_t>(L), 0.0);
  std::vector<double> state_mass(static_cast<std::size_t>(S), 0.0);
  std::vector<double> induced(static_cast<std::size_t>(S) * L, 0.0);
  for (std::size_t prefix = 0; prefix < prefixes; ++prefix) {
    double prefix_mass = 0.0;
    for (std::size_t e = 0; e < E; ++e) {
      double pe = 0.0;
      for (int s = 0; s < S; ++s) {
        const double v = f[(e * prefixes + prefix) * static_cast<std::size_t>(S) +
                           static_cast<std::size_t>(s)];
        pe += v;
        joint_ps[prefix * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)] += v;
      }
      prefix_mass += pe;
      const auto& env_pmf = problem.envs[e].label_pmf_per_input[static_cast<std::size_t>(x)];
      for (int y = 0; y < L; ++y) {
        posterior[prefix * static_cast<std::size_t>(L) + static_cast<std::size_t>(y)] +=
            pe * env_pmf.prob(static_cast<std::size_t>(y));
      }
    }
    if (prefix_mass == 0.0) continue;
    for (int y = 0; y < L; ++y) {
      posterior[prefix * static_cast<std::size_t>(L) + static_cast<std::size_t>(y)] /=
          prefix_mass;
    }
    for (int s = 0; s < S; ++s) {
      const double w =
          joint_ps[prefix * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)];
      state_mass[static_cast<std::size_t>(s)] += w;
      for (int y = 0; y < L; ++y) {
        induced[static_cast<std::size_t>(s) * L + static_cast<std::size_t>(y)] +=
            w * posterior[prefix * static_cast<std::size_t>(L) + static_cast<std::size_t>(y)];
      }
    }
  }
  for (int s = 0; s < S; ++s) {
    if (state_mass[static_cast<std::size_t>(s)] == 0.0) continue;
    for (int y = 0; y < L; ++y) {
      induced[static_cast<std::size_t>(s) * L + static_cast<std::size_t>(y)] /=
          state_mass[static_cast<std::size_t>(s)];
    }
  }

  auto expected_kl_against = [&](const std::function<std::span<const double>(int)>& q_row) {
    double acc = 0.0;
    for (std::size_t prefix = 0; prefix < prefixes; ++prefix) {
      for (int s = 0; s < S; ++s) {
        const double w =
            joint_ps[prefix * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)];
        if (w == 0.0) continue;
        const std::span<const double> post{
            posterior.data() + prefix * static_cast<std::size_t>(L),
            static_cast<std::size_t>(L)};
        const double kl = kl_row(post, q_row(s), nullptr);
        if (std::isinf(kl)) return kInf;
        acc += w * kl;
      }
    }
    return acc;
  };

  Lemma3Check out;
  out.base = expected_kl_against([&](int s) {
    return std::span<const double>{induced.data() + static_cast<std::size_t>(s) * L,
                                   static_cast<std::size_t>(L)};
  });
  out.holds = true;
  for (const auto& q : candidates) {
    const double v = expected_kl_against([&](int s) {
      return std::span<const double>{q.data() + static_cast<std::size_t>(s) * L,
                                     static_cast<std::size_t>(L)};
    });
    out.candidate_values.push_back(v);
    if (!(v >= out.base - 1e-9)) out.holds = false;
  }
  return out;
}

bool verify_lemma3(const SeqPredProblem& problem, const IncrementalAgent& agent, int t,
                   std::span<const std::vector<double>> candidates) {
  return lemma3_check(problem, agent, t, candidates).holds;
}

SeqPredProblem coin_seqpred_problem(int T) {
  SeqPredProblem p;
  p.T = T;
  p.num_inputs = 1;
  p.num_labels = 2;
  p.env_weights = {2.0 / 3.0, 1.0 / 3.0};
  p.envs.push_back({{FinitePmf({0.0, 1.0})}});  // heads-only
  p.envs.push_back({{FinitePmf({1.0, 0.0})}});  // tails-only
  p.inputs.assign(static_cast<std::size_t>(T), 0);
  p.validate();
  return p;
}

int perfect_memory_state_id(std::span<const int> prefix, int num_labels) {
  // Prefix-tree node id: level offset plus base-L value, first label least
  // significant.
  int offset = 0;
  int level_size = 1;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    offset += level_size;
    level_size *= num_labels;
  }
  int value = 0;
  int scale = 1;
  for (int y : prefix) {
    value += y * scale;
    scale *= num_labels;
  }
  return offset + value;
}

IncrementalAgent perfect_memory_agent(const SeqPredProblem& problem) {
  problem.validate();
  const int T = problem.T;
  const int L = problem.num_labels;

  std::vector<int> level_offset(static_cast<std::size_t>(T) + 2, 0);
  int level_size = 1;
  for (int l = 0; l <= T; ++l) {
    level_offset[static_cast<std::size_t>(l) + 1] = level_offset[static_cast<std::size_t>(l)] +
                                                    level_size;
    level_size *= L;
  }
  const int S = level_offset[static_cast<std::size_t>(T) + 1];

  auto level_of = [&](int state) {
    int l = 0;
    while (state >= level_offset[static_cast<std::size_t>(l) + 1]) ++l;
    return l;
  };

  auto posterior_predictive = [&, L](int state, int input) {
    const int l = level_of(state);
    int value = state - level_offset[static_cast<std::size_t>(l)];
    std::vector<double> env_w(problem.env_weights);
    for (int j = 0; j < l; ++j) {
      const int y = value % L;
      value /= L;
      const int xj = problem.inputs[static_cast<std::size_t>(j)];
      for (std::size_t e = 0; e < env_w.size(); ++e) {
        env_w[e] *= problem.envs[e]
                        .label_pmf_per_input[static_cast<std::size_t>(xj)]
                        .prob(static_cast<std::size_t>(y));
      }
    }
    const double total = compensated_sum(env_w);
    std::vector<double> pred(static_cast<std::size_t>(L), 0.0);
    if (total == 0.0) {
      // Unreachable prefix; any valid row will do.
      pred.assign(static_cast<std::size_t>(L), 1.0 / L);
      return pred;
    }
    for (std::size_t e = 0; e < env_w.size(); ++e) {
      for (int y = 0; y < L; ++y) {
        pred[static_cast<std::size_t>(y)] +=
            env_w[e] / total *
            problem.envs[e]
                .label_pmf_per_input[static_cast<std::size_t>(input)]
                .prob(static_cast<std::size_t>(y));
      }
    }
    return pred;
  };

  auto kernel = [&, L, S](int state, int /*input*/, int label, int t) {
    std::vector<double> row(static_cast<std::size_t>(S), 0.0);
    const int l = level_of(state);
    if (l == t && l < T) {
      const int value = state - level_offset[static_cast<std::size_t>(l)];
      int scale = 1;
      for (int j = 0; j < l; ++j) scale *= L;
      const int next = level_offset[static_cast<std::size_t>(l) + 1] + value + label * scale;
      row[static_cast<std::size_t>(next)] = 1.0;
    } else {
      row[static_cast<std::size_t>(state)] = 1.0;  // off-path; keep rows valid
    }
    return row;
  };

  std::vector<double> init(static_cast<std::size_t>(S), 0.0);
  init[0] = 1.0;
  return IncrementalAgent::build(S, problem.num_inputs, L, T, std::move(init), kernel,
                                 posterior_predictive);
}

IncrementalAgent amnesiac_agent(const SeqPredProblem& problem) {
  problem.validate();
  const int L = problem.num_labels;
  auto kernel = [](int, int, int, int) { return std::vector<double>{1.0}; };
  auto predictor = [&, L](int, int input) {
    std::vector<double> pred(static_cast<std::size_t>(L), 0.0);
    for (std::size_t e = 0; e < problem.envs.size(); ++e) {
      for (int y = 0; y < L; ++y) {
        pred[static_cast<std::size_t>(y)] +=
            problem.env_weights[e] *
            problem.envs[e]
                .label_pmf_per_input[static_cast<std::size_t>(input)]
                .prob(static_cast<std::size_t>(y));
      }
    }
    return pred;
  };
  return IncrementalAgent::build(1, problem.num_inputs, L, problem.T, {1.0}, kernel, predictor);
}

std::pair<SeqPredProblem, IncrementalAgent> random_instance(RngStream& rng,
                                                            const RandomInstanceLimits& limits) {
  auto dirichlet = [&rng](int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double total = 0.0;
    for (double& x : v) {
      x = rng.gamma(1.0);
      total += x;
    }
    for (double& x : v) x /= total;
    return v;
  };

  SeqPredProblem p;
  p.T = limits.min_T + static_cast<int>(rng.uniform_int(
                           static_cast<std::uint64_t>(limits.max_T - limits.min_T + 1)));
  p.num_labels = limits.num_labels;
  p.num_inputs = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(limits.max_inputs)));
  const int E = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(limits.max_envs)));
  p.env_weights = dirichlet(E);
  for (int e = 0; e < E; ++e) {
    SeqPredEnv env;
    for (int x = 0; x < p.num_inputs; ++x) {
      env.label_pmf_per_input.emplace_back(dirichlet(p.num_labels));
    }
    p.envs.push_back(std::move(env));
  }
  for (int t = 0; t < p.T; ++t) {
    p.inputs.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(p.num_inputs))));
  }
  p.validate();

  const int S = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(limits.max_states)));
  auto kernel = [&](int, int, int, int) { return dirichlet(S); };
  auto predictor = [&](int, int) { return dirichlet(p.num_labels); };
  IncrementalAgent agent = IncrementalAgent::build(S, p.num_inputs, p.num_labels, p.T,
                                                   dirichlet(S), kernel, predictor);
  return {std::move(p), std::move(agent)};
}

Theorem1SuiteResult run_theorem1_suite(int n_instances, std::uint64_t seed, int threads) {
  struct Partial {
    int records = 0;
    int violations = 0;
    int dp_violations = 0;
  };
  auto chunks = run_chunked<Partial>(n_instances, 8, threads, [&](long, long begin, long end) {
    Partial part;
    for (long i = begin; i < end; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      auto [problem, agent] = random_instance(rng);
      for (int t = 0; t < problem.T; ++t) {
        const Theorem1Record rec = verify_theorem1(problem, agent, t);
        ++part.records;
        if (!rec.holds) ++part.violations;
        if (!(rec.info_data >= rec.info_theta - 1e-9)) ++part.dp_violations;
      }
    }
    return part;
  });
  Theorem1SuiteResult result;
  result.instances = n_instances;
  for (const auto& c : chunks) {
    result.records += c.records;
    result.violations += c.violations;
    result.data_processing_violations += c.dp_violations;
  }
  result.holds_all = result.violations == 0 && result.data_processing_violations == 0;
  return result;
}

Lemma3SuiteResult run_lemma3_suite(int n_instances, int random_candidates_per_instance,
                                   std::uint64_t seed, int threads) {
  struct Partial {
    int checked = 0;
    int violations = 0;
  };
  auto chunks = run_chunked<Partial>(n_instances, 8, threads, [&](long, long begin, long end) {
    Partial part;
    for (long i = begin; i < end; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      auto [problem, agent] = random_instance(rng);
      const int t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(problem.T)));
      const int S = agent.num_states();
      const int L = problem.num_labels;
      std::vector<std::vector<double>> candidates;
      for (int c = 0; c < random_candidates_per_instance; ++c) {
        std::vector<double> q;
        q.reserve(static_cast<std::size_t>(S) * static_cast<std::size_t>(L));
        for (int s = 0; s < S; ++s) {
          std::vector<double> row(static_cast<std::size_t>(L));
          double total = 0.0;
          for (double& v : row) {
            v = rng.gamma(1.0);
            total += v;
          }
          for (double v : row) q.push_back(v / total);
        }
        candidates.push_back(std::move(q));
      }
      const Lemma3Check check = lemma3_check(problem, agent, t, candidates);
      part.checked += static_cast<int>(check.candidate_values.size());
      if (!check.holds) ++part.violations;
    }
    return part;
  });
  Lemma3SuiteResult result;
  result.instances = n_instances;
  for (const auto& c : chunks) {
    result.candidates_checked += c.checked;
    result.violations += c.violations;
  }
  result.holds_all = result.violations == 0;
  return result;
}

}  // namespace jointpred
