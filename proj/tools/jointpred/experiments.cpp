#include "experiments.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "jointpred/bandit.hpp"
#include "jointpred/metrics.hpp"
#include "jointpred/seqpred.hpp"

namespace jpcli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string output_path(const RunOptions& options, const std::string& name) {
  fs::path dir = options.output_dir.empty() ? fs::path(".") : fs::path(options.output_dir);
  fs::create_directories(dir);
  return (dir / name).string();
}

void write_json_file(const std::string& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << value.dump(2) << '\n';
}

json estimate_json(const jointpred::MonteCarloEstimate& est) {
  json j;
  j["mean"] = est.mean;
  j["std_error"] = est.std_error;
  j["n"] = est.n;
  j["infinite_count"] = est.infinite_count;
  return j;
}

void write_trace_csv(const std::string& path, const jointpred::BanditRunResult& result) {
  std::FILE* out = std::fopen(path.c_str(), "wb");
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  std::fputs("replication,t,action,reward,step_regret,cum_regret\n", out);
  for (const auto& trace : result.traces) {
    for (const auto& step : trace.steps) {
      std::fprintf(out, "%d,%d,%d,%d,%.17g,%.17g\n", trace.replication_id, step.t, step.action,
                   step.reward, step.step_regret, step.cum_regret);
    }
  }
  std::fclose(out);
}

std::vector<std::string> run_bandit_experiment(const ExperimentConfig& config,
                                               const RunOptions& options) {
  const BanditBlock& block = *config.bandit;
  jointpred::BanditRunConfig run;
  run.env = block.env;
  run.policy = block.policy;
  run.agent_kind = block.agent;
  run.variant = block.variant;
  run.T = block.T;
  run.tau = block.tau;
  run.replications = block.replications;
  run.master_seed = options.seed;
  run.threads = options.threads;
  run.collect_traces = block.write_trace;
  run.ensemble.size = block.ensemble_size;
  run.ensemble.resample_ess_fraction = block.resample_threshold;

  std::cerr << "bandit: policy=" << block.policy_name << " agent=" << block.agent_name
            << " K=" << run.env.arms() << " T=" << run.T << " tau=" << run.tau
            << " replications=" << run.replications << "\n";
  const jointpred::BanditRunResult result = jointpred::run_bandit(run);

  const double bound_tau = block.policy == jointpred::BanditPolicy::approx_ts
                               ? static_cast<double>(run.tau)
                               : std::numeric_limits<double>::infinity();
  const double bound = jointpred::theorem2_bound(result.arms, run.T, bound_tau, 0.0);
  const double final_mean = result.mean_cum_regret.back();
  const double final_se = result.se_cum_regret.back();

  json summary;
  summary["experiment"] = "bandit";
  summary["seed"] = options.seed;
  summary["env"] = {{"kind", block.env_kind}, {"K", result.arms}};
  if (block.env_kind == "informative_arm") summary["env"]["delta"] = block.env_delta;
  summary["policy"] = block.policy_name;
  summary["agent"] = block.agent_name;
  summary["variant"] = block.variant_name;
  summary["T"] = run.T;
  summary["tau"] = run.tau;
  summary["replications"] = run.replications;
  summary["mean_cum_regret"] = result.mean_cum_regret;
  summary["se_cum_regret"] = result.se_cum_regret;
  summary["final_cum_regret"] = {{"mean", final_mean}, {"std_error", final_se}};
  summary["theorem2_bound"] = bound;
  summary["bound_satisfied"] = final_mean <= bound + 5.0 * final_se;
  summary["contradiction_count"] = result.contradiction_count;
  const jointpred::MonteCarloEstimate t_id = jointpred::time_to_identify(result);
  summary["time_to_identify"] = {{"mean", t_id.mean}, {"std_error", t_id.std_error}};

  std::vector<std::string> files;
  const std::string summary_path = output_path(options, "summary.json");
  write_json_file(summary_path, summary);
  files.push_back(summary_path);
  if (block.write_trace) {
    const std::string trace_path = output_path(options, "trace.csv");
    write_trace_csv(trace_path, result);
    files.push_back(trace_path);
  }
  return files;
}

std::vector<std::string> run_metrics_experiment(const ExperimentConfig& config,
                                                const RunOptions& options) {
  const MetricsBlock& block = *config.metrics;
  std::cerr << "metrics: scenario=" << block.scenario << " mc_samples=" << block.mc_samples
            << " prop1_instances=" << block.prop1_instances << "\n";

  json out;
  out["experiment"] = "metrics";
  out["scenario"] = block.scenario;
  out["seed"] = options.seed;
  out["per_tau"] = json::array();

  for (std::size_t i = 0; i < block.tau_list.size(); ++i) {
    const int tau = block.tau_list[i];
    const jointpred::FinitePmf posterior = jointpred::coin_agent2_joint(tau);
    const jointpred::FinitePmf agent1 = jointpred::coin_agent1_joint(tau);

    json row;
    row["tau"] = tau;
    row["dkl_agent1"] = jointpred::exact_dkl_tau(posterior, agent1);
    row["dkl_agent2"] = 0.0;
    row["p_all_zeros_agent1"] = agent1.prob(0);
    row["p_all_zeros_agent2"] = posterior.prob(0);
    row["ce_exact_agent1"] = jointpred::exact_cross_entropy_tau(posterior, agent1);
    row["ce_exact_agent2"] = jointpred::exact_cross_entropy_tau(posterior, posterior);

    const jointpred::RngStream rng1(options.seed, 2 * static_cast<std::uint64_t>(i));
    const jointpred::RngStream rng2(options.seed, 2 * static_cast<std::uint64_t>(i) + 1);
    row["ce_mc_agent1"] = estimate_json(jointpred::mc_cross_entropy(
        jointpred::coin_scenario(1, tau), block.mc_samples, rng1, options.threads));
    row["ce_mc_agent2"] = estimate_json(jointpred::mc_cross_entropy(
        jointpred::coin_scenario(2, tau), block.mc_samples, rng2, options.threads));
    out["per_tau"].push_back(std::move(row));
  }

  if (block.prop1_instances > 0) {
    const jointpred::UniversalitySuiteResult suite =
        jointpred::run_universality_suite(block.prop1_instances, options.seed);
    out["proposition1"] = {{"instances", suite.instances},
                           {"violations", suite.violations},
                           {"holds_all", suite.holds_all},
                           {"max_gap_minus_bound", suite.max_gap_minus_bound}};
  }

  const std::string path = output_path(options, "metrics.json");
  write_json_file(path, out);
  return {path};
}

std::vector<std::string> run_recommender_experiment(const ExperimentConfig& config,
                                                    const RunOptions& options) {
  const RecommenderBlock& block = *config.recommender;
  const jointpred::RecommenderInstance& inst = block.instance;
  std::cerr << "recommender: instance=" << block.instance_name << "\n";

  json out;
  out["experiment"] = "recommender";
  out["instance"] = block.instance_name;
  out["seed"] = options.seed;

  json table = json::array();
  for (std::size_t t = 0; t < inst.user_types.size(); ++t) {
    json row = json::array();
    for (std::size_t m = 0; m < inst.movies.size(); ++m) {
      row.push_back(jointpred::enjoy_prob(inst, static_cast<int>(t), static_cast<int>(m)));
    }
    table.push_back(std::move(row));
  }
  out["enjoy_prob"] = std::move(table);

  json means = json::array();
  double type_total = 0.0;
  for (const auto& t : inst.user_types) type_total += t.weight;
  for (std::size_t m = 0; m < inst.movies.size(); ++m) {
    double mean = 0.0;
    for (std::size_t t = 0; t < inst.user_types.size(); ++t) {
      mean += inst.user_types[t].weight / type_total *
              jointpred::enjoy_prob(inst, static_cast<int>(t), static_cast<int>(m));
    }
    means.push_back(mean);
  }
  out["mixture_means"] = std::move(means);

  const jointpred::PairSelection sel = jointpred::marginal_vs_joint_pair(inst);
  auto one_indexed = [](const std::vector<int>& v) {
    json arr = json::array();
    for (int i : v) arr.push_back(i + 1);
    return arr;
  };
  out["marginal_pair"] = one_indexed(sel.marginal_set);
  out["joint_pair"] = one_indexed(sel.joint_set);
  const double marginal_success = jointpred::recommender_success_prob(inst, sel.marginal_set);
  out["success_prob"] = {
      {"marginal_pair", marginal_success},
      {"joint_pair", jointpred::recommender_success_prob(inst, sel.joint_set)}};
  out["miss_prob_marginal_pair"] = 1.0 - marginal_success;

  // Universality certificate over all k-subsets as actions.
  if (inst.movies.size() <= 12 && inst.k_select == 2) {
    const jointpred::FinitePmf posterior = jointpred::recommender_posterior_joint(inst);
    const jointpred::FinitePmf product = jointpred::recommender_marginal_product_joint(inst);
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < static_cast<int>(inst.movies.size()); ++a) {
      for (int b = a + 1; b < static_cast<int>(inst.movies.size()); ++b) {
        pairs.emplace_back(a, b);
      }
    }
    jointpred::DecisionProblem dp;
    dp.num_actions = static_cast<int>(pairs.size());
    dp.reward = [&pairs](int a, std::size_t y) {
      const auto [i, j] = pairs[static_cast<std::size_t>(a)];
      return (((y >> i) & 1u) || ((y >> j) & 1u)) ? 1.0 : 0.0;
    };
    const jointpred::UniversalityGap gap = jointpred::universality_gap(dp, posterior, product);
    out["universality"] = {{"gap", gap.gap},
                           {"bound", gap.bound},
                           {"holds", gap.holds},
                           {"agent_pair", one_indexed({pairs[static_cast<std::size_t>(
                                                           gap.agent_action)].first,
                                                       pairs[static_cast<std::size_t>(
                                                           gap.agent_action)].second})},
                           {"posterior_pair", one_indexed({pairs[static_cast<std::size_t>(
                                                               gap.posterior_action)].first,
                                                           pairs[static_cast<std::size_t>(
                                                               gap.posterior_action)].second})}};
  }

  const std::string path = output_path(options, "summary.json");
  write_json_file(path, out);
  return {path};
}

json theorem1_json(const jointpred::Theorem1Record& rec) {
  return {{"t", rec.t},
          {"epsilon", rec.epsilon},
          {"info_theta", rec.info_theta},
          {"info_data", rec.info_data},
          {"holds", rec.holds}};
}

std::vector<std::string> run_seqpred_experiment(const ExperimentConfig& config,
                                                const RunOptions& options) {
  const SeqpredBlock& block = *config.seqpred;
  std::cerr << "seqpred: instance=" << block.instance << "\n";

  json out;
  out["experiment"] = "seqpred";
  out["instance"] = block.instance;
  out["seed"] = options.seed;

  if (block.instance == "random_suite") {
    out["count"] = block.count;
    out["suite_seed"] = block.suite_seed;
    const jointpred::Theorem1SuiteResult t1 =
        jointpred::run_theorem1_suite(block.count, block.suite_seed, options.threads);
    out["theorem1_suite"] = {{"instances", t1.instances},
                             {"records", t1.records},
                             {"violations", t1.violations},
                             {"data_processing_violations", t1.data_processing_violations},
                             {"holds_all", t1.holds_all}};
    const jointpred::Lemma3SuiteResult l3 = jointpred::run_lemma3_suite(
        block.count, block.lemma3_candidates, block.suite_seed + 1, options.threads);
    out["lemma3_suite"] = {{"instances", l3.instances},
                           {"candidates_checked", l3.candidates_checked},
                           {"violations", l3.violations},
                           {"holds_all", l3.holds_all}};
  } else {
    const jointpred::SeqPredProblem problem = jointpred::coin_seqpred_problem(block.T);
    const jointpred::IncrementalAgent agent = block.instance == "coin_perfect_memory"
                                                  ? jointpred::perfect_memory_agent(problem)
                                                  : jointpred::amnesiac_agent(problem);
    out["T"] = block.T;
    const jointpred::CumulativeKl kl = jointpred::cumulative_kl(problem, agent);
    out["cumulative_kl"] = kl.total;
    out["per_step_kl"] = kl.per_step;
    out["zero_support_events"] = kl.zero_support_events;

    out["theorem1"] = json::array();
    for (int t = 0; t < problem.T; ++t) {
      out["theorem1"].push_back(theorem1_json(jointpred::verify_theorem1(problem, agent, t)));
    }

    // Lemma 3 at mid-horizon: random candidates plus the prior marginal.
    const int t_check = problem.T / 2;
    jointpred::RngStream rng(block.suite_seed, 12345);
    std::vector<std::vector<double>> candidates;
    const int S = agent.num_states();
    for (int c = 0; c < block.lemma3_candidates; ++c) {
      std::vector<double> q;
      for (int s = 0; s < S; ++s) {
        const double p = rng.uniform01();
        q.push_back(1.0 - p);
        q.push_back(p);
      }
      candidates.push_back(std::move(q));
    }
    std::vector<double> prior_rows;
    for (int s = 0; s < S; ++s) {
      prior_rows.push_back(1.0 / 3.0);
      prior_rows.push_back(2.0 / 3.0);
    }
    candidates.push_back(std::move(prior_rows));
    const jointpred::Lemma3Check l3 = jointpred::lemma3_check(problem, agent, t_check, candidates);
    out["lemma3"] = {{"t", t_check},
                     {"base", l3.base},
                     {"candidates", l3.candidate_values.size()},
                     {"holds", l3.holds}};
  }

  const std::string path = output_path(options, "seqpred.json");
  write_json_file(path, out);
  return {path};
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& config,
                                        const RunOptions& options) {
  if (config.experiment == "bandit") return run_bandit_experiment(config, options);
  if (config.experiment == "metrics") return run_metrics_experiment(config, options);
  if (config.experiment == "recommender") return run_recommender_experiment(config, options);
  return run_seqpred_experiment(config, options);
}

}  // namespace jpcli
