#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jointpred/agents.hpp"
#include "jointpred/bandit.hpp"
#include "jointpred/envs.hpp"

namespace jpcli {

// Configuration problems (parse errors, schema violations, bad ranges).
// The CLI maps these to exit code 2; anything else that throws exits 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BanditBlock {
  jointpred::EnvModel env =
      jointpred::EnvModel::independent_beta({jointpred::BetaParams(1, 1),
                                             jointpred::BetaParams(1, 1)});
  std::string env_kind;
  double env_delta = 0.0;
  jointpred::BanditPolicy policy = jointpred::BanditPolicy::exact_ts;
  std::string policy_name;
  jointpred::AgentKind agent = jointpred::AgentKind::exact_posterior;
  std::string agent_name = "exact_posterior";
  jointpred::TsVariant variant = jointpred::TsVariant::posterior_sample;
  std::string variant_name = "posterior_sample";
  int T = 100;
  int tau = 16;
  long replications = 1000;
  int ensemble_size = 30;
  double resample_threshold = 0.5;
  bool write_trace = false;
};

struct MetricsBlock {
  std::string scenario = "coin";
  std::vector<int> tau_list = {1, 2, 3};
  long mc_samples = 100000;
  int prop1_instances = 500;
};

struct RecommenderBlock {
  jointpred::RecommenderInstance instance;
  std::string instance_name = "table1";
};

struct SeqpredBlock {
  std::string instance = "coin_perfect_memory";
  int T = 3;
  int count = 50;                 // random_suite size
  int lemma3_candidates = 4;
  std::uint64_t suite_seed = 0;   // defaults to the experiment seed
  bool suite_seed_given = false;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output_dir;  // empty when unset
  std::optional<BanditBlock> bandit;
  std::optional<MetricsBlock> metrics;
  std::optional<RecommenderBlock> recommender;
  std::optional<SeqpredBlock> seqpred;
};

// Parse and schema-validate a config file. Unknown keys are rejected;
// violations carry the JSON pointer of the offending field.
ExperimentConfig parse_config_file(const std::string& path);

// Per-experiment schema description for `list`.
std::string schema_help();

}  // namespace jpcli
