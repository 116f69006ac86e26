#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace jpcli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config error at " + (path.empty() ? "/" : path) + ": " + message);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) fail(path + "/" + key, "unknown key");
  }
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "/" + key, "required key missing");
  return obj.at(key);
}

std::string require_string(const json& obj, const std::string& path, const std::string& key,
                           const std::set<std::string>& allowed = {}) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) fail(path + "/" + key, "must be a string");
  const std::string s = v.get<std::string>();
  if (!allowed.empty() && !allowed.count(s)) {
    std::ostringstream oss;
    oss << "must be one of {";
    bool first = true;
    for (const auto& a : allowed) {
      oss << (first ? "" : ", ") << a;
      first = false;
    }
    oss << "}";
    fail(path + "/" + key, oss.str());
  }
  return s;
}

double number_in(const json& v, const std::string& where, double lo, double hi,
                 bool lo_open = false, bool hi_open = false) {
  if (!v.is_number()) fail(where, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < lo || x > hi || (lo_open && x == lo) || (hi_open && x == hi)) {
    std::ostringstream oss;
    oss << "must lie in " << (lo_open ? "(" : "[") << lo << ", " << hi
        << (hi_open ? ")" : "]");
    fail(where, oss.str());
  }
  return x;
}

long integer_at_least(const json& obj, const std::string& path, const std::string& key,
                      long lo, long hi = std::numeric_limits<long>::max()) {
  const json& v = require(obj, path, key);
  if (!v.is_number_integer()) fail(path + "/" + key, "must be an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) {
    std::ostringstream oss;
    oss << "must be an integer in [" << lo << ", " << hi << "]";
    fail(path + "/" + key, oss.str());
  }
  return x;
}

long optional_integer(const json& obj, const std::string& path, const std::string& key,
                      long fallback, long lo, long hi = std::numeric_limits<long>::max()) {
  if (!obj.contains(key)) return fallback;
  return integer_at_least(obj, path, key, lo, hi);
}

jointpred::EnvModel parse_env(const json& obj, const std::string& path, BanditBlock& block) {
  if (!obj.is_object()) fail(path, "must be an object");
  const std::string kind = require_string(obj, path, "kind",
                                          {"independent_beta", "finite_hypothesis",
                                           "informative_arm"});
  block.env_kind = kind;
  if (kind == "independent_beta") {
    check_keys(obj, path, {"kind", "K", "alpha", "beta"});
    const long K = integer_at_least(obj, path, "K", 2, 64);
    const double alpha = number_in(require(obj, path, "alpha"), path + "/alpha", 0.0, 1e6, true);
    const double beta = number_in(require(obj, path, "beta"), path + "/beta", 0.0, 1e6, true);
    std::vector<jointpred::BetaParams> priors(static_cast<std::size_t>(K),
                                              jointpred::BetaParams(alpha, beta));
    return jointpred::EnvModel::independent_beta(std::move(priors));
  }
  if (kind == "informative_arm") {
    check_keys(obj, path, {"kind", "K", "delta"});
    const long K = integer_at_least(obj, path, "K", 2, 64);
    const double delta =
        number_in(require(obj, path, "delta"), path + "/delta", 0.0, 0.5, false, true);
    block.env_delta = delta;
    return jointpred::informative_arm_env(static_cast<int>(K), delta);
  }
  check_keys(obj, path, {"kind", "hypotheses"});
  const json& hyps = require(obj, path, "hypotheses");
  if (!hyps.is_array() || hyps.empty()) fail(path + "/hypotheses", "must be a non-empty array");
  std::vector<jointpred::Hypothesis> parsed;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const std::string hpath = path + "/hypotheses/" + std::to_string(i);
    const json& h = hyps.at(i);
    if (!h.is_object()) fail(hpath, "must be an object");
    check_keys(h, hpath, {"weight", "p"});
    jointpred::Hypothesis hyp;
    hyp.weight = number_in(require(h, hpath, "weight"), hpath + "/weight", 0.0, 1.0);
    const json& p = require(h, hpath, "p");
    if (!p.is_array() || p.empty()) fail(hpath + "/p", "must be a non-empty array");
    for (std::size_t k = 0; k < p.size(); ++k) {
      hyp.p.push_back(number_in(p.at(k), hpath + "/p/" + std::to_string(k), 0.0, 1.0));
    }
    parsed.push_back(std::move(hyp));
  }
  try {
    return jointpred::EnvModel::finite_hypothesis(std::move(parsed));
  } catch (const std::exception& e) {
    fail(path + "/hypotheses", e.what());
  }
}

BanditBlock parse_bandit(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "must be an object");
  check_keys(obj, path,
             {"env", "policy", "agent", "variant", "T", "tau", "replications",
              "ensemble_size", "resample_threshold", "write_trace"});
  BanditBlock block;
  block.env = parse_env(require(obj, path, "env"), path + "/env", block);

  block.policy_name = require_string(obj, path, "policy",
                                     {"approx_ts", "exact_ts", "greedy_marginal",
                                      "uniform_random"});
  if (block.policy_name == "approx_ts") block.policy = jointpred::BanditPolicy::approx_ts;
  if (block.policy_name == "exact_ts") block.policy = jointpred::BanditPolicy::exact_ts;
  if (block.policy_name == "greedy_marginal") {
    block.policy = jointpred::BanditPolicy::greedy_marginal;
  }
  if (block.policy_name == "uniform_random") {
    block.policy = jointpred::BanditPolicy::uniform_random;
  }

  if (obj.contains("agent")) {
    block.agent_name = require_string(obj, path, "agent",
                                      {"exact_posterior", "marginal_product", "ensemble",
                                       "static_prior"});
    if (block.agent_name == "exact_posterior") block.agent = jointpred::AgentKind::exact_posterior;
    if (block.agent_name == "marginal_product") {
      block.agent = jointpred::AgentKind::marginal_product;
    }
    if (block.agent_name == "ensemble") block.agent = jointpred::AgentKind::ensemble;
    if (block.agent_name == "static_prior") block.agent = jointpred::AgentKind::static_prior;
  }
  if (obj.contains("variant")) {
    block.variant_name = require_string(obj, path, "variant",
                                        {"posterior_sample", "sample_mean"});
    block.variant = block.variant_name == "sample_mean" ? jointpred::TsVariant::sample_mean
                                                        : jointpred::TsVariant::posterior_sample;
  }
  if (block.policy == jointpred::BanditPolicy::exact_ts &&
      block.agent != jointpred::AgentKind::exact_posterior) {
    fail(path + "/agent", "exact_ts requires the exact_posterior agent");
  }

  block.T = static_cast<int>(integer_at_least(obj, path, "T", 1, 1000000));
  block.tau = static_cast<int>(integer_at_least(obj, path, "tau", 1, 1 << 20));
  block.replications = integer_at_least(obj, path, "replications", 1, 100000000);
  block.ensemble_size =
      static_cast<int>(optional_integer(obj, path, "ensemble_size", 30, 1, 100000));
  if (obj.contains("resample_threshold")) {
    block.resample_threshold = number_in(obj.at("resample_threshold"),
                                         path + "/resample_threshold", 0.0, 1.0, true);
  }
  if (obj.contains("write_trace")) {
    if (!obj.at("write_trace").is_boolean()) fail(path + "/write_trace", "must be a boolean");
    block.write_trace = obj.at("write_trace").get<bool>();
  }
  return block;
}

MetricsBlock parse_metrics(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "must be an object");
  check_keys(obj, path, {"scenario", "tau_list", "mc_samples", "prop1_instances"});
  MetricsBlock block;
  if (obj.contains("scenario")) {
    block.scenario = require_string(obj, path, "scenario", {"coin"});
  }
  if (obj.contains("tau_list")) {
    const json& list = obj.at("tau_list");
    if (!list.is_array() || list.empty()) fail(path + "/tau_list", "must be a non-empty array");
    block.tau_list.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& v = list.at(i);
      const std::string vpath = path + "/tau_list/" + std::to_string(i);
      if (!v.is_number_integer()) fail(vpath, "must be an integer");
      const long tau = v.get<long>();
      if (tau < 1 || tau > 20) fail(vpath, "must be an integer in [1, 20]");
      block.tau_list.push_back(static_cast<int>(tau));
    }
  }
  block.mc_samples = optional_integer(obj, path, "mc_samples", block.mc_samples, 100, 100000000);
  block.prop1_instances = static_cast<int>(
      optional_integer(obj, path, "prop1_instances", block.prop1_instances, 0, 1000000));
  return block;
}

RecommenderBlock parse_recommender(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "must be an object");
  check_keys(obj, path, {"instance", "movies", "user_types", "k_select"});
  RecommenderBlock block;
  const std::string name = obj.contains("instance")
                               ? require_string(obj, path, "instance", {"table1", "custom"})
                               : "table1";
  block.instance_name = name;
  if (name == "table1") {
    block.instance = jointpred::table1_instance();
    return block;
  }
  jointpred::RecommenderInstance inst;
  const json& movies = require(obj, path, "movies");
  if (!movies.is_array() || movies.empty()) fail(path + "/movies", "must be a non-empty array");
  for (std::size_t i = 0; i < movies.size(); ++i) {
    const json& m = movies.at(i);
    const std::string mpath = path + "/movies/" + std::to_string(i);
    if (!m.is_array() || m.empty()) fail(mpath, "must be a non-empty array of numbers");
    std::vector<double> x;
    for (std::size_t d = 0; d < m.size(); ++d) {
      x.push_back(number_in(m.at(d), mpath + "/" + std::to_string(d), -1e6, 1e6));
    }
    inst.movies.push_back(std::move(x));
  }
  const json& types = require(obj, path, "user_types");
  if (!types.is_array() || types.empty()) fail(path + "/user_types", "must be a non-empty array");
  for (std::size_t i = 0; i < types.size(); ++i) {
    const json& t = types.at(i);
    const std::string tpath = path + "/user_types/" + std::to_string(i);
    if (!t.is_object()) fail(tpath, "must be an object");
    check_keys(t, tpath, {"weight", "phi"});
    jointpred::UserType type;
    type.weight = number_in(require(t, tpath, "weight"), tpath + "/weight", 0.0, 1.0);
    const json& phi = require(t, tpath, "phi");
    if (!phi.is_array() || phi.empty()) fail(tpath + "/phi", "must be a non-empty array");
    for (std::size_t d = 0; d < phi.size(); ++d) {
      type.phi.push_back(number_in(phi.at(d), tpath + "/phi/" + std::to_string(d), -1e6, 1e6));
    }
    inst.user_types.push_back(std::move(type));
  }
  inst.k_select = static_cast<int>(optional_integer(obj, path, "k_select", 2, 1,
                                                    static_cast<long>(inst.movies.size())));
  if (inst.movies.size() > 16) fail(path + "/movies", "at most 16 movies are supported");
  block.instance = std::move(inst);
  return block;
}

SeqpredBlock parse_seqpred(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "must be an object");
  check_keys(obj, path, {"instance", "T", "count", "lemma3_candidates", "suite_seed"});
  SeqpredBlock block;
  block.instance = require_string(obj, path, "instance",
                                  {"coin_perfect_memory", "coin_amnesiac", "random_suite"});
  const long t_max = block.instance == "coin_perfect_memory" ? 3 : 10;
  block.T = static_cast<int>(optional_integer(obj, path, "T", std::min<long>(3, t_max), 1, t_max));
  block.count = static_cast<int>(optional_integer(obj, path, "count", 50, 1, 100000));
  block.lemma3_candidates =
      static_cast<int>(optional_integer(obj, path, "lemma3_candidates", 4, 1, 64));
  if (obj.contains("suite_seed")) {
    block.suite_seed =
        static_cast<std::uint64_t>(integer_at_least(obj, path, "suite_seed", 0));
    block.suite_seed_given = true;
  }
  return block;
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ConfigError("config error: parse failure at line " + std::to_string(line) + ": " +
                      e.what());
  }
  if (!root.is_object()) fail("", "top level must be an object");
  check_keys(root, "", {"experiment", "seed", "output", "bandit", "metrics", "recommender",
                        "seqpred"});

  ExperimentConfig config;
  config.experiment = require_string(root, "", "experiment",
                                     {"bandit", "metrics", "recommender", "seqpred"});
  config.seed = static_cast<std::uint64_t>(integer_at_least(root, "", "seed", 0));

  if (root.contains("output")) {
    const json& out = root.at("output");
    if (!out.is_object()) fail("/output", "must be an object");
    check_keys(out, "/output", {"dir"});
    if (out.contains("dir")) {
      if (!out.at("dir").is_string()) fail("/output/dir", "must be a string");
      config.output_dir = out.at("dir").get<std::string>();
    }
  }

  for (const char* kind : {"bandit", "metrics", "recommender", "seqpred"}) {
    if (root.contains(kind) && config.experiment != kind) {
      fail(std::string("/") + kind, "block does not match experiment '" + config.experiment + "'");
    }
  }
  const std::string block_path = "/" + config.experiment;
  if (!root.contains(config.experiment)) {
    fail(block_path, "required experiment block missing");
  }
  if (config.experiment == "bandit") {
    config.bandit = parse_bandit(root.at("bandit"), block_path);
  } else if (config.experiment == "metrics") {
    config.metrics = parse_metrics(root.at("metrics"), block_path);
  } else if (config.experiment == "recommender") {
    config.recommender = parse_recommender(root.at("recommender"), block_path);
  } else {
    config.seqpred = parse_seqpred(root.at("seqpred"), block_path);
    if (!config.seqpred->suite_seed_given) config.seqpred->suite_seed = config.seed;
  }
  return config;
}

std::string schema_help() {
  return R"(Experiment kinds and config schema (JSON; unknown keys are rejected)

Common top-level keys:
  experiment   one of "bandit" | "metrics" | "recommender" | "seqpred"  (required)
  seed         integer >= 0, master seed                                 (required)
  output       optional {"dir": "<path>"}; overridden by --output-dir or
               the JOINTPRED_OUTPUT_DIR environment variable
  <kind>       block named after the experiment (required, see below)

bandit block -> writes summary.json (+ trace.csv when write_trace):
  env           {"kind":"independent_beta","K":int>=2,"alpha":>0,"beta":>0}
                | {"kind":"informative_arm","K":int>=2,"delta":[0,0.5)}
                | {"kind":"finite_hypothesis","hypotheses":[{"weight":w,"p":[..]},..]}
  policy        "approx_ts" | "exact_ts" | "greedy_marginal" | "uniform_random"
  agent         "exact_posterior" (default) | "marginal_product" | "ensemble"
                | "static_prior"
  variant       "posterior_sample" (default) | "sample_mean"
  T             integer >= 1, horizon
  tau           integer >= 1, imagined-outcome horizon
  replications  integer >= 1
  ensemble_size        integer >= 1 (default 30)
  resample_threshold   effective-sample-size fraction in (0,1] (default 0.5)
  write_trace   boolean (default false)

metrics block -> writes metrics.json:
  scenario         "coin" (default)
  tau_list         array of integers in [1,20] (default [1,2,3])
  mc_samples       integer >= 100 (default 100000)
  prop1_instances  integer >= 0 (default 500), randomized decision problems

recommender block -> writes summary.json:
  instance     "table1" (default) | "custom"
  movies       (custom) array of feature vectors
  user_types   (custom) array of {"weight": w, "phi": [..]}
  k_select     (custom) selection size (default 2)

seqpred block -> writes seqpred.json:
  instance           "coin_perfect_memory" | "coin_amnesiac" | "random_suite"
  T                  horizon (coin instances; <= 3 for perfect memory)
  count              random_suite instance count (default 50)
  lemma3_candidates  random candidate predictors per instance (default 4)
  suite_seed         seed for the randomized suites (default: experiment seed)
)";
}

}  // namespace jpcli
