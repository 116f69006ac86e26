// Acceptance suite: one checked criterion per run line, with wall-clock
// budgets enforced where stated. Exit code 0 iff every selected criterion
// passes. Usage: acceptance [criterion-number ...]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "jointpred/bandit.hpp"
#include "jointpred/envs.hpp"
#include "jointpred/info.hpp"
#include "jointpred/metrics.hpp"
#include "jointpred/seqpred.hpp"

namespace {

namespace fs = std::filesystem;
using namespace jointpred;

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

struct Failure {
  std::string detail;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---- 1. Coin example -------------------------------------------------------

CriterionResult coin_example() {
  for (int tau = 1; tau <= 6; ++tau) {
    const FinitePmf a1 = coin_agent1_joint(tau);
    const FinitePmf a2 = coin_agent2_joint(tau);
    double a1_zero = 0.0, a2_zero = 0.0;
    for (std::size_t idx = 0; idx < a1.size(); ++idx) {
      if ((idx & 1u) == 0) {
        a1_zero += a1.prob(idx);
        a2_zero += a2.prob(idx);
      }
    }
    require(std::abs(a1_zero - 1.0 / 3.0) <= 1e-12, "agent-1 marginal off at tau=" + fmt(tau));
    require(std::abs(a2_zero - 1.0 / 3.0) <= 1e-12, "agent-2 marginal off at tau=" + fmt(tau));
    require(std::abs(a1.prob(0) - std::pow(1.0 / 3.0, tau)) <= 1e-12,
            "agent-1 all-zeros off at tau=" + fmt(tau));
    require(std::abs(a2.prob(0) - 1.0 / 3.0) <= 1e-12, "agent-2 all-zeros off at tau=" + fmt(tau));
  }
  return {true, "marginals 1/3 and all-zeros 1/3^tau vs 1/3 for tau in 1..6"};
}

// ---- 2. Table 1 -------------------------------------------------------------

CriterionResult table1() {
  const RecommenderInstance inst = table1_instance();
  const double expected[2][4] = {{1.0, 0.0, 0.73, 0.5}, {0.0, 1.0, 0.5, 0.73}};
  for (int t = 0; t < 2; ++t) {
    for (int m = 0; m < 4; ++m) {
      require(std::abs(enjoy_prob(inst, t, m) - expected[t][m]) < 0.005,
              "logistic entry (" + fmt(t) + "," + fmt(m) + ") off at 2 decimals");
    }
  }
  const PairSelection sel = marginal_vs_joint_pair(inst);
  require(sel.marginal_set == std::vector<int>{2, 3}, "marginal pair is not (X3, X4)");
  require(sel.joint_set == std::vector<int>{0, 1}, "joint pair is not (X1, X2)");
  const double miss = 1.0 - recommender_success_prob(inst, sel.marginal_set);
  require(std::abs(miss - 0.1345) <= 0.0005, "miss probability " + fmt(miss));
  require(miss > 0.10, "miss probability not > 10%");
  return {true, "8 entries at 2 decimals; pairs (X3,X4)/(X1,X2); miss " + fmt(miss)};
}

// ---- 3. Proposition 1 certificate -------------------------------------------

CriterionResult proposition1() {
  const UniversalitySuiteResult r = run_universality_suite(500, 0x9E3779B9);
  require(r.violations == 0 && r.holds_all,
          fmt(r.violations) + " violations out of " + fmt(r.instances));
  return {true, "500/500 hold; max gap-bound margin " + fmt(r.max_gap_minus_bound)};
}

// ---- 4. Theorem 1 ------------------------------------------------------------

CriterionResult theorem1() {
  const Theorem1SuiteResult suite = run_theorem1_suite(200, 0x7E57, 0);
  require(suite.violations == 0, fmt(suite.violations) + " theorem-1 violations");
  require(suite.data_processing_violations == 0,
          fmt(suite.data_processing_violations) + " data-processing violations");

  const SeqPredProblem coin = coin_seqpred_problem(3);
  const IncrementalAgent amnesiac = amnesiac_agent(coin);
  const IncrementalAgent memory = perfect_memory_agent(coin);
  int extra = 0;
  for (int t = 0; t < coin.T; ++t) {
    const Theorem1Record ra = verify_theorem1(coin, amnesiac, t);
    require(ra.holds, "amnesiac coin instance fails at t=" + fmt(t));
    require(ra.info_data >= ra.info_theta - 1e-9, "amnesiac data-processing fails");
    const Theorem1Record rm = verify_theorem1(coin, memory, t);
    require(rm.holds && rm.epsilon <= 1e-9, "perfect-memory coin instance fails at t=" + fmt(t));
    extra += 2;
  }
  return {true, fmt(suite.records) + " randomized records + " + fmt(extra) +
                    " coin records all hold within 1e-9"};
}

// ---- 5. Lemma 3 --------------------------------------------------------------

CriterionResult lemma3() {
  const Lemma3SuiteResult r = run_lemma3_suite(100, 4, 0x1E77A3, 0);
  require(r.violations == 0 && r.holds_all, fmt(r.violations) + " violations");
  return {true, fmt(r.candidates_checked) + " candidate predictors across 100 instances hold"};
}

// ---- 6. Theorem 2 empirical bound --------------------------------------------

CriterionResult theorem2_grid() {
  double worst_margin = -1e300;
  std::string worst_cell;
  for (int K : {2, 5, 10}) {
    for (int T : {200, 1000}) {
      for (int tau : {16, 128}) {
        BanditRunConfig cfg;
        cfg.env = EnvModel::independent_beta(
            std::vector<BetaParams>(static_cast<std::size_t>(K), BetaParams(1, 1)));
        cfg.policy = BanditPolicy::approx_ts;
        cfg.agent_kind = AgentKind::exact_posterior;
        cfg.variant = TsVariant::posterior_sample;
        cfg.T = T;
        cfg.tau = tau;
        cfg.replications = 10000;
        cfg.master_seed = 0xABCD0000u + static_cast<unsigned>(K * 10000 + T + tau);
        cfg.threads = 0;
        const BanditRunResult result = run_bandit(cfg);
        const double mean = result.mean_cum_regret.back();
        const double se = result.se_cum_regret.back();
        const double bound = theorem2_bound(K, T, tau, 0.0);
        const double margin = mean - (bound + 5.0 * se);
        if (margin > worst_margin) {
          worst_margin = margin;
          worst_cell = "K=" + fmt(K) + ",T=" + fmt(T) + ",tau=" + fmt(tau) + ": regret " +
                       fmt(mean) + " vs bound " + fmt(bound);
        }
        require(mean <= bound + 5.0 * se,
                "bound violated at K=" + fmt(K) + ",T=" + fmt(T) + ",tau=" + fmt(tau) +
                    ": " + fmt(mean) + " > " + fmt(bound) + " + 5se");
      }
    }
  }
  return {true, "12/12 cells hold; tightest " + worst_cell};
}

// ---- 7. Marginal-vs-joint separation -----------------------------------------

CriterionResult separation() {
  std::vector<double> ks, greedy_means;
  for (int K : {4, 8, 16}) {
    BanditRunConfig cfg;
    cfg.env = informative_arm_env(K, 1e-6);
    cfg.policy = BanditPolicy::greedy_marginal;
    cfg.agent_kind = AgentKind::marginal_product;
    cfg.T = 8 * K;
    cfg.replications = 10000;
    cfg.master_seed = 0x5E9A0000u + static_cast<unsigned>(K);
    const BanditRunResult result = run_bandit(cfg);
    const MonteCarloEstimate t_id = time_to_identify(result);
    ks.push_back(static_cast<double>(K));
    greedy_means.push_back(t_id.mean);

    BanditRunConfig ts = cfg;
    ts.policy = BanditPolicy::exact_ts;
    ts.agent_kind = AgentKind::exact_posterior;
    ts.T = 64;
    ts.master_seed += 1000;
    const MonteCarloEstimate ts_id = time_to_identify(run_bandit(ts));
    require(ts_id.mean <= 3.0,
            "exact TS needs " + fmt(ts_id.mean) + " pulls at K=" + fmt(K));
  }

  // Least-squares line through the greedy identification times.
  const double n = static_cast<double>(ks.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sx += ks[i];
    sy += greedy_means[i];
    sxx += ks[i] * ks[i];
    sxy += ks[i] * greedy_means[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double fit = intercept + slope * ks[i];
    ss_res += (greedy_means[i] - fit) * (greedy_means[i] - fit);
    ss_tot += (greedy_means[i] - sy / n) * (greedy_means[i] - sy / n);
  }
  const double r2 = 1.0 - ss_res / ss_tot;
  require(slope > 0.0, "greedy slope not positive: " + fmt(slope));
  require(r2 >= 0.9, "greedy linear fit R^2 = " + fmt(r2));
  return {true, "greedy time-to-identify " + fmt(greedy_means[0]) + "/" + fmt(greedy_means[1]) +
                    "/" + fmt(greedy_means[2]) + " for K=4/8/16 (slope " + fmt(slope) +
                    ", R^2 " + fmt(r2) + "); exact TS <= 3 pulls at every K"};
}

// ---- 8. Target suboptimality -------------------------------------------------

CriterionResult target_subopt() {
  double worst_margin = -1e300;
  std::string worst_cell;
  for (int K : {2, 5, 10}) {
    for (int tau : {4, 16, 64, 256}) {
      EnvModel env = EnvModel::independent_beta(
          std::vector<BetaParams>(static_cast<std::size_t>(K), BetaParams(1, 1)));
      const MonteCarloEstimate est =
          target_suboptimality(env, tau, 10000, RngStream(0xF00D, K * 1000 + tau), 0);
      const double bound = K / std::sqrt(2.0 * tau);
      require(est.mean <= bound + 5.0 * est.std_error,
              "K=" + fmt(K) + ",tau=" + fmt(tau) + ": " + fmt(est.mean) + " > " + fmt(bound));
      const double margin = est.mean - bound;
      if (margin > worst_margin) {
        worst_margin = margin;
        worst_cell = "K=" + fmt(K) + ",tau=" + fmt(tau);
      }
    }
  }
  return {true, "12/12 cells satisfy E[p_best - p_target] <= K/sqrt(2 tau) + 5se; tightest " +
                    worst_cell + " (margin " + fmt(worst_margin) + ")"};
}

// ---- 9. Exact vs approximate TS ----------------------------------------------

CriterionResult exact_vs_approx() {
  BanditRunConfig approx;
  approx.env = EnvModel::independent_beta({BetaParams(1, 1), BetaParams(1, 1)});
  approx.policy = BanditPolicy::approx_ts;
  approx.agent_kind = AgentKind::exact_posterior;
  approx.T = 500;
  approx.tau = 128;
  approx.replications = 10000;
  approx.master_seed = 0xC0FFEE;
  const BanditRunResult ra = run_bandit(approx);

  BanditRunConfig exact = approx;
  exact.policy = BanditPolicy::exact_ts;
  const BanditRunResult re = run_bandit(exact);

  const double diff = ra.mean_cum_regret.back() - re.mean_cum_regret.back();
  const double se = std::sqrt(ra.se_cum_regret.back() * ra.se_cum_regret.back() +
                              re.se_cum_regret.back() * re.se_cum_regret.back());
  require(std::abs(diff) <= 3.0 * se,
          "regret difference " + fmt(diff) + " exceeds 3 se = " + fmt(3 * se));
  return {true, "approx " + fmt(ra.mean_cum_regret.back()) + " vs exact " +
                    fmt(re.mean_cum_regret.back()) + "; diff " + fmt(diff) + " within 3 se " +
                    fmt(3 * se)};
}

// ---- 10. Determinism across thread counts -------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot read " + path.string());
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

CriterionResult determinism() {
  const fs::path cli = JOINTPRED_CLI_PATH;
  const fs::path config_dir = JOINTPRED_CONFIG_DIR;
  require(fs::exists(cli), "CLI binary not built");

  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(config_dir)) {
    if (entry.path().extension() == ".json") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  require(!configs.empty(), "no shipped configs found");

  int files_compared = 0;
  for (const auto& config : configs) {
    const fs::path base = fs::temp_directory_path() / "jointpred_acceptance_10";
    const fs::path dir_a = base / (config.stem().string() + "_a");
    const fs::path dir_b = base / (config.stem().string() + "_b");
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    for (const auto& [dir, threads] : {std::pair{dir_a, 1}, std::pair{dir_b, 4}}) {
      const std::string cmd = cli.string() + " run " + config.string() + " --threads " +
                              std::to_string(threads) + " --output-dir " + dir.string() +
                              " 2>/dev/null";
      const int status = std::system(cmd.c_str());
      require(WIFEXITED(status) && WEXITSTATUS(status) == 0,
              "run failed for " + config.filename().string());
    }
    for (const auto& produced : fs::directory_iterator(dir_a)) {
      const fs::path twin = dir_b / produced.path().filename();
      require(fs::exists(twin), "missing twin file " + twin.string());
      require(slurp(produced.path()) == slurp(twin),
              "files differ for " + config.filename().string() + ": " +
                  produced.path().filename().string());
      ++files_compared;
    }
  }
  return {true, fmt(files_compared) + " result files byte-identical across --threads 1 vs 4 (" +
                    fmt(static_cast<double>(configs.size())) + " configs)"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 = no stated budget
  std::function<CriterionResult()> fn;
};

const std::vector<Criterion>& all_criteria() {
  static const std::vector<Criterion> criteria = {
      {1, "coin-example", 1.0, coin_example},
      {2, "table1-reproduction", 1.0, table1},
      {3, "proposition1-certificate", 10.0, proposition1},
      {4, "theorem1-verification", 60.0, theorem1},
      {5, "lemma3-verification", 30.0, lemma3},
      {6, "theorem2-empirical-bound", 300.0, theorem2_grid},
      {7, "marginal-joint-separation", 120.0, separation},
      {8, "target-suboptimality", 60.0, target_subopt},
      {9, "exact-vs-approx-ts", 0.0, exact_vs_approx},
      {10, "determinism-across-threads", 0.0, determinism},
  };
  return criteria;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  bool all_pass = true;
  for (const auto& criterion : all_criteria()) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = criterion.fn();
    } catch (const Failure& f) {
      result = {false, f.detail};
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.budget_seconds > 0.0 && seconds > criterion.budget_seconds) {
      result.pass = false;
      result.detail += " [over budget]";
    }
    all_pass = all_pass && result.pass;
    std::printf("[%s] criterion %02d %s (%.2f s%s): %s\n", result.pass ? "PASS" : "FAIL",
                criterion.id, criterion.name, seconds,
                criterion.budget_seconds > 0.0
                    ? (", budget " + fmt(criterion.budget_seconds) + " s").c_str()
                    : "",
                result.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
