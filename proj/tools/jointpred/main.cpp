#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

std::string resolve_output_dir(const std::string& flag_dir, const std::string& config_dir) {
  if (!flag_dir.empty()) return flag_dir;
  if (const char* env = std::getenv("JOINTPRED_OUTPUT_DIR"); env && *env) return env;
  if (!config_dir.empty()) return config_dir;
  return ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jointpred - joint-predictive-distribution metrics and bandit experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir_flag;
  int threads = 0;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;

  CLI::App* run = app.add_subcommand("run", "run an experiment config and write result files");
  run->add_option("config", config_path, "path to a JSON experiment config")->required();
  run->add_option("--threads", threads, "cap on worker threads (0 = hardware)");
  run->add_option("--output-dir", output_dir_flag, "directory for result files");
  run->add_option("--seed", seed_flag, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });

  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", config_path, "path to a JSON experiment config")->required();

  CLI::App* list = app.add_subcommand("list", "list experiment kinds and their config schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::cout << jpcli::schema_help();
      return kExitOk;
    }
    const jpcli::ExperimentConfig config = jpcli::parse_config_file(config_path);
    if (validate->parsed()) {
      std::cout << "OK: " << config_path << " (experiment=" << config.experiment << ")\n";
      return kExitOk;
    }

    jpcli::RunOptions options;
    options.threads = threads;
    options.seed = seed_given ? seed_flag : config.seed;
    options.output_dir = resolve_output_dir(output_dir_flag, config.output_dir);

    const std::vector<std::string> files = jpcli::run_experiment(config, options);
    for (const auto& f : files) std::cerr << "wrote " << f << "\n";
    return kExitOk;
  } catch (const jpcli::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}
