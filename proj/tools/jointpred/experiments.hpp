#pragma once

#include <string>

#include "config.hpp"

namespace jpcli {

struct RunOptions {
  std::string output_dir;  // resolved: flag > env var > config > "."
  int threads = 0;         // 0 = hardware concurrency
  std::uint64_t seed = 0;  // resolved: flag overrides config
};

// Execute the configured experiment and write its result files into
// options.output_dir. Returns the list of files written.
std::vector<std::string> run_experiment(const ExperimentConfig& config,
                                        const RunOptions& options);

}  // namespace jpcli
