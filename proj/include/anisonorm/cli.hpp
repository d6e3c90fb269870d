#pragma once

#include "anisonorm/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace anisonorm {

struct RunContext {
  int threads = 1;
  std::ostream* log = nullptr;  // progress and tables; null for silent runs
};

// Worker count: explicit value if positive, else ANISONORM_THREADS, else hardware concurrency.
int resolve_threads(int requested);

// Each command writes its files under cfg.out_dir and returns their paths.
std::vector<std::string> cmd_exponents(const ExperimentConfig& cfg, const RunContext& ctx);
std::vector<std::string> cmd_apply(const ExperimentConfig& cfg, const std::string& input, const std::string& output,
                                   const RunContext& ctx);
std::vector<std::string> cmd_scan(const ExperimentConfig& cfg, const RunContext& ctx);
std::vector<std::string> cmd_transfer(const ExperimentConfig& cfg, const RunContext& ctx);
// Runs the invariant suite on the configured family; throws NonFiniteResult naming the
// first failing invariant.
std::vector<std::string> cmd_verify(const ExperimentConfig& cfg, const RunContext& ctx);

// Full command line; returns 0 on success, otherwise exit_code() of the error.
int run_cli(int argc, const char* const* argv);

}  // namespace anisonorm
