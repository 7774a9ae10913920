#pragma once

#include <cstdint>
#include <string>

namespace hetcycle {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitMismatch = 4,
};

struct RunConfig {
  std::string mode;     // simulate | invariants | conjugacy | bowen | historic
  std::string config;   // optional for bowen
  std::string config2;  // conjugacy only
  std::string out = ".";
  int n = 0;            // 0: mode default
  double tol = 0.0;     // 0: mode default
  std::uint64_t seed = 1;
  bool experimental_ac = false;
};

int default_hits(const std::string& mode);
double default_tolerance(const std::string& mode);

/// Checks the mode, counts and paths; creates the output directory.
/// Throws ConfigError.
void check_run_config(const RunConfig& cfg);

/// Executes one mode and writes its files into cfg.out. Library errors
/// propagate as exceptions; the returned code reports pass/fail of checks.
int run(const RunConfig& cfg);

/// Full command-line entry point: argument parsing, logging setup from
/// HETCYCLE_LOG, and the mapping of errors to exit codes.
int main_entry(int argc, char** argv);

}  // namespace hetcycle
