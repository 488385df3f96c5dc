#pragma once

#include <iosfwd>
#include <string>

#include "henon/config.hpp"

namespace henon {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // self-checks failed or an unexpected error
  kExitConfig = 2,
  kExitRegime = 3,
  kExitNotConverged = 4,
  kExitIo = 5,
};

struct CliFlags {
  std::string command;
  std::string config_path;
  std::string out_dir;  // overrides [output] dir when non-empty
  bool override_critical = false;
  bool deterministic = false;
  int threads = -1;
};

// Runs one subcommand: classify, solve, symmetry, stability, scaling, stampacchia, check.
int run(const CliFlags& flags, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace henon
