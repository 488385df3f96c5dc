#pragma once

#include <string>
#include <vector>

#include "henon/kernel.hpp"
#include "henon/problem.hpp"
#include "henon/solver.hpp"

namespace henon {

struct RunConfig {
  ProblemSpec spec;  // spec.form comes from [solver] mode
  int M = 256;
  double grading = 2.0;
  SolverOptions solver;

  std::vector<double> stability_s = {0.5, 0.7, 0.9, 0.99};
  std::vector<double> scaling_lambdas = {1, 2, 4, 8};
  std::string scaling_profile = "parabola";  // parabola | ground_state
  std::vector<double> symmetry_alphas = {0, 5, 10, 20, 30, 40, 50};
  double symmetry_tol = 1e-3;
  double stampacchia_r = 2.0;
  double stampacchia_delta = 0.0;  // <= 0 selects the automatic delta
  int stampacchia_K = 20;

  std::string out_dir = "henon_out";
  bool write_trace = true;
  bool deterministic = false;
  int threads = 0;  // 0 keeps the OpenMP default
  bool override_critical = false;

  // canonical "key = value" echo of every setting, in schema order
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// INI text with sections [problem] [mesh] [solver] [stability] [scaling] [symmetry]
// [stampacchia] [output] [run]; unknown sections or keys raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// sha256 of the canonical problem description, truncated to 16 hex digits
std::string spec_hash(const ProblemSpec& spec);

}  // namespace henon
