#pragma once

#include <string>
#include <vector>

#include "henon/config.hpp"

namespace henon {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0;      // measured discrepancy
  double tolerance = 0;  // pass threshold
};

// Invariant self-test suite run by `henon check`: finite-difference gradients, an adaptive
// double-integral oracle for the nonlocal energy, homogeneity, R-invariance, dominated inequality.
std::vector<CheckResult> run_self_checks(const RunConfig& cfg);

// int int |u(r) - u(rho)|^p k (r rho)^{n-1} + 2 int |u|^p T r^{n-1}, scaled like KernelTable::energy,
// by nested adaptive quadrature split at the mesh nodes and the diagonal
double gagliardo_oracle(const DiscreteField& u, const ProblemSpec& spec, double multiplier, double tol = 1e-7);

}  // namespace henon
