#pragma once

#include <optional>
#include <string>
#include <vector>

#include "henon/kernel.hpp"
#include "henon/problem.hpp"
#include "henon/solver.hpp"

namespace henon {

struct SymmetryReport {
  double alpha = 0;
  double R = 0;
  double Z_additive = 0;  // ||grad u||^2 + beta [u]^2
  double hardy = 0;       // int u^2 / |x|^2
  double lhs = 0;         // (q - 2 - beta) Z_additive
  double rhs = 0;         // (1 + beta)(n - 1) hardy
  double gap = 0;         // rhs - lhs
  bool radial_stable = false;
  int S_n_infimum = 0;  // first nonzero eigenvalue of the sphere Laplacian, n - 1
  // scale-free decay diagnostics: hardy / Z and int_{B_{1/2}} |grad u|^2 / Z
  double hardy_ratio = 0;
  double inner_fraction = 0;
};

// Requires p = 2, n >= 3, additive form and q > 2 + beta.
SymmetryReport second_variation_gap(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt);
SymmetryReport second_variation_gap(const GroundState& gs, const ProblemSpec& spec, const KernelTable* kt);

struct AlphaSweep {
  std::vector<SymmetryReport> points;  // grid points, increasing alpha
  std::vector<SymmetryReport> bisection;
  std::optional<double> alpha_star_gap;  // first sign change of the gap, if bracketed
  bool hardy_ratio_decreasing = false;
  bool inner_fraction_decreasing = false;
  int sign_changes = 0;  // along the grid; more than one means the gap chatters
};

// Solves radial ground states on the alpha grid (concurrently), then bisects the first sign change
// of the gap to within tol. kt must be built for spec_template's (n, s, p, normalization).
AlphaSweep find_alpha_star(const ProblemSpec& spec_template, const KernelTable* kt, const std::vector<double>& grid,
                           double tol, const SolverOptions& opts);

void write_sweep_csv(const std::string& path, const AlphaSweep& sweep);

}  // namespace henon
