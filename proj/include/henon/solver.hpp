#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "henon/kernel.hpp"
#include "henon/mesh.hpp"
#include "henon/problem.hpp"

namespace henon {

struct SolverOptions {
  double tol = 1e-8;  // on the preconditioned dual norm of grad R, relative to max(1, R)
  int max_iter = 5000;
  std::uint64_t seed = 1;
  double noise = 0.01;  // relative perturbation of the default initial profile
  double armijo = 1e-4;
  bool record_trace = false;
  bool override_critical = false;  // allow solves outside the existence regime
};

struct TraceEntry {
  int iteration;
  double R, residual, step;
};

struct GroundState {
  DiscreteField field;  // N(field) = 1, field >= 0
  double R = 0, Z = 0, N = 0;
  double residual = 0;       // dual norm of J' at t_scale * field
  double residual_scale = 0;  // size of either term of J' at t_scale * field
  double rayleigh_residual = 0;         // preconditioned dual norm of grad R
  double rayleigh_residual_lumped = 0;  // lumped dual norm of grad R
  int iterations = 0;
  bool converged = false;
  double t_scale = 0;
  std::vector<TraceEntry> trace;
};

// Z = local_weight ||grad u||_p^p + beta [u]^p,  N = (int |x|^alpha |u|^q)^{p/q}
double rayleigh_numerator(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt);
double rayleigh_denominator(const DiscreteField& u, const ProblemSpec& spec);
double rayleigh_quotient(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt);

// (1 - r^2)(1 + noise U[-1,1]) at every interior node, seeded
DiscreteField random_init(const MeshPtr& mesh, std::uint64_t seed, double noise);

// Throws InvalidInit when N(init) = 0, RegimeRefused outside the existence regime unless
// overridden, and NotConverged (after writing the partial state to *partial if given).
GroundState minimize_rayleigh(const ProblemSpec& spec, const KernelTable* kt, const DiscreteField& init,
                              const SolverOptions& opts, GroundState* partial = nullptr);

// Scales gs.field onto a critical point of J, filling gs.t_scale and gs.residual.
DiscreteField rescale_to_solution(GroundState& gs, const ProblemSpec& spec, const KernelTable* kt);

// minimize + rescale
GroundState solve_ground_state(const ProblemSpec& spec, const KernelTable* kt, const DiscreteField& init,
                               const SolverOptions& opts);

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace);

}  // namespace henon
