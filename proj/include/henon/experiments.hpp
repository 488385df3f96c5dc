#pragma once

#include <string>
#include <vector>

#include "henon/kernel.hpp"
#include "henon/mesh.hpp"
#include "henon/problem.hpp"
#include "henon/solver.hpp"

namespace henon {

struct StabilityReport {
  std::vector<double> s_values;
  std::vector<double> distances;  // ||u_s - u_local||_{L^p}, NaN where the solve failed
  std::vector<double> norms;      // ((1-beta) ||grad u_s||^p + beta [u_s]^p)^{1/p}
  std::vector<double> R_values;
  std::vector<std::string> status;  // "ok" or the failure message
  double local_R = 0;
  double local_norm = 0;
  bool distances_decreasing = false;
  double norm_max = 0;
};

// Solves the beta = 0 problem once, then the mixed problem for each s warm-started from it.
// Requires beta in (0,1] and bbm normalization.
StabilityReport stability_sweep(const ProblemSpec& spec_template, const std::vector<double>& s_values,
                                const MeshPtr& mesh, const SolverOptions& opts, const KernelOptions& kopts = {});

struct ScalingReport {
  std::vector<double> lambdas;
  std::vector<double> R_values;
  double fitted_slope = 0;
  // least-squares slope of the exact-homogeneity model over the same lambdas;
  // equals p - n + (n+alpha)p/q for beta = 0 and sp - n + (n+alpha)p/q for pure nonlocal
  double analytic_slope = 0;
  double local_exponent = 0;     // p - n + (n+alpha)p/q
  double nonlocal_exponent = 0;  // sp - n + (n+alpha)p/q
  bool supercritical = false;
};

// u_lambda(r) = u(lambda r) by monotone cubic interpolation, zero for r >= 1/lambda.
DiscreteField dilate(const DiscreteField& u, double lambda);
ScalingReport scaling_diagnostic(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt,
                                 const std::vector<double>& lambdas);

struct StraussReport {
  double gamma_used = 0;
  double C_observed = 0;
  double norm = 0;
  double r_at_max = 0;
};

// max_i |u_i| r_i^gamma / norm over nodes with r_i > 0. Mixed case: gamma = n/p - 1 and the
// gradient norm; pure nonlocal: gamma = n/p - s and (||u||_p^p + [u]^p)^{1/p}, which needs kt.
StraussReport strauss_check(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt = nullptr);

struct StampacchiaReport {
  std::vector<double> C_k;
  std::vector<double> U_k;
  double p_star = 0;
  double tau = 0;
  double gamma_fit = 0;
  double gamma_theory = 0;  // 1/p + p*/(tau p)
  double C_hat_fit = 0;
  int fit_pairs = 0;
  double A = 0;  // ||u||_{p*} + ||f||_r
  double delta = 0;
  double bound = 0;  // A / delta
  double u_max = 0;
  bool U_nonincreasing = false;
  bool U_to_zero = false;
  bool bound_holds = false;
};

// f is the right-hand side |x|^alpha u^{q-1} assembled by the caller. Requires beta < 1, r_exp > n/p.
StampacchiaReport stampacchia_diagnostic(const DiscreteField& u, const DiscreteField& f, const ProblemSpec& spec,
                                         double r_exp, double delta, int K = 20);
// delta at which max of the rescaled u equals 1 - 2^{-(K+1)/2}: the truncation empties halfway
// through the level sequence, leaving about K/2 pairs for the fit
double stampacchia_auto_delta(const DiscreteField& u, const DiscreteField& f, const ProblemSpec& spec, double r_exp,
                              int K = 20);
DiscreteField henon_rhs(const DiscreteField& u, const ProblemSpec& spec);

void write_stability_csv(const std::string& path, const StabilityReport& r);
void write_scaling_csv(const std::string& path, const ScalingReport& r);
void write_stampacchia_csv(const std::string& path, const StampacchiaReport& r);

}  // namespace henon
