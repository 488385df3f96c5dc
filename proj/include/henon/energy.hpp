#pragma once

#include <Eigen/Dense>
#include <vector>

#include "henon/kernel.hpp"
#include "henon/mesh.hpp"
#include "henon/problem.hpp"

namespace henon {

struct EnergyReport {
  double grad_energy = 0;  // ||grad u||_p^p
  double gagliardo = 0;    // normalized [u]_{s,p}^p including the exterior term
  double henon = 0;        // int |x|^alpha (u^+)^q
  double hardy = 0;        // int u^2/|x|^2, NaN for n < 3
  double J = 0;
  double residual_norm = 0;
};

// Exact energies of the P1 interpolant.
double gradient_energy(const DiscreteField& u, double p);
Eigen::VectorXd gradient_energy_grad(const DiscreteField& u, double p, double eps_reg = 0.0);
// p = 2 quadratic form over nodes 0..M-1
Eigen::MatrixXd local_stiffness(const RadialMesh& mesh);

double gagliardo_energy(const DiscreteField& u, const KernelTable& kt);

// lumped: sum_i w_i^alpha (u_i^+)^q
double henon_norm(const DiscreteField& u, double alpha, double q);
double henon_norm(const DiscreteField& u, const std::vector<double>& alpha_weights, double q);
// int |x|^alpha |u|^q (lumped)
double henon_abs(const DiscreteField& u, const std::vector<double>& alpha_weights, double q);

double hardy_integral(const DiscreteField& u);
// (int_B |u|^p)^{1/p} of the interpolant
double lp_norm(const DiscreteField& u, double p);
// int_B ((u - c)^+)^m of the interpolant, exact up to quadrature of the polynomial pieces
double positive_part_integral(const DiscreteField& u, double c, double m);
// int_{B_rad} |grad u|^2
double inner_gradient_energy(const DiscreteField& u, double radius);

// kt may be null when the nonlocal weight is zero
EnergyReport functional_J(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt,
                          double eps_reg = 0.0);
// lumped Riesz representative g_i = (dJ/du_i) / w_i, g_M = 0
DiscreteField gradient_J(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt, double eps_reg);
// (sum_i w_i |g_i|^{p'})^{1/p'}
double dual_norm(const DiscreteField& g, double p);
double residual_norm(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt);

}  // namespace henon
