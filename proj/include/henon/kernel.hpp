#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "henon/mesh.hpp"
#include "henon/problem.hpp"

namespace henon {

// int_{S^{n-1}} |sigma_1|^p dsigma
double sphere_moment(int n, double p);
double bbm_constant(int n, double p, double s);
double dominated_constant(int n, double p, double s);
// best constant in ||u||_p <= C ||grad u||_p on the unit ball (radial shooting)
double poincare_constant(int n, double p);

// k(r, rho) = int_{S^{n-1}} |r e_1 - rho tau|^{-sigma} dtau,  sigma = n + s p
double angular_kernel(int n, double sigma, double r, double rho);
// same, with the gap t = |r - rho| supplied by the caller to avoid cancellation
double angular_kernel_gap(int n, double sigma, double r, double rho, double t);
// quadrature route only (no closed form); used for n != 3 and in tests
double angular_kernel_quadrature(int n, double sigma, double r, double rho, double t);

// T(r) = int_1^inf k(r, rho) rho^{n-1} drho
double tail_weight(const ProblemSpec& spec, double r);
double tail_weight(int n, double sigma, double r);
// same, parametrized by d = 1 - r
double tail_weight_complement(int n, double sigma, double d);
double tail_weight_quadrature(int n, double sigma, double d);

struct KernelOptions {
  int adjacent_levels = 20;  // geometric layers toward a shared node
  int adjacent_gauss = 4;
  int far_gauss = 6;
  int tail_gauss = 6;
  double cell_tol = 1e-9;
  std::string key() const;
};

// One quadrature term w * |sum_k c_k u_{node_k}|^p of the nonlocal energy.
struct EnergyItem {
  std::array<int, 4> node{};
  std::array<double, 4> c{};
  int len = 0;
  double w = 0;
};

// Nonlocal energy of P1 radial fields on a fixed mesh:
//   multiplier * |S^{n-1}| * [ int int |u(r)-u(rho)|^p k (r rho)^{n-1}
//                              + 2 int |u|^p T r^{n-1} ]
// For p = 2 the energy is stored as a dense quadratic form over nodes 0..M-1.
class KernelTable {
 public:
  KernelTable(const ProblemSpec& spec, MeshPtr mesh, KernelOptions opts = {});

  const ProblemSpec& spec() const { return spec_; }
  const MeshPtr& mesh() const { return mesh_; }
  double constant() const { return constant_; }
  double multiplier() const { return multiplier_; }
  const Eigen::MatrixXd& k_matrix() const { return kmat_; }
  const std::vector<double>& tail() const { return tail_; }
  bool quadratic() const { return quadratic_; }
  const Eigen::MatrixXd& quadratic_form() const { return Q_; }
  std::size_t item_count() const { return items_.size(); }
  const std::vector<double>& cell_diagonal() const { return diag_; }

  void check_mesh(const MeshPtr& m) const;
  double energy(const Eigen::VectorXd& u) const;
  // nodal partial derivatives, length M+1 (last entry 0)
  Eigen::VectorXd energy_gradient(const Eigen::VectorXd& u) const;

  std::string cache_key() const;
  void save(const std::string& path) const;
  static std::shared_ptr<KernelTable> load(const std::string& path, const ProblemSpec& spec, MeshPtr mesh,
                                           const KernelOptions& opts);
  // HENON_CACHE_DIR-aware construction
  static std::shared_ptr<const KernelTable> build_cached(const ProblemSpec& spec, MeshPtr mesh,
                                                         KernelOptions opts = {});

 private:
  KernelTable() = default;
  void assemble();

  ProblemSpec spec_;
  MeshPtr mesh_;
  KernelOptions opts_;
  double constant_ = 0, multiplier_ = 0;
  bool quadratic_ = false;
  Eigen::MatrixXd kmat_;
  std::vector<double> tail_;
  std::vector<double> diag_;  // same-cell moments D_I
  Eigen::MatrixXd Q_;
  std::vector<EnergyItem> items_;
};

using KernelPtr = std::shared_ptr<const KernelTable>;

}  // namespace henon
