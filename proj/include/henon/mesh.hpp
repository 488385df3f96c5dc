#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace henon {

double sphere_area(int n);  // |S^{n-1}|
double ball_volume(int n);  // |B_1| in R^n

// Graded grid r_i = (i/M)^g on [0,1] with P1 (hat) basis functions.
class RadialMesh {
 public:
  RadialMesh(int M, int n, double grading = 2.0);

  int M() const { return M_; }
  int dim() const { return n_; }
  double grading() const { return g_; }
  const std::vector<double>& nodes() const { return r_; }
  double r(int i) const { return r_[i]; }
  double h(int cell) const { return r_[cell + 1] - r_[cell]; }
  // lumped volume weights |S^{n-1}| * int phi_i r^{n-1} dr, one per node 0..M
  const std::vector<double>& weights() const { return w_; }
  // |S^{n-1}| * int phi_i r^{n-1+alpha} dr
  std::vector<double> moment_weights(double alpha) const;
  const std::string& hash() const { return hash_; }

 private:
  int M_, n_;
  double g_;
  std::vector<double> r_, w_;
  std::string hash_;
};

using MeshPtr = std::shared_ptr<const RadialMesh>;
MeshPtr make_mesh(int M, int n, double grading = 2.0);

// Nodal values u_0..u_M of a radial P1 function; u_M = 0 (zero extension outside B).
struct DiscreteField {
  MeshPtr mesh;
  Eigen::VectorXd values;

  DiscreteField() = default;
  explicit DiscreteField(MeshPtr m);
  DiscreteField(MeshPtr m, Eigen::VectorXd v);
  static DiscreteField from_function(MeshPtr m, const std::function<double(double)>& f);

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  // piecewise-linear interpolant, 0 for r >= 1
  double eval(double r) const;
  DiscreteField scaled(double t) const { return DiscreteField(mesh, t * values); }
  DiscreteField abs() const { return DiscreteField(mesh, values.cwiseAbs()); }
};

}  // namespace henon
