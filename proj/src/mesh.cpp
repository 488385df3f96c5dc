#include "henon/mesh.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <cstdio>

#include "henon/errors.hpp"
#include "henon/io.hpp"
#include "henon/quadrature.hpp"

namespace henon {

double sphere_area(int n) {
  const double pi = boost::math::constants::pi<double>();
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n) { return sphere_area(n) / n; }

namespace {

// int_a^b ((b - r)/h) r^m dr and int_a^b ((r - a)/h) r^m dr for m > -1
std::pair<double, double> hat_moments(double a, double b, double m) {
  const double h = b - a;
  if (h < 0.1 * b) {
    // closed form cancels badly on thin cells far from the origin
    const auto& g = quad::gauss01(10);
    double left = 0, right = 0;
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      const double f = g.w[k] * h * std::pow(a + h * g.x[k], m);
      left += (1.0 - g.x[k]) * f;
      right += g.x[k] * f;
    }
    return {left, right};
  }
  const double m1 = m + 1, m2 = m + 2;
  const double I1 = (std::pow(b, m1) - std::pow(a, m1)) / m1;  // int r^m
  const double I2 = (std::pow(b, m2) - std::pow(a, m2)) / m2;  // int r^{m+1}
  const double left = (b * I1 - I2) / h;
  const double right = (I2 - a * I1) / h;
  return {left, right};
}

}  // namespace

RadialMesh::RadialMesh(int M, int n, double grading) : M_(M), n_(n), g_(grading) {
  if (M < 1) throw MeshTooCoarse("mesh needs at least one cell");
  if (n < 1) throw DomainError("dimension must be positive");
  if (!(grading >= 1.0)) throw DomainError("grading exponent must be >= 1");
  r_.resize(M + 1);
  for (int i = 0; i <= M; ++i) r_[i] = std::pow(static_cast<double>(i) / M, g_);
  r_[M] = 1.0;
  w_ = moment_weights(0.0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "mesh:M=%d;n=%d;g=%.17g", M_, n_, g_);
  hash_ = sha256_hex(buf).substr(0, 16);
}

std::vector<double> RadialMesh::moment_weights(double alpha) const {
  const double S = sphere_area(n_);
  std::vector<double> w(M_ + 1, 0.0);
  const double m = n_ - 1 + alpha;
  for (int c = 0; c < M_; ++c) {
    auto [left, right] = hat_moments(r_[c], r_[c + 1], m);
    w[c] += S * left;
    w[c + 1] += S * right;
  }
  return w;
}

MeshPtr make_mesh(int M, int n, double grading) {
  return std::make_shared<const RadialMesh>(M, n, grading);
}

DiscreteField::DiscreteField(MeshPtr m) : mesh(std::move(m)) {
  values = Eigen::VectorXd::Zero(mesh->M() + 1);
}

DiscreteField::DiscreteField(MeshPtr m, Eigen::VectorXd v) : mesh(std::move(m)), values(std::move(v)) {
  if (values.size() != mesh->M() + 1) throw MeshMismatch("field length does not match mesh");
  values[mesh->M()] = 0.0;
}

DiscreteField DiscreteField::from_function(MeshPtr m, const std::function<double(double)>& f) {
  DiscreteField u(m);
  for (int i = 0; i < m->M(); ++i) u.values[i] = f(m->r(i));
  return u;
}

double DiscreteField::eval(double r) const {
  if (r >= 1.0 || r < 0.0) return 0.0;
  const auto& x = mesh->nodes();
  auto it = std::upper_bound(x.begin(), x.end(), r);
  int c = static_cast<int>(it - x.begin()) - 1;
  c = std::clamp(c, 0, mesh->M() - 1);
  const double lam = (r - x[c]) / (x[c + 1] - x[c]);
  return (1.0 - lam) * values[c] + lam * values[c + 1];
}

}  // namespace henon
