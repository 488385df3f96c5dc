#include "henon/energy.hpp"

#include <cmath>

#include "henon/errors.hpp"
#include "henon/quadrature.hpp"

namespace henon {

namespace {

// int_a^b r^{n-1} dr without cancellation
double cell_volume(double a, double b, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += std::pow(a, k) * std::pow(b, n - 1 - k);
  return (b - a) * s / n;
}

void require_fine(const RadialMesh& m) {
  if (m.M() < 4) throw MeshTooCoarse("mesh needs at least 4 cells");
}

template <class F>
double cell_quadrature(const DiscreteField& u, int points, F&& f) {
  const auto& mesh = *u.mesh;
  const auto& g = quad::gauss01(points);
  double sum = 0.0;
  for (int c = 0; c < mesh.M(); ++c) {
    const double a = mesh.r(c), h = mesh.h(c);
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      const double r = a + h * g.x[k];
      const double U = (1.0 - g.x[k]) * u[c] + g.x[k] * u[c + 1];
      sum += h * g.w[k] * f(r, U);
    }
  }
  return sum;
}

}  // namespace

double gradient_energy(const DiscreteField& u, double p) {
  const auto& mesh = *u.mesh;
  require_fine(mesh);
  const int n = mesh.dim();
  double sum = 0.0;
  for (int c = 0; c < mesh.M(); ++c) {
    const double du = (u[c + 1] - u[c]) / mesh.h(c);
    sum += std::pow(std::fabs(du), p) * cell_volume(mesh.r(c), mesh.r(c + 1), n);
  }
  return sphere_area(n) * sum;
}

Eigen::VectorXd gradient_energy_grad(const DiscreteField& u, double p, double eps) {
  const auto& mesh = *u.mesh;
  require_fine(mesh);
  const int n = mesh.dim(), M = mesh.M();
  const double S = sphere_area(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(M + 1);
  for (int c = 0; c < M; ++c) {
    const double h = mesh.h(c);
    const double du = (u[c + 1] - u[c]) / h;
    const double flux = eps > 0.0 ? std::pow(du * du + eps * eps, 0.5 * (p - 2.0)) * du
                                  : (du == 0.0 ? 0.0 : std::pow(std::fabs(du), p - 2.0) * du);
    const double f = S * cell_volume(mesh.r(c), mesh.r(c + 1), n) * p * flux / h;
    g[c + 1] += f;
    g[c] -= f;
  }
  g[M] = 0.0;
  return g;
}

Eigen::MatrixXd local_stiffness(const RadialMesh& mesh) {
  const int M = mesh.M(), n = mesh.dim();
  const double S = sphere_area(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
  for (int c = 0; c < M; ++c) {
    const double h = mesh.h(c);
    const double k = S * cell_volume(mesh.r(c), mesh.r(c + 1), n) / (h * h);
    A(c, c) += k;
    if (c + 1 < M) {
      A(c + 1, c + 1) += k;
      A(c, c + 1) -= k;
      A(c + 1, c) -= k;
    }
  }
  return A;
}

double gagliardo_energy(const DiscreteField& u, const KernelTable& kt) {
  kt.check_mesh(u.mesh);
  return kt.energy(u.values);
}

double henon_norm(const DiscreteField& u, const std::vector<double>& wa, double q) {
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i)
    if (u[i] > 0.0) s += wa[i] * std::pow(u[i], q);
  return s;
}

double henon_norm(const DiscreteField& u, double alpha, double q) {
  return henon_norm(u, u.mesh->moment_weights(alpha), q);
}

double henon_abs(const DiscreteField& u, const std::vector<double>& wa, double q) {
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) s += wa[i] * std::pow(std::fabs(u[i]), q);
  return s;
}

double hardy_integral(const DiscreteField& u) {
  const int n = u.mesh->dim();
  if (n < 3) throw DimensionError("Hardy integral requires n >= 3");
  // u^2 r^{n-3} is a polynomial on every cell: Gauss-8 is exact for n <= 16
  return sphere_area(n) * cell_quadrature(u, 8, [&](double r, double U) { return U * U * std::pow(r, n - 3); });
}

double lp_norm(const DiscreteField& u, double p) {
  const int n = u.mesh->dim();
  const double I = cell_quadrature(u, 8, [&](double r, double U) { return std::pow(std::fabs(U), p) * std::pow(r, n - 1); });
  return std::pow(sphere_area(n) * I, 1.0 / p);
}

double positive_part_integral(const DiscreteField& u, double c, double m) {
  const auto& mesh = *u.mesh;
  const int n = mesh.dim();
  const auto& g = quad::gauss01(10);
  double sum = 0.0;
  for (int k = 0; k < mesh.M(); ++k) {
    double a = mesh.r(k), b = mesh.r(k + 1);
    const double ua = u[k] - c, ub = u[k + 1] - c;
    if (ua <= 0.0 && ub <= 0.0) continue;
    // restrict to the sub-interval where the linear piece exceeds c
    if (ua < 0.0) a = a + (b - a) * ua / (ua - ub);
    if (ub < 0.0) b = mesh.r(k) + (mesh.r(k + 1) - mesh.r(k)) * ua / (ua - ub);
    const double h = b - a;
    if (h <= 0.0) continue;
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      const double r = a + h * g.x[j];
      const double lam = (r - mesh.r(k)) / mesh.h(k);
      const double U = (1.0 - lam) * u[k] + lam * u[k + 1] - c;
      if (U > 0.0) sum += h * g.w[j] * std::pow(U, m) * std::pow(r, n - 1);
    }
  }
  return sphere_area(n) * sum;
}

double inner_gradient_energy(const DiscreteField& u, double radius) {
  const auto& mesh = *u.mesh;
  const int n = mesh.dim();
  double sum = 0.0;
  for (int c = 0; c < mesh.M() && mesh.r(c) < radius; ++c) {
    const double du = (u[c + 1] - u[c]) / mesh.h(c);
    sum += du * du * cell_volume(mesh.r(c), std::min(radius, mesh.r(c + 1)), n);
  }
  return sphere_area(n) * sum;
}

namespace {

void check_kernel(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt) {
  if (spec.nonlocal_weight() == 0.0) return;
  if (!kt) throw DomainError("nonlocal energy requested without a kernel table");
  kt->check_mesh(u.mesh);
  if (kt->spec().p != spec.p || kt->spec().s != spec.s || kt->spec().n != spec.n ||
      kt->spec().normalization != spec.normalization)
    throw MeshMismatch("kernel table was built for different (n, s, p, normalization)");
}

}  // namespace

EnergyReport functional_J(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt, double eps) {
  check_kernel(u, spec, kt);
  EnergyReport r;
  r.grad_energy = gradient_energy(u, spec.p);
  r.gagliardo = kt ? kt->energy(u.values) : 0.0;
  r.henon = henon_norm(u, spec.alpha, spec.q);
  r.hardy = u.mesh->dim() >= 3 ? hardy_integral(u) : std::nan("");
  r.J = spec.local_weight() / spec.p * r.grad_energy + spec.nonlocal_weight() / spec.p * r.gagliardo -
        r.henon / spec.q;
  if (spec.p < 2.0 && eps == 0.0) eps = 1e-8;
  r.residual_norm = dual_norm(gradient_J(u, spec, kt, eps), spec.p);
  return r;
}

DiscreteField gradient_J(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt, double eps) {
  if (spec.p < 2.0 && !(eps > 0.0))
    throw RegularizationRequired("p < 2 needs a positive regularization of the local flux");
  check_kernel(u, spec, kt);
  const auto& mesh = *u.mesh;
  const int M = mesh.M();
  Eigen::VectorXd d = spec.local_weight() / spec.p * gradient_energy_grad(u, spec.p, eps);
  if (spec.nonlocal_weight() != 0.0) d += spec.nonlocal_weight() / spec.p * kt->energy_gradient(u.values);
  const auto wa = mesh.moment_weights(spec.alpha);
  for (int i = 0; i < M; ++i)
    if (u[i] > 0.0) d[i] -= wa[i] * std::pow(u[i], spec.q - 1.0);
  const auto& w = mesh.weights();
  for (int i = 0; i < M; ++i) d[i] /= w[i];
  d[M] = 0.0;
  return DiscreteField(u.mesh, d);
}

double dual_norm(const DiscreteField& g, double p) {
  const double pc = p / (p - 1.0);
  const auto& w = g.mesh->weights();
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) s += w[i] * std::pow(std::fabs(g[i]), pc);
  return std::pow(s, 1.0 / pc);
}

double residual_norm(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt) {
  const double eps = spec.p < 2.0 ? 1e-8 : 0.0;
  return dual_norm(gradient_J(u, spec, kt, eps), spec.p);
}

}  // namespace henon
