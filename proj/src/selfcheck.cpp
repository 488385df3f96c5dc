#include "henon/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "henon/energy.hpp"
#include "henon/errors.hpp"
#include "henon/quadrature.hpp"

namespace henon {

double gagliardo_oracle(const DiscreteField& u, const ProblemSpec& spec, double multiplier, double tol) {
  const auto& mesh = *u.mesh;
  const int n = spec.n, M = mesh.M();
  const double p = spec.p, sigma = n + spec.s * p;
  auto inner = [&](double r) {
    const double ur = u.eval(r);
    double s = 0.0;
    auto f = [&](double rho) {
      if (rho == r) return 0.0;
      return std::pow(std::fabs(ur - u.eval(rho)), p) * angular_kernel(n, sigma, r, rho) * std::pow(r * rho, n - 1);
    };
    for (int c = 0; c < M; ++c) {
      const double a = mesh.r(c), b = mesh.r(c + 1);
      if (r > a && r < b) {
        s += quad::tanh_sinh(f, a, r, 1e-9) + quad::tanh_sinh(f, r, b, 1e-9);
      } else {
        s += quad::tanh_sinh(f, a, b, 1e-9);
      }
    }
    return s;
  };
  double D = 0.0, tail = 0.0;
  for (int c = 0; c < M; ++c) {
    const double a = mesh.r(c), b = mesh.r(c + 1);
    D += quad::gk(inner, a, b, tol, 10);
    auto g = [&](double r) {
      if (r >= 1.0) return 0.0;
      return std::pow(std::fabs(u.eval(r)), p) * tail_weight(n, sigma, r) * std::pow(r, n - 1);
    };
    tail += c == M - 1 ? quad::tanh_sinh(g, a, b, tol) : quad::gk(g, a, b, tol, 10);
  }
  return multiplier * sphere_area(n) * (D + 2.0 * tail);
}

namespace {

DiscreteField positive_random(const MeshPtr& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh->M() + 1);
  for (int i = 0; i < mesh->M(); ++i) v[i] = (1.0 - mesh->r(i) * mesh->r(i)) * (1.0 + U(rng));
  return DiscreteField(mesh, v);
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

CheckResult fd_check(const ProblemSpec& spec, const MeshPtr& mesh, double eps, double tol, std::mt19937_64& rng) {
  CheckResult r{"gradient vs central differences (p=" + std::to_string(spec.p).substr(0, 4) + ")", true, 0.0, tol};
  std::shared_ptr<const KernelTable> kt;
  if (spec.nonlocal_weight() != 0.0) kt = std::make_shared<const KernelTable>(spec, mesh);
  const auto& w = mesh->weights();
  std::normal_distribution<double> Z(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteField u = positive_random(mesh, rng);
    Eigen::VectorXd dv = Eigen::VectorXd::Zero(mesh->M() + 1);
    for (int i = 0; i < mesh->M(); ++i) dv[i] = Z(rng) * 0.1;
    const DiscreteField g = gradient_J(u, spec, kt.get(), eps);
    double pair = 0.0;
    for (int i = 0; i < mesh->M(); ++i) pair += w[i] * g[i] * dv[i];
    const double h = 1e-5;
    const double Jp = functional_J(DiscreteField(mesh, u.values + h * dv), spec, kt.get(), eps).J;
    const double Jm = functional_J(DiscreteField(mesh, u.values - h * dv), spec, kt.get(), eps).J;
    r.value = std::max(r.value, rel(pair, (Jp - Jm) / (2.0 * h)));
  }
  r.pass = r.value <= tol;
  return r;
}

}  // namespace

std::vector<CheckResult> run_self_checks(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(cfg.solver.seed);
  ProblemSpec spec = cfg.spec;
  const MeshPtr mesh = make_mesh(32, spec.n, cfg.grading);

  {
    CheckResult r{"lumped weights sum to the ball volume", false, 0.0, 1e-10};
    double s = 0.0;
    for (double w : mesh->weights()) s += w;
    r.value = rel(s, ball_volume(spec.n));
    r.pass = r.value <= r.tolerance;
    out.push_back(r);
  }

  const double eps = spec.p < 2.0 ? 1e-8 : 0.0;
  out.push_back(fd_check(spec, mesh, eps, spec.p == 2.0 ? 1e-6 : 1e-4, rng));

  std::shared_ptr<const KernelTable> kt;
  const bool nonlocal = spec.n > spec.s * spec.p;
  if (nonlocal) kt = std::make_shared<const KernelTable>(spec, mesh);

  if (nonlocal) {
    const MeshPtr m16 = make_mesh(16, spec.n, cfg.grading);
    const KernelTable k16(spec, m16);
    const DiscreteField u = positive_random(m16, rng);
    CheckResult r{"nonlocal energy vs adaptive double-integral oracle", false, 0.0, 1e-3};
    r.value = rel(k16.energy(u.values), gagliardo_oracle(u, spec, k16.multiplier()));
    r.pass = r.value <= r.tolerance;
    out.push_back(r);
  }

  {
    CheckResult r{"p-homogeneity of the energies", true, 0.0, 1e-12};
    const DiscreteField u = positive_random(mesh, rng);
    const double t = 1.7;
    const DiscreteField v = u.scaled(t);
    r.value = std::max(r.value, rel(gradient_energy(v, spec.p), std::pow(t, spec.p) * gradient_energy(u, spec.p)));
    r.value = std::max(r.value, rel(henon_norm(v, spec.alpha, spec.q), std::pow(t, spec.q) * henon_norm(u, spec.alpha, spec.q)));
    if (kt) r.value = std::max(r.value, rel(kt->energy(v.values), std::pow(t, spec.p) * kt->energy(u.values)));
    if (spec.nonlocal_weight() == 0.0 || kt)
      r.value = std::max(r.value, rel(rayleigh_quotient(v, spec, kt.get()), rayleigh_quotient(u, spec, kt.get())));
    r.pass = r.value <= r.tolerance;
    out.push_back(r);
  }

  if (nonlocal) {
    ProblemSpec dom = spec;
    dom.normalization = Normalization::dominated;
    const KernelTable kd(dom, mesh);
    CheckResult r{"dominated normalization: [u]^p <= ||grad u||^p", true, 0.0, 1.0};
    std::normal_distribution<double> Z(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh->M() + 1);
      for (int i = 0; i < mesh->M(); ++i) v[i] = Z(rng);
      const DiscreteField u(mesh, v);
      r.value = std::max(r.value, kd.energy(v) / gradient_energy(u, spec.p));
    }
    r.pass = r.value <= r.tolerance;
    out.push_back(r);
  }
  return out;
}

}  // namespace henon
