#include "henon/experiments.hpp"

// pchip.hpp in boost 1.74 uses boost::math::isnan without including it
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <limits>

#include "henon/energy.hpp"
#include "henon/errors.hpp"
#include "henon/io.hpp"

namespace henon {

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

StabilityReport stability_sweep(const ProblemSpec& spec_template, const std::vector<double>& s_values,
                                const MeshPtr& mesh, const SolverOptions& opts, const KernelOptions& kopts) {
  if (!(spec_template.beta > 0.0 && spec_template.beta <= 1.0))
    throw DomainError("stability sweep needs beta in (0,1]");
  if (spec_template.normalization != Normalization::bbm)
    throw DomainError("stability sweep needs the bbm normalization");
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    const double s = s_values[i];
    if (!(s > 0.0 && s < 1.0)) throw DomainError("stability sweep: s must lie in (0,1)");
    if (i > 0 && !(s > s_values[i - 1])) throw DomainError("stability sweep: s values must increase");
    if (!(spec_template.n > s * spec_template.p)) throw DomainError("stability sweep: needs s p < n");
  }

  StabilityReport rep;
  rep.s_values = s_values;
  const double p = spec_template.p;

  ProblemSpec local = spec_template;
  local.beta = 0.0;
  GroundState gl = solve_ground_state(local, nullptr, random_init(mesh, opts.seed, opts.noise), opts);
  const DiscreteField ul = gl.field.scaled(gl.t_scale);
  rep.local_R = gl.R;
  rep.local_norm = std::pow(gradient_energy(ul, p), 1.0 / p);

  for (double s : s_values) {
    ProblemSpec sp = spec_template;
    sp.s = s;
    try {
      const KernelPtr kt = KernelTable::build_cached(sp, mesh, kopts);
      GroundState gs = solve_ground_state(sp, kt.get(), gl.field, opts);
      const DiscreteField us = gs.field.scaled(gs.t_scale);
      rep.distances.push_back(lp_norm(DiscreteField(mesh, us.values - ul.values), p));
      rep.norms.push_back(std::pow(rayleigh_numerator(us, sp, kt.get()), 1.0 / p));
      rep.R_values.push_back(gs.R);
      rep.status.push_back("ok");
    } catch (const Error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rep.distances.push_back(nan);
      rep.norms.push_back(nan);
      rep.R_values.push_back(nan);
      rep.status.push_back(e.what());
    }
  }

  rep.distances_decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    if (rep.status[i] != "ok") {
      rep.distances_decreasing = false;
      continue;
    }
    if (!(rep.distances[i] < prev)) rep.distances_decreasing = false;
    prev = rep.distances[i];
    rep.norm_max = std::max(rep.norm_max, rep.norms[i]);
  }
  return rep;
}

DiscreteField dilate(const DiscreteField& u, double lambda) {
  if (!(lambda >= 1.0)) throw DomainError("dilation needs lambda >= 1");
  const auto& mesh = *u.mesh;
  if (lambda == 1.0) return u;
  std::vector<double> x(mesh.nodes()), y(u.values.data(), u.values.data() + u.size());
  const boost::math::interpolators::pchip<std::vector<double>> f(std::move(x), std::move(y));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(u.size());
  for (int i = 0; i < mesh.M(); ++i) {
    const double r = lambda * mesh.r(i);
    if (r < 1.0) v[i] = f(r);
  }
  return DiscreteField(u.mesh, v);
}

ScalingReport scaling_diagnostic(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt,
                                 const std::vector<double>& lambdas) {
  if (lambdas.size() < 2) throw DomainError("scaling diagnostic needs at least two lambdas");
  for (double l : lambdas)
    if (!(l >= 1.0)) throw DomainError("scaling diagnostic needs lambda >= 1");
  ScalingReport rep;
  rep.lambdas = lambdas;
  const double n = spec.n, p = spec.p, q = spec.q, a = spec.alpha;
  const double shift = (n + a) * p / q;
  rep.local_exponent = p - n + shift;
  rep.nonlocal_exponent = spec.s * p - n + shift;
  rep.supercritical = q > henon_critical_exponent(spec);

  const double G = gradient_energy(u, p);
  double E = 0.0;
  if (spec.nonlocal_weight() != 0.0) {
    if (!kt) throw DomainError("scaling diagnostic needs a kernel table");
    kt->check_mesh(u.mesh);
    E = kt->energy(u.values);
  }
  const double N = rayleigh_denominator(u, spec);
  std::vector<double> ll, lr, lm;
  for (double l : lambdas) {
    const double R = rayleigh_quotient(dilate(u, l), spec, kt);
    rep.R_values.push_back(R);
    const double model = (spec.local_weight() * std::pow(l, p - n) * G + spec.nonlocal_weight() * std::pow(l, spec.s * p - n) * E) *
                         std::pow(l, shift) / N;
    ll.push_back(std::log(l));
    lr.push_back(std::log(R));
    lm.push_back(std::log(model));
  }
  rep.fitted_slope = ls_slope(ll, lr);
  rep.analytic_slope = ls_slope(ll, lm);
  return rep;
}

StraussReport strauss_check(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt) {
  StraussReport rep;
  const double n = spec.n, p = spec.p;
  if (spec.pure_nonlocal()) {
    if (!kt) throw DomainError("pure nonlocal Strauss check needs a kernel table");
    kt->check_mesh(u.mesh);
    rep.gamma_used = n / p - spec.s;
    rep.norm = std::pow(std::pow(lp_norm(u, p), p) + kt->energy(u.values), 1.0 / p);
  } else {
    rep.gamma_used = n / p - 1.0;
    rep.norm = std::pow(gradient_energy(u, p), 1.0 / p);
  }
  if (!(rep.norm > 0.0)) return rep;
  const auto& mesh = *u.mesh;
  double best = 0.0;
  for (int i = 1; i <= mesh.M(); ++i) {
    const double v = std::fabs(u[i]) * std::pow(mesh.r(i), rep.gamma_used);
    if (v > best) {
      best = v;
      rep.r_at_max = mesh.r(i);
    }
  }
  rep.C_observed = best / rep.norm;
  return rep;
}

DiscreteField henon_rhs(const DiscreteField& u, const ProblemSpec& spec) {
  const auto& mesh = *u.mesh;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(u.size());
  for (int i = 0; i < mesh.M(); ++i)
    if (u[i] > 0.0) f[i] = std::pow(mesh.r(i), spec.alpha) * std::pow(u[i], spec.q - 1.0);
  return DiscreteField(u.mesh, f);
}

StampacchiaReport stampacchia_diagnostic(const DiscreteField& u, const DiscreteField& f, const ProblemSpec& spec,
                                         double r_exp, double delta, int K) {
  const double n = spec.n, p = spec.p;
  if (!(spec.beta < 1.0)) throw DomainError("Stampacchia diagnostic needs beta < 1");
  if (!(p < n)) throw DomainError("Stampacchia diagnostic needs p < n");
  if (!(r_exp > n / p)) throw ExponentTooSmall("Stampacchia diagnostic needs r > n/p");
  if (!(delta > 0.0)) throw DomainError("Stampacchia diagnostic needs delta > 0");
  if (K < 1) throw DomainError("Stampacchia diagnostic needs K >= 1");
  if (f.mesh->hash() != u.mesh->hash()) throw MeshMismatch("u and f live on different meshes");

  StampacchiaReport rep;
  rep.delta = delta;
  rep.p_star = n * p / (n - p);
  const double ps = rep.p_star;
  rep.tau = ps / (ps - ps / r_exp - 1.0);
  rep.gamma_theory = 1.0 / p + ps / (rep.tau * p);
  rep.A = lp_norm(u, ps) + lp_norm(f, r_exp);
  rep.bound = rep.A / delta;
  rep.u_max = u.values.maxCoeff();
  rep.bound_holds = rep.u_max <= rep.bound;
  if (!(rep.A > 0.0)) {
    rep.U_nonincreasing = rep.U_to_zero = true;
    return rep;
  }

  const DiscreteField ut = u.scaled(std::pow(delta, 1.0 / p - 1.0) / rep.A);
  for (int k = 0; k <= K; ++k) {
    const double C = 1.0 - std::ldexp(1.0, -k);
    rep.C_k.push_back(C);
    rep.U_k.push_back(std::pow(positive_part_integral(ut, C, ps), p / ps));
  }
  rep.U_nonincreasing = true;
  for (int k = 1; k <= K; ++k)
    if (rep.U_k[k] > rep.U_k[k - 1]) rep.U_nonincreasing = false;
  // U_k has a positive limit exactly when ut exceeds 1 somewhere
  rep.U_to_zero = ut.values.maxCoeff() <= 1.0 && rep.U_k[K] <= 1e-12 * std::max(rep.U_k[0], 1e-300);

  // log U_{k+1} = k log C_hat + gamma log U_k over pairs with both terms positive
  std::vector<int> ks;
  for (int k = 0; k < K; ++k)
    if (rep.U_k[k] > 0.0 && rep.U_k[k + 1] > 0.0) ks.push_back(k);
  rep.fit_pairs = static_cast<int>(ks.size());
  if (ks.size() >= 2) {
    double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0;
    for (int k : ks) {
      const double x0 = k, x1 = std::log(rep.U_k[k]), y = std::log(rep.U_k[k + 1]);
      s00 += x0 * x0;
      s01 += x0 * x1;
      s11 += x1 * x1;
      b0 += x0 * y;
      b1 += x1 * y;
    }
    const double det = s00 * s11 - s01 * s01;
    rep.C_hat_fit = std::exp((b0 * s11 - b1 * s01) / det);
    rep.gamma_fit = (s00 * b1 - s01 * b0) / det;
  } else if (ks.size() == 1) {
    rep.gamma_fit = std::log(rep.U_k[ks[0] + 1]) / std::log(rep.U_k[ks[0]]);
    rep.C_hat_fit = 1.0;
  }
  return rep;
}

double stampacchia_auto_delta(const DiscreteField& u, const DiscreteField& f, const ProblemSpec& spec, double r_exp,
                              int K) {
  const double n = spec.n, p = spec.p;
  if (!(p < n)) throw DomainError("Stampacchia diagnostic needs p < n");
  const double ps = n * p / (n - p);
  const double A = lp_norm(u, ps) + lp_norm(f, r_exp);
  const double umax = u.values.maxCoeff();
  if (!(A > 0.0 && umax > 0.0)) return 1.0;
  // delta^{1/p - 1} umax / A = 1 - 2^{-(K+1)/2}, strictly between two levels so that no U_k is a
  // roundoff-sized sliver of the maximum
  const double target = 1.0 - std::pow(2.0, -0.5 * (K + 1));
  return std::pow(target * A / umax, p / (1.0 - p));
}

void write_stability_csv(const std::string& path, const StabilityReport& r) {
  CsvWriter w(path, {"s", "distance", "norm", "R", "status"});
  for (std::size_t i = 0; i < r.s_values.size(); ++i)
    w.row_mixed({fmt(r.s_values[i]), fmt(r.distances[i]), fmt(r.norms[i]), fmt(r.R_values[i]),
                 r.status[i] == "ok" ? "ok" : "failed"});
  w.close();
}

void write_scaling_csv(const std::string& path, const ScalingReport& r) {
  CsvWriter w(path, {"lambda", "R"});
  for (std::size_t i = 0; i < r.lambdas.size(); ++i) w.row({r.lambdas[i], r.R_values[i]});
  w.close();
}

void write_stampacchia_csv(const std::string& path, const StampacchiaReport& r) {
  CsvWriter w(path, {"k", "C_k", "U_k"});
  for (std::size_t k = 0; k < r.U_k.size(); ++k) w.row({double(k), r.C_k[k], r.U_k[k]});
  w.close();
}

}  // namespace henon
