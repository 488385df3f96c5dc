// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "henon/energy.hpp"
#include "henon/errors.hpp"
#include "henon/experiments.hpp"
#include "henon/kernel.hpp"
#include "henon/problem.hpp"
#include "henon/solver.hpp"
#include "henon/symmetry.hpp"
#include "oracles.hpp"

using namespace henon;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

ProblemSpec mixed(double q, double alpha = 1, double beta = 0.5, double p = 2) {
  ProblemSpec sp;
  sp.n = 3;
  sp.s = 0.5;
  sp.p = p;
  sp.q = q;
  sp.alpha = alpha;
  sp.beta = beta;
  return sp;
}

DiscreteField parabola(const MeshPtr& m) {
  return DiscreteField::from_function(m, [](double r) { return 1 - r * r; });
}

// Collects failed sub-checks with the observed values.
struct Verdict {
  bool ok = true;
  std::ostringstream notes;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
  template <class T>
  void note(const std::string& k, const T& v) {
    notes << " " << k << "=" << v;
  }
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.ok = false;
    v.notes << " [exception: " << e.what() << "]";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(dt < limit_s, "runtime limit " + std::to_string(limit_s) + " s");
  if (!v.ok) ++failures;
  std::printf("%s  %2d  %-34s %8.2fs %s\n", v.ok ? "PASS" : "FAIL", id, name, dt, v.notes.str().c_str());
  std::fflush(stdout);
}

// <J'(u), v> against central differences of J
double fd_mismatch(const ProblemSpec& sp, const KernelTable& kt, const DiscreteField& u, const Eigen::VectorXd& dv,
                   double eps) {
  const auto& w = u.mesh->weights();
  const DiscreteField g = gradient_J(u, sp, &kt, eps);
  double pair = 0;
  for (int i = 0; i < u.size(); ++i) pair += w[i] * g[i] * dv[i];
  const double h = 1e-5;
  const double jp = functional_J(DiscreteField(u.mesh, u.values + h * dv), sp, &kt, eps).J;
  const double jm = functional_J(DiscreteField(u.mesh, u.values - h * dv), sp, &kt, eps).J;
  return rel(pair, (jp - jm) / (2 * h));
}

void gradient_consistency(Verdict& v) {
  const auto m = make_mesh(64, 3);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1, 1);
  std::normal_distribution<double> Z(0, 1);
  auto field = [&] {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(65);
    for (int i = 0; i < 64; ++i) x[i] = (1 - m->r(i) * m->r(i)) * (1 + 0.5 * U(rng));
    return DiscreteField(m, x);
  };
  auto direction = [&] {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(65);
    for (int i = 0; i < 64; ++i) d[i] = 0.1 * Z(rng);
    return d;
  };
  double worst2 = 0, worst3 = 0;
  {
    const ProblemSpec sp = mixed(3);
    const KernelTable kt(sp, m);
    for (int k = 0; k < 20; ++k) worst2 = std::max(worst2, fd_mismatch(sp, kt, field(), direction(), 0.0));
  }
  {
    // the derivative identity is checked at the same tuple with p = 3
    const ProblemSpec sp = mixed(3, 1, 0.5, 3);
    const KernelTable kt(sp, m);
    for (int k = 0; k < 20; ++k) worst3 = std::max(worst3, fd_mismatch(sp, kt, field(), direction(), 1e-8));
  }
  v.note("p2_worst", worst2);
  v.note("p3_worst", worst3);
  v.require(worst2 <= 1e-6, "p = 2 mismatch <= 1e-6");
  v.require(worst3 <= 1e-4, "p = 3 mismatch <= 1e-4");
}

void oracle_equivalence(Verdict& v) {
  const auto m = make_mesh(16, 3);
  double worst_hat = 0;
  for (double p : {2.0, 3.0}) {
    const ProblemSpec sp = mixed(3, 1, 0.5, p);
    const KernelTable kt(sp, m);
    const double mult = oracle::bbm_multiplier3(sp.s, p);
    for (int j : {0, 5, 10, 15}) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(17);
      x[j] = 1.0;
      const DiscreteField hat(m, x);
      const oracle::Profile prof{m->nodes(), std::vector<double>(x.data(), x.data() + x.size())};
      worst_hat = std::max(worst_hat, rel(gagliardo_energy(hat, kt), oracle::gagliardo3(prof, sp.s, p, mult)));
    }
  }
  const std::size_t N = 1'000'000;
  double worst_k = 0;
  struct K {
    int n;
    double sigma, r, rho;
  };
  for (const K& k : {K{3, 4.0, 0.3, 0.7}, K{2, 3.0, 0.35, 0.8}, K{4, 5.0, 0.6, 0.2}})
    worst_k = std::max(worst_k, rel(angular_kernel(k.n, k.sigma, k.r, k.rho),
                                    oracle::angular_kernel(k.n, k.sigma, k.r, k.rho, N).mean));
  double worst_t = 0;
  for (auto [sigma, r] : {std::pair{4.0, 0.5}, std::pair{4.5, 0.3}, std::pair{4.0, 0.0}})
    worst_t = std::max(worst_t, rel(tail_weight(3, sigma, r), oracle::exterior(3, sigma, r, N).mean));
  v.note("hat_worst", worst_hat);
  v.note("kernel_worst", worst_k);
  v.note("tail_worst", worst_t);
  v.require(worst_hat <= 1e-3, "hat profiles within 1e-3");
  v.require(worst_k <= 1e-2, "angular kernel within 1e-2");
  v.require(worst_t <= 1e-2, "tail weight within 1e-2");
}

void bbm_limit(Verdict& v) {
  const auto m = make_mesh(1024, 3);
  const DiscreteField u = parabola(m);
  const double limit = 16 * pi / 5;
  std::vector<double> dev;
  for (double s : {0.9, 0.95, 0.99}) {
    ProblemSpec sp = mixed(4);
    sp.s = s;
    const KernelTable kt(sp, m);
    const double ratio = gagliardo_energy(u, kt) / limit;
    dev.push_back(std::fabs(ratio - 1));
    v.note("ratio@" + std::to_string(s).substr(0, 4), ratio);
  }
  v.require(dev[2] <= 0.05, "s = 0.99 within 5%");
  v.require(dev[0] > dev[1] && dev[1] > dev[2], "monotone approach");
}

// existence-regime solution on a mesh of M intervals
DiscreteField existence_solution(int M, const ProblemSpec& sp, GroundState* out = nullptr) {
  const auto m = make_mesh(M, 3);
  const KernelTable kt(sp, m);
  GroundState gs = minimize_rayleigh(sp, sp.beta > 0 ? &kt : nullptr, random_init(m, 1, 0.01), {});
  DiscreteField u = rescale_to_solution(gs, sp, sp.beta > 0 ? &kt : nullptr);
  if (out) *out = gs;
  return u;
}

void existence(Verdict& v) {
  const auto m = make_mesh(256, 3);
  const ProblemSpec sp = mixed(4);
  const KernelTable kt(sp, m);
  std::vector<double> R;
  bool all_converged = true, nonneg = true, certified = true;
  double worst_res = 0, worst_pair = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GroundState gs = minimize_rayleigh(sp, &kt, random_init(m, seed, 0.3), {});
    const DiscreteField u = rescale_to_solution(gs, sp, &kt);
    R.push_back(gs.R);
    all_converged = all_converged && gs.converged;
    nonneg = nonneg && u.values.minCoeff() >= 0.0;
    worst_res = std::max(worst_res, gs.residual / gs.residual_scale);
    // Nehari identity at the rescaled field
    const DiscreteField g = gradient_J(u, sp, &kt, 0.0);
    double pair = 0;
    for (int i = 0; i < u.size(); ++i) pair += m->weights()[i] * g[i] * u[i];
    const double rp = std::fabs(pair) / functional_J(u, sp, &kt).henon;
    worst_pair = std::max(worst_pair, rp);
    // bounded by the dual residual, so it gets the same tolerance
    certified = certified && functional_J(u, sp, &kt).J > 0 && rp <= 1e-6;
  }
  const auto [lo, hi] = std::minmax_element(R.begin(), R.end());
  v.note("R_min", *lo);
  v.note("R_spread", (*hi - *lo) / *lo);
  v.note("residual/scale", worst_res);
  v.note("nehari", worst_pair);
  v.require(all_converged, "all seeds converged");
  v.require((*hi - *lo) / *lo <= 1e-2, "R within 1%");
  v.require(worst_res <= 1e-6, "residual <= 1e-6 scale");
  v.require(nonneg, "field >= 0");
  v.require(certified, "critical point certificate");
}

void nonexistence(Verdict& v) {
  const auto m = make_mesh(256, 3);
  const ProblemSpec sp = mixed(10);
  const KernelTable kt(sp, m);
  const ScalingReport r = scaling_diagnostic(parabola(m), sp, &kt, {1, 2, 4, 8});
  v.note("fitted", r.fitted_slope);
  v.note("analytic", r.analytic_slope);
  v.note("R(8)/R(1)", r.R_values.back() / r.R_values.front());
  v.require(r.supercritical, "classified supercritical");
  v.require(r.fitted_slope < 0, "negative slope");
  v.require(rel(r.fitted_slope, r.analytic_slope) <= 0.1, "slope within 10%");
  bool decreasing = true;
  for (std::size_t k = 1; k < r.R_values.size(); ++k) decreasing = decreasing && r.R_values[k] < r.R_values[k - 1];
  v.require(decreasing, "R(u_lambda) decreasing");
  v.require(r.R_values.back() < 0.5 * r.R_values.front(), "R(u_8) < R(u_1) / 2");
}

void stability(Verdict& v) {
  const auto m = make_mesh(256, 3);
  const StabilityReport r = stability_sweep(mixed(3), {0.5, 0.7, 0.9, 0.99}, m, {});
  bool ok = true;
  for (const auto& st : r.status) ok = ok && st == "ok";
  for (std::size_t k = 0; k < r.distances.size(); ++k) v.note("d@" + std::to_string(r.s_values[k]).substr(0, 4), r.distances[k]);
  const double nmin = *std::min_element(r.norms.begin(), r.norms.end());
  v.note("norm_max", r.norm_max);
  v.note("norm_min", nmin);
  v.require(ok, "all solves ok");
  v.require(r.distances_decreasing, "distances decrease");
  v.require(r.distances.back() <= 0.5 * r.distances.front(), "factor 2 from s = 0.5 to 0.99");
  v.require(std::isfinite(r.norm_max) && r.norm_max <= 2 * nmin, "norms bounded (max <= 2 min)");
}

void symmetry(Verdict& v) {
  ProblemSpec sp = mixed(3, 0, 0.25);
  sp.form = OperatorForm::additive;
  sp.normalization = Normalization::dominated;
  const auto m = make_mesh(256, 3);
  const KernelTable kt(sp, m);
  const AlphaSweep sw = find_alpha_star(sp, &kt, {0, 5, 10, 20, 30, 40, 50}, 0.05, {});
  bool negative = false;
  for (const auto& p : sw.points) negative = negative || p.gap < 0;
  v.note("gap0", sw.points.front().gap);
  if (sw.alpha_star_gap) v.note("alpha_star", *sw.alpha_star_gap);
  v.note("sign_changes", sw.sign_changes);
  v.require(sw.points.front().gap > 0, "gap(0) > 0");
  v.require(negative, "gap < 0 for some alpha <= 50");
  v.require(sw.alpha_star_gap.has_value() && std::isfinite(*sw.alpha_star_gap), "finite crossing");
  v.require(sw.hardy_ratio_decreasing, "hardy / Z decreasing");
  v.require(sw.inner_fraction_decreasing, "inner fraction decreasing");
}

void stampacchia(Verdict& v) {
  const ProblemSpec sp = mixed(4);
  const DiscreteField u = existence_solution(256, sp);
  const DiscreteField f = henon_rhs(u, sp);
  const double delta = stampacchia_auto_delta(u, f, sp, 2.0);
  const StampacchiaReport r = stampacchia_diagnostic(u, f, sp, 2.0, delta);
  v.note("gamma_fit", r.gamma_fit);
  v.note("pairs", r.fit_pairs);
  v.note("u_max", r.u_max);
  v.note("bound", r.bound);
  v.require(r.U_nonincreasing, "U_k nonincreasing");
  v.require(r.U_to_zero, "U_k -> 0");
  v.require(r.fit_pairs >= 3 && r.gamma_fit > 1, "fitted gamma > 1");
  v.require(r.bound_holds && r.u_max <= r.bound, "bound at every node");
}

void strauss(Verdict& v) {
  auto spread = [](const std::vector<double>& c) {
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    return (*hi - *lo) / *lo;
  };
  std::vector<double> Cm, Cn;
  double gm = 0, gn = 0;
  // beta = 1 uses q = 3: q = 4 is the critical exponent there
  ProblemSpec nl = mixed(3, 1, 1.0);
  for (int M : {128, 256, 512}) {
    const ProblemSpec sp = mixed(4);
    const StraussReport r = strauss_check(existence_solution(M, sp), sp);
    Cm.push_back(r.C_observed);
    gm = r.gamma_used;
    const auto m = make_mesh(M, 3);
    const KernelTable kt(nl, m);
    GroundState gs = minimize_rayleigh(nl, &kt, random_init(m, 1, 0.01), {});
    const StraussReport rn = strauss_check(rescale_to_solution(gs, nl, &kt), nl, &kt);
    Cn.push_back(rn.C_observed);
    gn = rn.gamma_used;
  }
  v.note("C_mixed", Cm.back());
  v.note("spread_mixed", spread(Cm));
  v.note("C_nonlocal", Cn.back());
  v.note("spread_nonlocal", spread(Cn));
  bool finite = true;
  for (double c : Cm) finite = finite && std::isfinite(c) && c > 0;
  for (double c : Cn) finite = finite && std::isfinite(c) && c > 0;
  v.require(finite, "C finite");
  v.require(gm == 3.0 / 2.0 - 1.0, "mixed gamma = n/p - 1");
  v.require(gn == 3.0 / 2.0 - 0.5, "nonlocal gamma = n/p - s");
  v.require(spread(Cm) <= 0.2, "mixed C within 20%");
  v.require(spread(Cn) <= 0.2, "nonlocal C within 20%");
}

ProblemSpec tuple(int n, double p, double s, double alpha, double beta, double q) {
  ProblemSpec sp;
  sp.n = n;
  sp.p = p;
  sp.s = s;
  sp.alpha = alpha;
  sp.beta = beta;
  sp.q = q;
  return sp;
}

void exponent_table(Verdict& v) {
  int rows = 0, bad = 0;
  auto eq = [&](double got, double want, const char* what) {
    ++rows;
    if (std::fabs(got - want) > 1e-12 * std::max(1.0, std::fabs(want))) {
      ++bad;
      v.require(false, std::string(what) + " got " + std::to_string(got));
    }
  };
  eq(critical_exponent(tuple(3, 2, 0.5, 0, 0.0, 3)), 6.0, "p*(beta=0)");
  eq(critical_exponent(tuple(3, 2, 0.5, 0, 1.0, 2.5)), 3.0, "p*(beta=1)");
  eq(critical_exponent(tuple(4, 2, 0.5, 0, 0.5, 3)), 4.0, "p*(n=4)");
  eq(henon_critical_exponent(tuple(3, 2, 0.5, 1, 0.5, 3)), 8.0, "p*_alpha mixed");
  eq(henon_critical_exponent(tuple(3, 2, 0.5, 1, 1.0, 3)), 4.0, "p*_alpha nonlocal");
  eq(henon_critical_exponent(tuple(3, 2, 0.5, 0, 0.0, 3)), 6.0, "alpha = 0 collapse");
  const RegimeReport a = classify_regime(tuple(6, 2, 0.5, 0, 0.0, 5));
  eq(a.alpha_boundedness_threshold, 6.0, "alpha threshold");
  eq(classify_regime(tuple(3, 2, 0.5, 0, 1.0, 4)).s_boundedness_bound, 0.9, "s bound");
  eq(classify_regime(tuple(3, 2, 0.5, 0.4, 1.0, 2.5)).embedding_r_bound, 5.0, "embedding bound");
  ++rows;
  if (!std::isinf(classify_regime(tuple(3, 2, 0.5, 1, 0.5, 4)).embedding_r_bound)) {
    ++bad;
    v.require(false, "embedding bound infinite");
  }
  const auto regime = [&](double q, Regime want, const char* what) {
    ++rows;
    if (classify_regime(tuple(3, 2, 0.5, 1, 0.5, q)).regime != want) {
      ++bad;
      v.require(false, what);
    }
  };
  regime(4, Regime::Existence, "existence at q = 4");
  regime(8, Regime::Critical, "critical at q = 8");
  regime(9, Regime::Nonexistence, "nonexistence at q = 9");
  v.note("rows", rows);
  v.note("mismatches", bad);
}

}  // namespace

int main() {
  std::printf("status  id  criterion                           runtime  observed\n");
  criterion(1, "gradient consistency", 30, gradient_consistency);
  criterion(2, "oracle equivalence", 120, oracle_equivalence);
  criterion(3, "local limit as s -> 1", 300, bbm_limit);
  criterion(4, "existence regime", 300, existence);
  criterion(5, "non-existence scaling", 120, nonexistence);
  criterion(6, "stability as s -> 1", 900, stability);
  criterion(7, "symmetry breaking", 1200, symmetry);
  criterion(8, "stampacchia iteration", 60, stampacchia);
  criterion(9, "strauss decay", 300, strauss);
  criterion(10, "exponent arithmetic", 1, exponent_table);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
