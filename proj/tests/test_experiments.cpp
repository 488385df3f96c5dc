#include <doctest.h>

#include <cmath>
#include <numbers>

#include "henon/energy.hpp"
#include "henon/errors.hpp"
#include "henon/experiments.hpp"

using namespace henon;
using std::numbers::pi;

namespace {

ProblemSpec base(double q = 4, double beta = 0.5) {
  ProblemSpec sp;
  sp.n = 3;
  sp.s = 0.5;
  sp.p = 2;
  sp.q = q;
  sp.alpha = 1;
  sp.beta = beta;
  return sp;
}

DiscreteField parabola(const MeshPtr& m) {
  return DiscreteField::from_function(m, [](double r) { return 1 - r * r; });
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("stability sweep: preconditions") {
  const auto m = make_mesh(16, 3);
  CHECK_THROWS_AS(stability_sweep(base(3, 0.0), {0.5}, m, {}), DomainError);
  ProblemSpec dom = base(3);
  dom.normalization = Normalization::dominated;
  CHECK_THROWS_AS(stability_sweep(dom, {0.5}, m, {}), DomainError);
  CHECK_THROWS_AS(stability_sweep(base(3), {0.7, 0.5}, m, {}), DomainError);
  CHECK_THROWS_AS(stability_sweep(base(3), {1.0}, m, {}), DomainError);
}

TEST_CASE("stability sweep: tiny beta reproduces the local ground state") {
  const auto m = make_mesh(64, 3);
  const StabilityReport r = stability_sweep(base(3, 1e-6), {0.99}, m, {});
  REQUIRE(r.status.size() == 1);
  CHECK(r.status[0] == "ok");
  // O(beta) perturbation of the minimizer
  CHECK(r.distances[0] <= 1e-5);
  CHECK(r.norms[0] >= 0);
}

TEST_CASE("stability sweep at M = 64: distances shrink as s -> 1") {
  const auto m = make_mesh(64, 3);
  const StabilityReport r = stability_sweep(base(3), {0.5, 0.9, 0.99}, m, {});
  for (const auto& st : r.status) CHECK(st == "ok");
  CHECK(r.distances_decreasing);
  CHECK(r.distances[2] < 0.5 * r.distances[0]);
  CHECK(std::isfinite(r.norm_max));
}

TEST_CASE("dilation keeps support and positivity") {
  const auto m = make_mesh(128, 3);
  const DiscreteField u = parabola(m);
  CHECK((dilate(u, 1.0).values - u.values).norm() == 0.0);
  const DiscreteField v = dilate(u, 4.0);
  for (int i = 0; i <= 128; ++i) {
    CHECK(v[i] >= 0.0);
    if (m->r(i) >= 0.25) CHECK(v[i] == 0.0);
  }
  CHECK(v[0] == u[0]);
  CHECK_THROWS_AS(dilate(u, 0.5), DomainError);
}

TEST_CASE("scaling diagnostic: identity at lambda = 1 and the local exponent") {
  const auto m = make_mesh(512, 3);
  ProblemSpec sp = base(10, 0.0);
  sp.alpha = 0;
  const DiscreteField u = parabola(m);
  const ScalingReport r = scaling_diagnostic(u, sp, nullptr, {1, 2, 4});
  CHECK(r.R_values[0] == doctest::Approx(rayleigh_quotient(u, sp, nullptr)).epsilon(1e-14));
  CHECK(r.analytic_slope == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(r.local_exponent == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(r.supercritical);
  CHECK(r.fitted_slope < 0);
  CHECK(rel(r.fitted_slope, r.analytic_slope) <= 0.1);
  CHECK_THROWS_AS(scaling_diagnostic(u, sp, nullptr, {0.5, 1, 2}), DomainError);
}

TEST_CASE("scaling diagnostic: subcritical slope is positive") {
  const auto m = make_mesh(256, 3);
  ProblemSpec sp = base(4, 0.5);
  const KernelTable kt(sp, m);
  const ScalingReport r = scaling_diagnostic(parabola(m), sp, &kt, {1, 2, 4});
  CHECK_FALSE(r.supercritical);
  CHECK(r.fitted_slope > 0);
}

TEST_CASE("strauss check: zero field, parabola, homogeneity, exponents") {
  const auto m = make_mesh(1024, 3);
  ProblemSpec sp = base(3, 0.0);
  CHECK(strauss_check(DiscreteField(m), sp).C_observed == 0.0);
  const DiscreteField u = parabola(m);
  const auto r = strauss_check(u, sp);
  CHECK(r.gamma_used == doctest::Approx(0.5));
  // max of (1 - r^2) r^{1/2} sits at r = 5^{-1/2} with value (4/5) 5^{-1/4}; the norm is (16 pi / 5)^{1/2}
  CHECK(r.C_observed == doctest::Approx(0.8 * std::pow(5.0, -0.25) / std::sqrt(16 * pi / 5)).epsilon(1e-3));
  CHECK(r.r_at_max == doctest::Approx(1 / std::sqrt(5.0)).epsilon(2e-2));
  CHECK(strauss_check(u.scaled(7.5), sp).C_observed == doctest::Approx(r.C_observed).epsilon(1e-14));

  const auto m64 = make_mesh(64, 3);
  ProblemSpec nl = base(2.5, 1.0);
  const KernelTable kt(nl, m64);
  const auto rn = strauss_check(parabola(m64), nl, &kt);
  CHECK(rn.gamma_used == doctest::Approx(1.0));
  CHECK(std::isfinite(rn.C_observed));
  CHECK_THROWS_AS(strauss_check(parabola(m64), nl, nullptr), DomainError);
}

TEST_CASE("stampacchia: tau, preconditions, truncation emptying") {
  const auto m = make_mesh(64, 3);
  const ProblemSpec sp = base();
  const DiscreteField u = parabola(m);
  const DiscreteField f = henon_rhs(u, sp);
  const auto r = stampacchia_diagnostic(u, f, sp, 2.0, 1.0);
  CHECK(r.p_star == 6.0);
  CHECK(r.tau == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.U_nonincreasing);
  CHECK(r.bound_holds);
  // max of delta^{-1/2} u / A below C_1 = 1/2: every U_k with k >= 1 vanishes
  const double delta = 4.0 * std::pow(2.0 * r.u_max / r.A, 2);
  const auto e = stampacchia_diagnostic(u, f, sp, 2.0, delta);
  CHECK(e.U_k[0] > 0.0);
  for (std::size_t k = 1; k < e.U_k.size(); ++k) CHECK(e.U_k[k] == 0.0);
  CHECK(e.U_to_zero);
  CHECK_THROWS_AS(stampacchia_diagnostic(u, f, sp, 1.5, 1.0), ExponentTooSmall);
  CHECK_THROWS_AS(stampacchia_diagnostic(u, f, base(3, 1.0), 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(stampacchia_diagnostic(u, f, sp, 2.0, 0.0), DomainError);
}

TEST_CASE("stampacchia on a ground state with the automatic delta") {
  const auto m = make_mesh(128, 3);
  const ProblemSpec sp = base();
  const KernelTable kt(sp, m);
  GroundState gs = minimize_rayleigh(sp, &kt, random_init(m, 1, 0.01), {});
  const DiscreteField u = rescale_to_solution(gs, sp, &kt);
  const DiscreteField f = henon_rhs(u, sp);
  const double delta = stampacchia_auto_delta(u, f, sp, 2.0);
  const auto r = stampacchia_diagnostic(u, f, sp, 2.0, delta);
  CHECK(r.U_nonincreasing);
  CHECK(r.U_to_zero);
  CHECK(r.fit_pairs >= 3);
  CHECK(r.gamma_fit > 1.0);
  CHECK(r.bound_holds);
  CHECK(r.u_max <= r.bound);
}
