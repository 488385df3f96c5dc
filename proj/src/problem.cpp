#include "henon/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "henon/errors.hpp"

namespace henon {

void validate(const ProblemSpec& sp) {
  auto fail = [](const std::string& m) { throw DomainError("invalid problem: " + m); };
  if (sp.n < 2) fail("n must be >= 2");
  if (!(sp.s > 0.0 && sp.s < 1.0)) fail("s must lie in (0,1)");
  if (!(sp.p > 1.0)) fail("p must be > 1");
  if (!(sp.q > sp.p)) fail("q must be > p");
  if (!(sp.alpha >= 0.0)) fail("alpha must be >= 0");
  if (!(sp.beta >= 0.0 && sp.beta <= 1.0)) fail("beta must lie in [0,1]");
  if (sp.pure_nonlocal()) {
    if (!(sp.n > sp.s * sp.p)) fail("beta = 1 requires n > s p");
  } else if (!(sp.n > sp.p)) {
    fail("beta < 1 requires n > p");
  }
}

double critical_exponent(const ProblemSpec& sp) {
  validate(sp);
  const double n = sp.n, p = sp.p;
  return sp.pure_nonlocal() ? n * p / (n - sp.s * p) : n * p / (n - p);
}

double henon_critical_exponent(const ProblemSpec& sp) {
  validate(sp);
  const double n = sp.n, p = sp.p, a = sp.alpha;
  return sp.pure_nonlocal() ? (n * p + a * p) / (n - sp.s * p) : (n * p + a * p) / (n - p);
}

RegimeReport classify_regime(const ProblemSpec& sp) {
  RegimeReport r;
  r.p_star_beta = critical_exponent(sp);
  r.p_star_beta_alpha = henon_critical_exponent(sp);
  if (sp.q == r.p_star_beta_alpha)
    r.regime = Regime::Critical;
  else if (sp.q > r.p_star_beta_alpha)
    r.regime = Regime::Nonexistence;
  else
    r.regime = Regime::Existence;

  const double n = sp.n, p = sp.p, q = sp.q, s = sp.s, a = sp.alpha;
  const double inf = std::numeric_limits<double>::infinity();
  if (sp.pure_nonlocal()) {
    r.alpha_boundedness_threshold = std::max(0.0, (q - 1) * (n / p - s) - s * p);
    r.embedding_r_bound = a < (n - s * p) / p ? n * p / (n - s * p - a * p) : inf;
  } else {
    r.alpha_boundedness_threshold = std::max(0.0, (q - 1) * (n / p - 1) - p);
    r.embedding_r_bound = a < (n - p) / p ? n * p / (n - p - a * p) : inf;
  }
  r.s_boundedness_bound = (n / p) * (q - 1) / (p + q - 1);
  return r;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Existence: return "Existence";
    case Regime::Nonexistence: return "Nonexistence";
    case Regime::Critical: return "Critical";
  }
  return "?";
}

std::string to_string(Normalization m) { return m == Normalization::bbm ? "bbm" : "dominated"; }
std::string to_string(OperatorForm f) { return f == OperatorForm::convex ? "convex" : "additive"; }

Normalization parse_normalization(const std::string& s) {
  if (s == "bbm") return Normalization::bbm;
  if (s == "dominated") return Normalization::dominated;
  throw DomainError("unknown normalization '" + s + "'");
}

OperatorForm parse_form(const std::string& s) {
  if (s == "convex") return OperatorForm::convex;
  if (s == "additive") return OperatorForm::additive;
  throw DomainError("unknown operator form '" + s + "'");
}

}  // namespace henon
