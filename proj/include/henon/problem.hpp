#pragma once

#include <string>

namespace henon {

enum class Normalization { bbm, dominated };
// convex: (1-beta)(-Delta_p) + beta(-Delta_p)^s; additive: (-Delta) + beta(-Delta)^s.
enum class OperatorForm { convex, additive };
enum class Regime { Existence, Nonexistence, Critical };

struct ProblemSpec {
  int n = 3;
  double s = 0.5;
  double p = 2.0;
  double q = 4.0;
  double alpha = 0.0;
  double beta = 0.5;
  Normalization normalization = Normalization::bbm;
  OperatorForm form = OperatorForm::convex;

  bool pure_nonlocal() const { return beta == 1.0; }
  // weights of the local and nonlocal energies inside Z
  double local_weight() const { return form == OperatorForm::convex ? 1.0 - beta : 1.0; }
  double nonlocal_weight() const { return beta; }
};

void validate(const ProblemSpec& spec);

struct RegimeReport {
  double p_star_beta = 0;
  double p_star_beta_alpha = 0;
  Regime regime = Regime::Existence;
  double alpha_boundedness_threshold = 0;
  double s_boundedness_bound = 0;
  double embedding_r_bound = 0;  // +inf when the embedding holds for every r
};

double critical_exponent(const ProblemSpec& spec);
double henon_critical_exponent(const ProblemSpec& spec);
RegimeReport classify_regime(const ProblemSpec& spec);

std::string to_string(Regime r);
std::string to_string(Normalization m);
std::string to_string(OperatorForm f);
Normalization parse_normalization(const std::string& s);
OperatorForm parse_form(const std::string& s);

}  // namespace henon
