#include "henon/symmetry.hpp"

#include <cmath>
#include <exception>

#include "henon/energy.hpp"
#include "henon/errors.hpp"
#include "henon/io.hpp"
#include "parallel.hpp"

namespace henon {

namespace {

void check_symmetry_spec(const ProblemSpec& spec) {
  if (spec.p != 2.0) throw UnsupportedExponent("symmetry analysis is only defined for p = 2");
  if (spec.n < 3) throw DimensionError("symmetry analysis needs n >= 3");
  if (spec.form != OperatorForm::additive) throw DomainError("symmetry analysis needs the additive operator form");
  if (!(spec.q > 2.0 + spec.beta)) throw DomainError("symmetry analysis needs q > 2 + beta");
}

}  // namespace

SymmetryReport second_variation_gap(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt) {
  check_symmetry_spec(spec);
  SymmetryReport r;
  r.alpha = spec.alpha;
  r.Z_additive = rayleigh_numerator(u, spec, kt);
  r.R = r.Z_additive / rayleigh_denominator(u, spec);
  r.hardy = hardy_integral(u);
  r.S_n_infimum = spec.n - 1;
  r.lhs = (spec.q - 2.0 - spec.beta) * r.Z_additive;
  r.rhs = (1.0 + spec.beta) * r.S_n_infimum * r.hardy;
  r.gap = r.rhs - r.lhs;
  r.radial_stable = r.gap >= 0.0;
  r.hardy_ratio = r.hardy / r.Z_additive;
  r.inner_fraction = inner_gradient_energy(u, 0.5) / r.Z_additive;
  return r;
}

SymmetryReport second_variation_gap(const GroundState& gs, const ProblemSpec& spec, const KernelTable* kt) {
  if (!gs.converged) throw DomainError("symmetry analysis needs a converged ground state");
  return second_variation_gap(gs.field, spec, kt);
}

AlphaSweep find_alpha_star(const ProblemSpec& spec_template, const KernelTable* kt, const std::vector<double>& grid,
                           double tol, const SolverOptions& opts) {
  check_symmetry_spec(spec_template);
  const double n = spec_template.n;
  if (n > 2 && !(spec_template.q < 2.0 * n / (n - 2.0)))
    throw DomainError("symmetry sweep needs q below the Sobolev exponent 2n/(n-2)");
  if (grid.empty()) throw DomainError("empty alpha grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("alpha grid must be strictly increasing");
  if (!kt && spec_template.beta != 0.0) throw DomainError("symmetry sweep needs a kernel table");
  const MeshPtr mesh = kt ? kt->mesh() : nullptr;
  if (!mesh) throw DomainError("symmetry sweep needs a kernel table for its mesh");

  auto spec_at = [&](double a) {
    ProblemSpec s = spec_template;
    s.alpha = a;
    return s;
  };
  auto solve_at = [&](double a, const DiscreteField& init) {
    const ProblemSpec s = spec_at(a);
    GroundState gs = minimize_rayleigh(s, kt, init, opts);
    return std::make_pair(gs, second_variation_gap(gs, s, kt));
  };

  AlphaSweep out;
  const int m = static_cast<int>(grid.size());
  std::vector<SymmetryReport> pts(m);
  std::vector<DiscreteField> fields(m);
  detail::ExceptionSink errs;
  const DiscreteField init = random_init(mesh, opts.seed, opts.noise);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < m; ++i)
    errs.run([&] {
      auto [gs, rep] = solve_at(grid[i], init);
      pts[i] = rep;
      fields[i] = gs.field;
    });
  errs.rethrow();
  out.points = pts;

  out.hardy_ratio_decreasing = out.inner_fraction_decreasing = true;
  for (int i = 1; i < m; ++i) {
    if (!(pts[i].hardy_ratio < pts[i - 1].hardy_ratio)) out.hardy_ratio_decreasing = false;
    if (!(pts[i].inner_fraction < pts[i - 1].inner_fraction)) out.inner_fraction_decreasing = false;
    if ((pts[i].gap < 0.0) != (pts[i - 1].gap < 0.0)) ++out.sign_changes;
  }

  int k = -1;
  for (int i = 1; i < m && k < 0; ++i)
    if (pts[i - 1].gap >= 0.0 && pts[i].gap < 0.0) k = i;
  if (k < 0) return out;

  double lo = grid[k - 1], hi = grid[k];
  DiscreteField warm = fields[k - 1];
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto [gs, rep] = solve_at(mid, warm);
    out.bisection.push_back(rep);
    if (rep.gap >= 0.0) {
      lo = mid;
      warm = gs.field;
    } else {
      hi = mid;
    }
  }
  out.alpha_star_gap = 0.5 * (lo + hi);
  return out;
}

void write_sweep_csv(const std::string& path, const AlphaSweep& sweep) {
  CsvWriter w(path, {"alpha", "R", "Z", "hardy", "lhs", "rhs", "gap", "radial_stable", "hardy_ratio",
                     "inner_fraction", "stage"});
  auto emit = [&](const SymmetryReport& r, const char* stage) {
    w.row_mixed({fmt(r.alpha), fmt(r.R), fmt(r.Z_additive), fmt(r.hardy), fmt(r.lhs), fmt(r.rhs), fmt(r.gap),
                 r.radial_stable ? "1" : "0", fmt(r.hardy_ratio), fmt(r.inner_fraction), stage});
  };
  for (const auto& r : sweep.points) emit(r, "grid");
  for (const auto& r : sweep.bisection) emit(r, "bisection");
  w.close();
}

}  // namespace henon
