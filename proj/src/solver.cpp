#include "henon/solver.hpp"

#include <Eigen/Cholesky>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "henon/energy.hpp"
#include "henon/errors.hpp"
#include "henon/io.hpp"

namespace henon {

namespace {

// R = Z / N on the free nodes 0..M-1; the boundary node is pinned to zero.
class RayleighModel {
 public:
  RayleighModel(const ProblemSpec& spec, const KernelTable* kt, const MeshPtr& mesh)
      : spec_(spec), kt_(kt), mesh_(mesh), M_(mesh->M()), wa_(mesh->moment_weights(spec.alpha)) {
    if (spec.nonlocal_weight() != 0.0) {
      if (!kt) throw DomainError("solver: nonlocal weight requires a kernel table");
      kt->check_mesh(mesh);
    }
    const Eigen::MatrixXd G = local_stiffness(*mesh);
    quadratic_ = spec.p == 2.0 && (spec.nonlocal_weight() == 0.0 || kt->quadratic());
    if (quadratic_) {
      A_ = spec.local_weight() * G;
      if (spec.nonlocal_weight() != 0.0) A_ += spec.nonlocal_weight() * kt->quadratic_form();
    } else {
      A_ = G;
    }
    llt_.compute(A_);
    if (llt_.info() != Eigen::Success) throw DomainError("solver: preconditioner is not positive definite");
    const auto& w = mesh->weights();
    w_ = Eigen::Map<const Eigen::VectorXd>(w.data(), M_);
  }

  int size() const { return M_; }

  DiscreteField field(const Eigen::VectorXd& x) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(M_ + 1);
    v.head(M_) = x;
    return DiscreteField(mesh_, v);
  }

  double Z(const Eigen::VectorXd& x) const {
    if (quadratic_) return x.dot(A_ * x);
    const DiscreteField u = field(x);
    double z = spec_.local_weight() * gradient_energy(u, spec_.p);
    if (spec_.nonlocal_weight() != 0.0) z += spec_.nonlocal_weight() * kt_->energy(u.values);
    return z;
  }

  Eigen::VectorXd grad_Z(const Eigen::VectorXd& x) const {
    if (quadratic_) return 2.0 * (A_ * x);
    const DiscreteField u = field(x);
    const double eps = spec_.p < 2.0 ? 1e-8 : 0.0;
    Eigen::VectorXd g = spec_.local_weight() * gradient_energy_grad(u, spec_.p, eps);
    if (spec_.nonlocal_weight() != 0.0) g += spec_.nonlocal_weight() * kt_->energy_gradient(u.values);
    return g.head(M_);
  }

  double H(const Eigen::VectorXd& x) const {
    double h = 0.0;
    for (int i = 0; i < M_; ++i) h += wa_[i] * std::pow(std::fabs(x[i]), spec_.q);
    return h;
  }

  double N(const Eigen::VectorXd& x) const { return std::pow(H(x), spec_.p / spec_.q); }

  // R and its gradient
  double eval(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
    const double z = Z(x), h = H(x);
    const double n = std::pow(h, spec_.p / spec_.q);
    const double R = z / n;
    Eigen::VectorXd gN(M_);
    const double c = spec_.p * std::pow(h, spec_.p / spec_.q - 1.0);
    for (int i = 0; i < M_; ++i)
      gN[i] = c * wa_[i] * std::copysign(std::pow(std::fabs(x[i]), spec_.q - 1.0), x[i]);
    g = (grad_Z(x) - R * gN) / n;
    return R;
  }

  // R(xn) - R(x) from differences, so the decrease stays visible below the roundoff of R itself
  double delta_R(const Eigen::VectorXd& x, const Eigen::VectorXd& xn) const {
    double dZ;
    if (quadratic_) {
      dZ = (xn - x).dot(A_ * (xn + x));
    } else {
      dZ = Z(xn) - Z(x);
    }
    double h = 0.0, dH = 0.0;
    for (int i = 0; i < M_; ++i) {
      const double a = std::pow(std::fabs(x[i]), spec_.q), b = std::pow(std::fabs(xn[i]), spec_.q);
      h += wa_[i] * a;
      dH += wa_[i] * (b - a);
    }
    const double n = std::pow(h, spec_.p / spec_.q);
    const double dN = n * std::expm1(spec_.p / spec_.q * std::log1p(dH / h));
    return (dZ * n - Z(x) * dN) / (n * (n + dN));
  }

  Eigen::VectorXd precondition(const Eigen::VectorXd& g) const { return llt_.solve(g); }
  double p_norm2(const Eigen::VectorXd& s) const { return s.dot(A_ * s); }

  // lumped dual norm of a nodal derivative vector
  double dual(const Eigen::VectorXd& g) const {
    const double pc = spec_.p / (spec_.p - 1.0);
    double s = 0.0;
    for (int i = 0; i < M_; ++i) s += w_[i] * std::pow(std::fabs(g[i] / w_[i]), pc);
    return std::pow(s, 1.0 / pc);
  }

 private:
  const ProblemSpec& spec_;
  const KernelTable* kt_;
  MeshPtr mesh_;
  int M_;
  std::vector<double> wa_;
  Eigen::VectorXd w_;
  bool quadratic_ = false;
  Eigen::MatrixXd A_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct DescentResult {
  double R = 0, residual = 0, lumped = 0;
  int iterations = 0;
  bool converged = false;
};

bool normalize(const RayleighModel& m, Eigen::VectorXd& x, double p) {
  const double n = m.N(x);
  if (!(n > 0.0) || !std::isfinite(n)) return false;
  x /= std::pow(n, 1.0 / p);
  return true;
}

// Preconditioned gradient descent on N = 1 with Barzilai-Borwein steps and an Armijo safeguard.
DescentResult descend(const RayleighModel& m, Eigen::VectorXd& x, const ProblemSpec& spec, const SolverOptions& o,
                      int budget, int offset, std::vector<TraceEntry>* trace) {
  DescentResult out;
  Eigen::VectorXd g, gn, xn;
  double R = m.eval(x, g);
  Eigen::VectorXd d = m.precondition(g);
  const double alpha0 = 1.0 / spec.p;
  double alpha = alpha0;
  for (int it = 0;; ++it) {
    // dual norm induced by the preconditioner; the lumped norm over-weights the tiny cells at the origin
    const double res = std::sqrt(std::max(0.0, g.dot(d)));
    out.R = R;
    out.residual = res;
    out.lumped = m.dual(g);
    out.iterations = it;
    if (trace) trace->push_back({offset + it, R, res, it == 0 ? 0.0 : alpha});
    if (res <= o.tol * std::max(1.0, R)) {
      out.converged = true;
      return out;
    }
    if (it >= budget) return out;

    const double gd = g.dot(d);
    double a = alpha, Rn = 0.0, dR = 0.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, a *= 0.5) {
      xn = x - a * d;
      if (!normalize(m, xn, spec.p)) {
        // every node vanished: restart the trial from |x|
        xn = x.cwiseAbs();
        normalize(m, xn, spec.p);
      }
      dR = m.delta_R(x, xn);
      if (dR <= -o.armijo * a * gd) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return out;
    Rn = m.eval(xn, gn);

    const Eigen::VectorXd s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    alpha = sy > 0.0 ? std::clamp(m.p_norm2(s) / sy, 1e-8 * alpha0, 1e8 * alpha0) : alpha0;
    x.swap(xn);
    g.swap(gn);
    R = Rn;
    d = m.precondition(g);
  }
}

}  // namespace

double rayleigh_numerator(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt) {
  double z = spec.local_weight() * gradient_energy(u, spec.p);
  if (spec.nonlocal_weight() != 0.0) {
    if (!kt) throw DomainError("nonlocal weight requires a kernel table");
    kt->check_mesh(u.mesh);
    z += spec.nonlocal_weight() * kt->energy(u.values);
  }
  return z;
}

double rayleigh_denominator(const DiscreteField& u, const ProblemSpec& spec) {
  return std::pow(henon_abs(u, u.mesh->moment_weights(spec.alpha), spec.q), spec.p / spec.q);
}

double rayleigh_quotient(const DiscreteField& u, const ProblemSpec& spec, const KernelTable* kt) {
  const double n = rayleigh_denominator(u, spec);
  if (!(n > 0.0)) throw InvalidInit("Rayleigh quotient of the zero field");
  return rayleigh_numerator(u, spec, kt) / n;
}

DiscreteField random_init(const MeshPtr& mesh, std::uint64_t seed, double noise) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh->M() + 1);
  for (int i = 0; i < mesh->M(); ++i) {
    const double r = mesh->r(i);
    v[i] = (1.0 - r * r) * (1.0 + noise * U(rng));
  }
  return DiscreteField(mesh, v);
}

GroundState minimize_rayleigh(const ProblemSpec& spec, const KernelTable* kt, const DiscreteField& init,
                              const SolverOptions& opts, GroundState* partial) {
  validate(spec);
  const RegimeReport rep = classify_regime(spec);
  if (rep.regime != Regime::Existence && !opts.override_critical)
    throw RegimeRefused("q = " + fmt(spec.q) + " is not below p*_{beta,alpha} = " + fmt(rep.p_star_beta_alpha) +
                        " (" + to_string(rep.regime) + ")");
  if (!init.mesh || init.size() != init.mesh->M() + 1) throw InvalidInit("initial field does not match its mesh");
  RayleighModel m(spec, kt, init.mesh);
  Eigen::VectorXd x = init.values.head(m.size());
  if (!(m.N(x) > 0.0)) throw InvalidInit("initial field has N(u) = 0");
  normalize(m, x, spec.p);

  GroundState gs;
  auto* trace = opts.record_trace ? &gs.trace : nullptr;
  DescentResult d1 = descend(m, x, spec, opts, opts.max_iter, 0, trace);
  // R(|u|) <= R(u): polish from the absolute value
  x = x.cwiseAbs();
  normalize(m, x, spec.p);
  DescentResult d2 = descend(m, x, spec, opts, std::max(0, opts.max_iter - d1.iterations), d1.iterations, trace);
  x = x.cwiseAbs();

  gs.field = m.field(x);
  gs.Z = m.Z(x);
  gs.N = m.N(x);
  gs.R = gs.Z / gs.N;
  gs.rayleigh_residual = d2.residual;
  gs.rayleigh_residual_lumped = d2.lumped;
  gs.iterations = d1.iterations + d2.iterations;
  gs.converged = d2.converged;
  if (!gs.converged) {
    if (partial) *partial = gs;
    throw NotConverged("Rayleigh minimization stopped after " + std::to_string(gs.iterations) +
                       " iterations with residual " + fmt(d2.residual));
  }
  return gs;
}

DiscreteField rescale_to_solution(GroundState& gs, const ProblemSpec& spec, const KernelTable* kt) {
  if (!gs.converged) throw RescaleFailed("ground state is not converged");
  const double t0 = std::pow(gs.Z, 1.0 / (spec.q - spec.p));
  const double lo = 0.5 * t0, hi = 2.0 * t0;
  auto f = [&](double t) { return residual_norm(gs.field.scaled(t), spec, kt); };
  const auto [t, res] = boost::math::tools::brent_find_minima(f, lo, hi, 40);
  if (t - lo < 1e-3 * t0 || hi - t < 1e-3 * t0)
    throw RescaleFailed("residual along the ray has no interior minimum in [t0/2, 2 t0]");
  gs.t_scale = t;
  gs.residual = res;
  // the two terms of J' balance at a solution; either one sets the scale
  RayleighModel m(spec, kt, gs.field.mesh);
  const Eigen::VectorXd x = t * gs.field.values.head(m.size());
  gs.residual_scale = m.dual(m.grad_Z(x) / spec.p);
  return gs.field.scaled(t);
}

GroundState solve_ground_state(const ProblemSpec& spec, const KernelTable* kt, const DiscreteField& init,
                               const SolverOptions& opts) {
  GroundState gs = minimize_rayleigh(spec, kt, init, opts);
  rescale_to_solution(gs, spec, kt);
  return gs;
}

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace) {
  CsvWriter w(path, {"iteration", "R", "residual", "step"});
  for (const auto& e : trace) w.row({double(e.iteration), e.R, e.residual, e.step});
  w.close();
}

}  // namespace henon
