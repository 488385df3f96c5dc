#include "henon/kernel.hpp"

#include <omp.h>

#include <boost/math/constants/constants.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "henon/errors.hpp"
#include "henon/io.hpp"
#include "henon/quadrature.hpp"
#include "parallel.hpp"

namespace henon {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

void check_kernel_args(int n, double p, double s) {
  if (n < 2) throw DomainError("kernel: n must be >= 2");
  if (!(p > 1.0)) throw DomainError("kernel: p must be > 1");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("kernel: s must lie in (0,1)");
}

double kernel_closed_n3(double sigma, double lo, double hi, double t) {
  const double a = sigma - 2.0;
  const double x = lo / hi;
  if (x < 0.5) {
    // (1-x)^{-a} - (1+x)^{-a} without cancellation
    const double e1 = std::exp(-a * std::log1p(-x));
    const double diff = -e1 * std::expm1(-2.0 * a * std::atanh(x));
    return 2.0 * kPi * std::pow(hi, -sigma) * diff / (a * x);
  }
  return 2.0 * kPi / (lo * hi * a) * (std::pow(t, -a) - std::pow(lo + hi, -a));
}

}  // namespace

double sphere_moment(int n, double p) {
  return 2.0 * std::pow(kPi, 0.5 * (n - 1)) * std::tgamma(0.5 * (p + 1)) / std::tgamma(0.5 * (n + p));
}

double bbm_constant(int n, double p, double s) {
  check_kernel_args(n, p, s);
  return std::pow(p * (1.0 - s) / sphere_moment(n, p), 1.0 / p);
}

double poincare_constant(int n, double p) {
  if (n < 1 || !(p > 1.0)) throw DomainError("poincare_constant: bad arguments");
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;  // u, flux w = r^{n-1} |u'|^{p-2} u'
  const double pp = 1.0 / (p - 1.0);
  auto rhs = [&](const State& x, State& dx, double r) {
    const double rn1 = std::pow(r, n - 1);
    const double z = x[1] / rn1;
    dx[0] = std::copysign(std::pow(std::fabs(z), pp), z);
    dx[1] = -rn1 * std::copysign(std::pow(std::fabs(x[0]), p - 1.0), x[0]);
  };
  const double r0 = 1e-6;
  State x = {1.0 - (p - 1.0) / p * std::pow(1.0 / n, pp) * std::pow(r0, p * pp), -std::pow(r0, n) / n};
  auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  stepper.initialize(x, r0, 1e-4);
  for (int it = 0; it < 1000000; ++it) {
    auto [t0, t1] = stepper.do_step(rhs);
    if (stepper.current_state()[0] <= 0.0) {
      double lo = t0, hi = t1;
      State tmp;
      for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, tmp);
        (tmp[0] > 0.0 ? lo : hi) = mid;
      }
      return 1.0 / (0.5 * (lo + hi));
    }
    if (t1 > 1e3) break;
  }
  throw DomainError("poincare_constant: shooting did not find a zero");
}

double dominated_constant(int n, double p, double s) {
  check_kernel_args(n, p, s);
  const double CP = poincare_constant(n, p);
  const double S = sphere_area(n);
  return 1.0 / ((S / p) * (1.0 / (1.0 - s) + std::pow(2.0, p) * std::pow(CP, p) / s));
}

double angular_kernel_quadrature(int n, double sigma, double r, double rho, double t) {
  const double lo = std::min(r, rho), hi = std::max(r, rho);
  if (lo == 0.0) return sphere_area(n) * std::pow(hi, -sigma);
  const double c = n == 2 ? 2.0 : sphere_area(n - 1);
  const double q = 4.0 * lo * hi;
  const double t2 = t * t;
  auto f = [&](double th) {
    const double sh = std::sin(0.5 * th);
    double v = std::pow(t2 + q * sh * sh, -0.5 * sigma);
    if (n > 2) v *= std::pow(std::sin(th), n - 2);
    return v;
  };
  // the integrand is concentrated in theta ~ t / sqrt(r rho)
  double a = 0.0, b = std::min(kPi, t / std::sqrt(lo * hi));
  double sum = 0.0;
  while (true) {
    sum += quad::gk(f, a, b, 1e-12, 20);
    if (b >= kPi) break;
    a = b;
    b = std::min(kPi, 4.0 * b);
  }
  return c * sum;
}

double angular_kernel_gap(int n, double sigma, double r, double rho, double t) {
  if (r < 0 || rho < 0) throw DomainError("angular_kernel: negative radius");
  if (!(t > 0.0)) throw SingularDiagonal("angular_kernel: r == rho");
  if (n == 3) {
    const double lo = std::min(r, rho), hi = std::max(r, rho);
    if (lo == 0.0) return 4.0 * kPi * std::pow(hi, -sigma);
    return kernel_closed_n3(sigma, lo, hi, t);
  }
  return angular_kernel_quadrature(n, sigma, r, rho, t);
}

double angular_kernel(int n, double sigma, double r, double rho) {
  if (r == rho) throw SingularDiagonal("angular_kernel: r == rho");
  return angular_kernel_gap(n, sigma, r, rho, std::fabs(r - rho));
}

double tail_weight_quadrature(int n, double sigma, double d) {
  const double r = 1.0 - d;
  const double sp = sigma - n;
  const double S = sphere_area(n);
  if (r == 0.0) return S / sp;
  auto f = [&](double v) {
    return angular_kernel_gap(n, sigma, r, 1.0 + v, d + v) * std::pow(1.0 + v, n - 1);
  };
  double sum = 0.0;
  double a = 0.0, b = std::min(1.0, d);
  while (true) {
    sum += quad::gk(f, a, b, 1e-11, 20);
    if (b >= 1.0) break;
    a = b;
    b = std::min(1.0, 2.0 * b);
  }
  const double vmax = 1e4;
  for (double lo = 1.0; lo < vmax; lo *= 10.0) sum += quad::gk(f, lo, 10.0 * lo, 1e-11, 20);
  // |x - y|^{-sigma} ~ rho^{-sigma} beyond the cutoff
  sum += S * std::pow(1.0 + vmax, -sp) / sp;
  return sum;
}

double tail_weight_complement(int n, double sigma, double d) {
  if (!(d > 0.0) || d > 1.0) throw DomainError("tail_weight: r must lie in [0,1)");
  const double r = 1.0 - d;
  const double sp = sigma - n;
  if (r == 0.0) return sphere_area(n) / sp;
  if (n == 3 && r >= 1e-3) {
    const double a = sigma - 2.0;
    if (a == 2.0)
      return kPi / r * (std::log((2.0 - d) / d) + r / d + r / (2.0 - d));
    if (std::fabs(a - 2.0) > 1e-4) {
      const double Pp = std::pow(d, 2.0 - a) / (2.0 - a) + r * std::pow(d, 1.0 - a) / (1.0 - a);
      const double Pm = std::pow(2.0 - d, 2.0 - a) / (2.0 - a) - r * std::pow(2.0 - d, 1.0 - a) / (1.0 - a);
      return 2.0 * kPi / (r * a) * (Pm - Pp);
    }
  }
  return tail_weight_quadrature(n, sigma, d);
}

double tail_weight(int n, double sigma, double r) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("tail_weight: r must lie in [0,1)");
  return tail_weight_complement(n, sigma, 1.0 - r);
}

double tail_weight(const ProblemSpec& spec, double r) {
  return tail_weight(spec.n, spec.n + spec.s * spec.p, r);
}

std::string KernelOptions::key() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "L=%d;ga=%d;gf=%d;gt=%d;tol=%.3g", adjacent_levels, adjacent_gauss, far_gauss,
                tail_gauss, cell_tol);
  return buf;
}

namespace {

// D = int_cell int_cell |r - rho|^p k(r, rho) (r rho)^{n-1}
double same_cell_moment(int n, double sigma, double p, double a, double b, double tol) {
  const double h = b - a;
  const double sp = sigma - n;
  const double e = p - sp;  // the t-integrand behaves like t^{e-1}
  const auto& g10 = quad::gauss01(10);
  auto inner = [&](double t) {
    auto g = [&](double r) {
      const double rho = r + t;
      return angular_kernel_gap(n, sigma, r, rho, t) * std::pow(r * rho, n - 1);
    };
    auto gauss = [&](double lo, double hi) {
      double s = 0.0;
      for (std::size_t k = 0; k < g10.x.size(); ++k) s += g10.w[k] * g(lo + (hi - lo) * g10.x[k]);
      return s * (hi - lo);
    };
    const double end = b - t;
    // far from the origin the r-integrand is analytic on a wide ellipse
    if (a >= 2.0 * h) return gauss(a, end);
    // near the origin it varies on the scale t: grade the pieces geometrically from r = 0
    double s = 0.0, lo = a, hi = std::max(a, t);
    if (hi > lo) s += gauss(lo, std::min(hi, end));
    while (hi < end) {
      lo = hi;
      hi = std::min(end, 4.0 * std::max(hi, t));
      s += gauss(lo, hi);
    }
    return s;
  };
  // t = h x^{1/e} removes the endpoint singularity
  auto outer = [&](double x) {
    if (x >= 1.0) return 0.0;
    // bounded in x with a finite limit at t = 0, so freeze it below a relative gap of 1e-12
    const double t = std::max(h * std::pow(std::max(x, 0.0), 1.0 / e), 1e-12 * h);
    if (t >= h) return 0.0;
    return std::pow(t, 1.0 + sp) * inner(t);
  };
  return 2.0 * std::pow(h, e) / e * quad::tanh_sinh(outer, 0.0, 1.0, tol);
}

struct CellGeometry {
  int n;
  double sigma, p, scale;  // scale = multiplier * |S^{n-1}|
};

template <class Sink>
void emit_cell(const RadialMesh& mesh, const CellGeometry& G, const KernelOptions& o, int I, double DI,
               const std::vector<double>& tail_samples, double last_tail, Sink&& sink) {
  const int M = mesh.M();
  const int n = G.n;
  const double hI = mesh.h(I);
  EnergyItem it;

  // same cell: exact for linear u, |u'|^p D_I
  it.len = 2;
  it.node = {I, I + 1, 0, 0};
  it.c = {-1.0, 1.0, 0, 0};
  it.w = G.scale * DI / std::pow(hI, G.p);
  sink(it);

  // adjacent cell: layers toward the shared node
  if (I + 1 < M) {
    const double rc = mesh.r(I + 1), h1 = hI, h2 = mesh.h(I + 1);
    const auto& g = quad::gauss01(o.adjacent_gauss);
    const int L = o.adjacent_levels;
    it.len = 3;
    it.node = {I, I + 1, I + 2, 0};
    for (int l1 = 0; l1 <= L; ++l1) {
      const double a1 = l1 == L ? 0.0 : h1 * std::ldexp(1.0, -l1 - 1), b1 = h1 * std::ldexp(1.0, -std::min(l1, L));
      for (int l2 = 0; l2 <= L; ++l2) {
        const double a2 = l2 == L ? 0.0 : h2 * std::ldexp(1.0, -l2 - 1), b2 = h2 * std::ldexp(1.0, -std::min(l2, L));
        for (std::size_t i = 0; i < g.x.size(); ++i) {
          const double d1 = a1 + (b1 - a1) * g.x[i], W1 = (b1 - a1) * g.w[i];
          const double r = rc - d1;
          for (std::size_t j = 0; j < g.x.size(); ++j) {
            const double d2 = a2 + (b2 - a2) * g.x[j], W2 = (b2 - a2) * g.w[j];
            const double rho = rc + d2;
            const double k = angular_kernel_gap(n, G.sigma, r, rho, d1 + d2);
            it.c = {d1 / h1, -d1 / h1 + d2 / h2, -d2 / h2, 0};
            it.w = G.scale * 2.0 * W1 * W2 * k * std::pow(r * rho, n - 1);
            sink(it);
          }
        }
      }
    }
  }

  // well separated cells: tensor Gauss
  {
    const auto& g = quad::gauss01(o.far_gauss);
    it.len = 4;
    for (int J = I + 2; J < M; ++J) {
      const double hJ = mesh.h(J);
      it.node = {I, I + 1, J, J + 1};
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double r = mesh.r(I) + hI * g.x[i];
        for (std::size_t j = 0; j < g.x.size(); ++j) {
          const double rho = mesh.r(J) + hJ * g.x[j];
          const double k = angular_kernel_gap(n, G.sigma, r, rho, rho - r);
          it.c = {1.0 - g.x[i], g.x[i], -(1.0 - g.x[j]), -g.x[j]};
          it.w = G.scale * 2.0 * hI * g.w[i] * hJ * g.w[j] * k * std::pow(r * rho, n - 1);
          sink(it);
        }
      }
    }
  }

  // exterior interaction
  if (I < M - 1) {
    const auto& g = quad::gauss01(o.tail_gauss);
    it.len = 2;
    it.node = {I, I + 1, 0, 0};
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double r = mesh.r(I) + hI * g.x[i];
      it.c = {1.0 - g.x[i], g.x[i], 0, 0};
      it.w = G.scale * 2.0 * hI * g.w[i] * tail_samples[i] * std::pow(r, n - 1);
      sink(it);
    }
  } else {
    it.len = 1;
    it.node = {I, 0, 0, 0};
    it.c = {1.0, 0, 0, 0};
    it.w = G.scale * 2.0 * last_tail;
    sink(it);
  }
}

}  // namespace

KernelTable::KernelTable(const ProblemSpec& spec, MeshPtr mesh, KernelOptions opts)
    : spec_(spec), mesh_(std::move(mesh)), opts_(opts) {
  check_kernel_args(spec_.n, spec_.p, spec_.s);
  if (!(spec_.n > spec_.s * spec_.p)) throw DomainError("kernel: requires n > s p");
  if (mesh_->dim() != spec_.n) throw MeshMismatch("kernel: mesh dimension differs from problem dimension");
  if (mesh_->M() < 2) throw MeshTooCoarse("kernel: mesh needs at least 2 cells");
  assemble();
}

void KernelTable::assemble() {
  const int n = spec_.n, M = mesh_->M();
  const double p = spec_.p, sigma = n + spec_.s * p;
  if (spec_.normalization == Normalization::bbm) {
    constant_ = bbm_constant(n, p, spec_.s);
    multiplier_ = std::pow(constant_, p);
  } else {
    constant_ = dominated_constant(n, p, spec_.s);
    multiplier_ = constant_;
  }
  quadratic_ = p == 2.0;
  const CellGeometry G{n, sigma, p, multiplier_ * sphere_area(n)};
  const RadialMesh& mesh = *mesh_;

  detail::ExceptionSink errs;
  kmat_ = Eigen::MatrixXd::Zero(M + 1, M + 1);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i <= M; ++i)
    errs.run([&] {
      for (int j = i + 1; j <= M; ++j) kmat_(i, j) = angular_kernel(n, sigma, mesh.r(i), mesh.r(j));
    });
  errs.rethrow();
  for (int i = 0; i <= M; ++i)
    for (int j = i + 1; j <= M; ++j) kmat_(j, i) = kmat_(i, j);

  tail_.assign(M, 0.0);
  diag_.assign(M, 0.0);
  const auto& gt = quad::gauss01(opts_.tail_gauss);
  std::vector<std::vector<double>> tail_samples(M, std::vector<double>(gt.x.size(), 0.0));
  double last_tail = 0.0;
#pragma omp parallel for schedule(dynamic, 1)
  for (int I = 0; I < M; ++I)
    errs.run([&] {
      tail_[I] = tail_weight(n, sigma, mesh.r(I));
      diag_[I] = same_cell_moment(n, sigma, p, mesh.r(I), mesh.r(I + 1), opts_.cell_tol);
      if (I < M - 1)
        for (std::size_t k = 0; k < gt.x.size(); ++k)
          tail_samples[I][k] = tail_weight(n, sigma, mesh.r(I) + mesh.h(I) * gt.x[k]);
    });
  errs.rethrow();
  {
    // int over the last cell of ((1-r)/h)^p T(r) r^{n-1}, with y = (1-r)/h
    const double h = mesh.h(M - 1);
    auto f = [&](double y) {
      // behaves like y^{p - sp}; the strip below 1e-12 is negligible and T overflows there
      if (y < 1e-12 || y >= 1.0) return 0.0;
      return std::pow(y, p) * tail_weight_complement(n, sigma, h * y) * std::pow(1.0 - h * y, n - 1);
    };
    last_tail = h * quad::tanh_sinh(f, 0.0, 1.0, 1e-10);
  }

  const int nthreads = omp_get_max_threads();
  if (quadratic_) {
    std::vector<Eigen::MatrixXd> partial(nthreads);
#pragma omp parallel
    {
      const int tid = omp_get_thread_num();
      Eigen::MatrixXd& Qt = partial[tid];
      Qt = Eigen::MatrixXd::Zero(M, M);
      auto sink = [&](const EnergyItem& it) {
        for (int a = 0; a < it.len; ++a) {
          if (it.node[a] >= M) continue;
          for (int b = 0; b < it.len; ++b) {
            if (it.node[b] >= M) continue;
            Qt(it.node[a], it.node[b]) += it.w * it.c[a] * it.c[b];
          }
        }
      };
#pragma omp for schedule(static)
      for (int I = 0; I < M; ++I)
        errs.run([&] { emit_cell(mesh, G, opts_, I, diag_[I], tail_samples[I], last_tail, sink); });
    }
    errs.rethrow();
    Q_ = Eigen::MatrixXd::Zero(M, M);
    for (auto& Qt : partial)
      if (Qt.size()) Q_ += Qt;
    Q_ = 0.5 * (Q_ + Q_.transpose()).eval();
  } else {
    std::vector<std::vector<EnergyItem>> partial(nthreads);
#pragma omp parallel
    {
      auto& out = partial[omp_get_thread_num()];
      auto sink = [&](EnergyItem it) {
        int k = 0;
        for (int a = 0; a < it.len; ++a)
          if (it.node[a] < M) {
            it.node[k] = it.node[a];
            it.c[k] = it.c[a];
            ++k;
          }
        it.len = k;
        if (k) out.push_back(it);
      };
#pragma omp for schedule(static)
      for (int I = 0; I < M; ++I)
        errs.run([&] { emit_cell(mesh, G, opts_, I, diag_[I], tail_samples[I], last_tail, sink); });
    }
    errs.rethrow();
    for (auto& v : partial) items_.insert(items_.end(), v.begin(), v.end());
  }
}

void KernelTable::check_mesh(const MeshPtr& m) const {
  if (!m || m->hash() != mesh_->hash()) throw MeshMismatch("field and kernel table live on different meshes");
}

double KernelTable::energy(const Eigen::VectorXd& u) const {
  const int M = mesh_->M();
  if (u.size() != M + 1) throw MeshMismatch("field length does not match kernel table");
  if (quadratic_) {
    const auto v = u.head(M);
    return v.dot(Q_ * v);
  }
  const double p = spec_.p;
  double sum = 0.0;
  for (const auto& it : items_) {
    double d = 0.0;
    for (int a = 0; a < it.len; ++a) d += it.c[a] * u[it.node[a]];
    sum += it.w * std::pow(std::fabs(d), p);
  }
  return sum;
}

Eigen::VectorXd KernelTable::energy_gradient(const Eigen::VectorXd& u) const {
  const int M = mesh_->M();
  if (u.size() != M + 1) throw MeshMismatch("field length does not match kernel table");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(M + 1);
  if (quadratic_) {
    g.head(M) = 2.0 * (Q_ * u.head(M));
    return g;
  }
  const double p = spec_.p;
  for (const auto& it : items_) {
    double d = 0.0;
    for (int a = 0; a < it.len; ++a) d += it.c[a] * u[it.node[a]];
    if (d == 0.0) continue;
    const double f = it.w * p * std::pow(std::fabs(d), p - 2.0) * d;
    for (int a = 0; a < it.len; ++a) g[it.node[a]] += f * it.c[a];
  }
  return g;
}

std::string KernelTable::cache_key() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "kernel:v1;n=%d;s=%.17g;p=%.17g;norm=%s;mesh=%s;%s", spec_.n, spec_.s, spec_.p,
                to_string(spec_.normalization).c_str(), mesh_->hash().c_str(), opts_.key().c_str());
  return sha256_hex(buf).substr(0, 24);
}

namespace {

template <class T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void get(std::ifstream& f, T& v) {
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void KernelTable::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write kernel cache " + path);
  const std::string key = cache_key();
  const std::uint64_t klen = key.size();
  put(f, klen);
  f.write(key.data(), key.size());
  put(f, constant_);
  put(f, multiplier_);
  const std::int64_t M = mesh_->M();
  put(f, M);
  f.write(reinterpret_cast<const char*>(kmat_.data()), sizeof(double) * kmat_.size());
  f.write(reinterpret_cast<const char*>(tail_.data()), sizeof(double) * tail_.size());
  f.write(reinterpret_cast<const char*>(diag_.data()), sizeof(double) * diag_.size());
  const std::uint8_t quad = quadratic_;
  put(f, quad);
  if (quadratic_) {
    f.write(reinterpret_cast<const char*>(Q_.data()), sizeof(double) * Q_.size());
  } else {
    const std::uint64_t cnt = items_.size();
    put(f, cnt);
    f.write(reinterpret_cast<const char*>(items_.data()), sizeof(EnergyItem) * items_.size());
  }
  if (!f) throw IoError("failed writing kernel cache " + path);
}

std::shared_ptr<KernelTable> KernelTable::load(const std::string& path, const ProblemSpec& spec, MeshPtr mesh,
                                               const KernelOptions& opts) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return nullptr;
  std::shared_ptr<KernelTable> kt(new KernelTable());
  kt->spec_ = spec;
  kt->mesh_ = std::move(mesh);
  kt->opts_ = opts;
  std::uint64_t klen = 0;
  get(f, klen);
  if (klen > 256) return nullptr;
  std::string key(klen, '\0');
  f.read(key.data(), klen);
  if (!f || key != kt->cache_key()) return nullptr;
  get(f, kt->constant_);
  get(f, kt->multiplier_);
  std::int64_t M = 0;
  get(f, M);
  if (M != kt->mesh_->M()) return nullptr;
  kt->kmat_.resize(M + 1, M + 1);
  f.read(reinterpret_cast<char*>(kt->kmat_.data()), sizeof(double) * kt->kmat_.size());
  kt->tail_.resize(M);
  f.read(reinterpret_cast<char*>(kt->tail_.data()), sizeof(double) * M);
  kt->diag_.resize(M);
  f.read(reinterpret_cast<char*>(kt->diag_.data()), sizeof(double) * M);
  std::uint8_t quad = 0;
  get(f, quad);
  kt->quadratic_ = quad != 0;
  if (kt->quadratic_) {
    kt->Q_.resize(M, M);
    f.read(reinterpret_cast<char*>(kt->Q_.data()), sizeof(double) * kt->Q_.size());
  } else {
    std::uint64_t cnt = 0;
    get(f, cnt);
    kt->items_.resize(cnt);
    f.read(reinterpret_cast<char*>(kt->items_.data()), sizeof(EnergyItem) * cnt);
  }
  if (!f) return nullptr;
  return kt;
}

std::shared_ptr<const KernelTable> KernelTable::build_cached(const ProblemSpec& spec, MeshPtr mesh,
                                                             KernelOptions opts) {
  const char* dir = std::getenv("HENON_CACHE_DIR");
  if (!dir || !*dir) return std::make_shared<const KernelTable>(spec, std::move(mesh), opts);
  auto fresh = std::shared_ptr<KernelTable>(new KernelTable());
  fresh->spec_ = spec;
  fresh->mesh_ = mesh;
  fresh->opts_ = opts;
  const std::string path = (std::filesystem::path(dir) / ("kernel_" + fresh->cache_key() + ".bin")).string();
  if (auto kt = load(path, spec, mesh, opts)) return kt;
  auto kt = std::make_shared<const KernelTable>(spec, mesh, opts);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  kt->save(path);
  return kt;
}

}  // namespace henon
