#include "henon/quadrature.hpp"

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <mutex>
#include <stdexcept>

namespace henon::quad {

namespace {

template <int N>
Rule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  Rule r;
  // boost stores the nonnegative half; a zero abscissa appears first when N is odd
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(0.5 * w[i]);
      continue;
    }
    r.x.push_back(0.5 * (1.0 - a[i]));
    r.w.push_back(0.5 * w[i]);
    r.x.push_back(0.5 * (1.0 + a[i]));
    r.w.push_back(0.5 * w[i]);
  }
  return r;
}

}  // namespace

const Rule& gauss01(int points) {
  static const std::array<Rule, 11> small = {Rule{},          make_rule<1>(), make_rule<2>(),
                                             make_rule<3>(),  make_rule<4>(), make_rule<5>(),
                                             make_rule<6>(),  make_rule<7>(), make_rule<8>(),
                                             make_rule<9>(),  make_rule<10>()};
  static const Rule r16 = make_rule<16>();
  static const Rule r20 = make_rule<20>();
  if (points >= 1 && points <= 10) return small[points];
  if (points == 16) return r16;
  if (points == 20) return r20;
  throw std::invalid_argument("unsupported Gauss rule size");
}

double gk(const Fn& f, double a, double b, double tol, unsigned depth) {
  if (a == b) return 0.0;
  // boost compares an unscaled error estimate against a scaled tolerance, so map to [-1,1] first
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  auto g = [&](double x) { return f(mid + half * x); };
  return half * boost::math::quadrature::gauss_kronrod<double, 21>::integrate(g, -1.0, 1.0, depth, tol);
}

double tanh_sinh(const Fn& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  return ts.integrate(f, a, b, tol);
}

}  // namespace henon::quad
