#pragma once

#include <functional>
#include <vector>

namespace henon::quad {

// Gauss-Legendre rule mapped to [0,1].
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

const Rule& gauss01(int points);  // points in [1,10] or 16 or 20

using Fn = std::function<double(double)>;

// adaptive Gauss-Kronrod (21 points), relative tolerance
double gk(const Fn& f, double a, double b, double tol = 1e-10, unsigned depth = 18);
// tanh-sinh, suited to endpoint singularities
double tanh_sinh(const Fn& f, double a, double b, double tol = 1e-10);

}  // namespace henon::quad
