#pragma once

#include <random>

#include "instances.h"
#include "rdo/numlin.h"

namespace rdo::testing {

// G with entries ~ U(-1, 1), rescaled to spectral radius rho.
inline MatrixXd random_matrix_with_radius(std::mt19937& rng, int n, double rho) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd G = MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
  const double current = spectral_radius(G);
  if (current < 1e-12) return G;
  return G * (rho / current);
}

// Bounded polytope with the origin in its interior: a box plus random cuts.
inline Polytope random_bounded_polytope(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> rhs(0.5, 2.0);
  std::uniform_int_distribution<int> extra(1, 2 * n);
  const int k = extra(rng);
  MatrixXd A(2 * n + k, n);
  VectorXd b(2 * n + k);
  for (int i = 0; i < n; ++i) {
    A.row(2 * i) = VectorXd::Unit(n, i).transpose();
    A.row(2 * i + 1) = -VectorXd::Unit(n, i).transpose();
    b(2 * i) = rhs(rng);
    b(2 * i + 1) = rhs(rng);
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < n; ++j) A(2 * n + i, j) = u(rng);
    b(2 * n + i) = rhs(rng);
  }
  return Polytope(A, b);
}

inline RdoInstance random_stable_instance(std::mt19937& rng, int n, double rho) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd c = VectorXd::NullaryExpr(n, [&] { return u(rng); });
  return RdoInstance{c, random_bounded_polytope(rng, n),
                     Dynamics(random_matrix_with_radius(rng, n, rho)), "random", std::nullopt};
}

}  // namespace rdo::testing
