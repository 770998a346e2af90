#pragma once

#include <cstddef>
#include <vector>

#include "rdo/core.h"

namespace rdo {

// A word sigma_1 ... sigma_k over {0..s-1} and the product G_{sigma_1} ... G_{sigma_k}.
struct ProductWord {
  std::vector<int> indices;
  MatrixXd matrix;
};

// Maximum eigenvalue modulus, from a dense real Schur decomposition.
double spectral_radius(const MatrixXd& G);

// Unique symmetric M with G^T M G - M = -I. Throws UnstableDynamics when
// rho(G) >= 1 - 1e-9.
MatrixXd solve_discrete_lyapunov(const MatrixXd& G);

// max_i (M_ii + sum_{j != i} |M_ij|), an upper bound on lambda_max(M).
double gershgorin_lambda_max(const MatrixXd& M);

// All s^k words of length k in lexicographic order (k = 0 gives the identity).
std::vector<ProductWord> enumerate_products(const Dynamics& dyn, int k, const Options& opts = {});

// Every word of length 0..r, grouped by length; the caps apply per level.
std::vector<std::vector<ProductWord>> enumerate_products_up_to(const Dynamics& dyn, int r,
                                                               const Options& opts = {});

// Spectral norm (largest singular value).
double spectral_norm(const MatrixXd& G);

// Smallest eigenvalue of the symmetric part.
double min_eigenvalue(const MatrixXd& S);

// Inverse of a symmetric positive (semi)definite matrix with eigenvalues
// floored at eps * trace / n.
MatrixXd floored_inverse(const MatrixXd& S, double eps);

}  // namespace rdo
