#include "rdo/numlin.h"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace rdo {

namespace {
constexpr double kInstabilityMargin = 1e-9;

std::size_t checked_power(int s, int k, std::size_t cap) {
  std::size_t count = 1;
  for (int i = 0; i < k; ++i) {
    count *= static_cast<std::size_t>(s);
    if (count > cap) {
      throw Error(ErrorCode::kProductCapExceeded, std::to_string(s) + "^" + std::to_string(k) +
                                                      " products exceed the cap of " +
                                                      std::to_string(cap));
    }
  }
  return count;
}
}  // namespace

double spectral_radius(const MatrixXd& G) {
  if (G.rows() != G.cols()) throw Error(ErrorCode::kDimensionMismatch, "spectral radius of non-square");
  if (!G.allFinite()) throw Error(ErrorCode::kNonFiniteEntry, "spectral radius input");
  if (G.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> eig(G, /*computeEigenvectors=*/false);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kEigenFailure, "QR iteration did not converge");
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd solve_discrete_lyapunov(const MatrixXd& G) {
  const double rho = spectral_radius(G);
  if (rho >= 1.0 - kInstabilityMargin) {
    throw Error(ErrorCode::kUnstableDynamics, "rho(G) = " + std::to_string(rho));
  }
  const int n = static_cast<int>(G.rows());
  // vec(G^T M G) = (G^T kron G^T) vec(M) in column-major order.
  MatrixXd K = MatrixXd::Identity(n * n, n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) -= G(j, i) * G.transpose();
    }
  }
  const MatrixXd eye = MatrixXd::Identity(n, n);
  const VectorXd rhs = eye.reshaped();
  Eigen::FullPivLU<MatrixXd> lu(K);
  if (!lu.isInvertible()) throw Error(ErrorCode::kSingularSystem, "Kronecker system is singular");
  VectorXd v = lu.solve(rhs);
  if (!v.allFinite()) throw Error(ErrorCode::kSingularSystem, "non-finite Lyapunov solution");
  MatrixXd M = Eigen::Map<MatrixXd>(v.data(), n, n);
  return 0.5 * (M + M.transpose());
}

double gershgorin_lambda_max(const MatrixXd& M) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < M.rows(); ++i) {
    const double radius = M.row(i).cwiseAbs().sum() - std::abs(M(i, i));
    best = std::max(best, M(i, i) + radius);
  }
  return best;
}

std::vector<ProductWord> enumerate_products(const Dynamics& dyn, int k, const Options& opts) {
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "word length must be nonnegative");
  checked_power(dyn.count(), k, opts.limits.product_cap);
  std::vector<ProductWord> level{{{}, MatrixXd::Identity(dyn.dim(), dyn.dim())}};
  for (int len = 0; len < k; ++len) {
    std::vector<ProductWord> next;
    next.reserve(level.size() * dyn.count());
    for (const auto& parent : level) {
      for (int j = 0; j < dyn.count(); ++j) {
        ProductWord w{parent.indices, parent.matrix * dyn[j]};
        w.indices.push_back(j);
        next.push_back(std::move(w));
      }
    }
    level = std::move(next);
  }
  return level;
}

std::vector<std::vector<ProductWord>> enumerate_products_up_to(const Dynamics& dyn, int r,
                                                               const Options& opts) {
  if (r < 0) throw Error(ErrorCode::kInvalidArgument, "level must be nonnegative");
  checked_power(dyn.count(), r, opts.limits.product_cap);
  std::vector<std::vector<ProductWord>> levels;
  levels.push_back({{{}, MatrixXd::Identity(dyn.dim(), dyn.dim())}});
  for (int len = 0; len < r; ++len) {
    std::vector<ProductWord> next;
    next.reserve(levels.back().size() * dyn.count());
    for (const auto& parent : levels.back()) {
      for (int j = 0; j < dyn.count(); ++j) {
        ProductWord w{parent.indices, parent.matrix * dyn[j]};
        w.indices.push_back(j);
        next.push_back(std::move(w));
      }
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

double spectral_norm(const MatrixXd& G) {
  if (G.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(G);
  return svd.singularValues()(0);
}

double min_eigenvalue(const MatrixXd& S) {
  const MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kEigenFailure, "symmetric eigensolver");
  return eig.eigenvalues().minCoeff();
}

MatrixXd floored_inverse(const MatrixXd& S, double eps) {
  const MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kEigenFailure, "symmetric eigensolver");
  const double floor = std::max(eps * std::abs(sym.trace()) / static_cast<double>(sym.rows()),
                                std::numeric_limits<double>::min());
  VectorXd inv = eig.eigenvalues().cwiseMax(floor).cwiseInverse();
  MatrixXd out = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace rdo
