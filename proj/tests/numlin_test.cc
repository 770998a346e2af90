#include "rdo/numlin.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "instances.h"
#include "random_instances.h"

namespace rdo {
namespace {

using namespace rdo::testing;

// sum_k (G^T)^k G^k, truncated once terms fall below 1e-18.
MatrixXd lyapunov_series(const MatrixXd& G) {
  MatrixXd M = MatrixXd::Zero(G.rows(), G.cols());
  MatrixXd P = MatrixXd::Identity(G.rows(), G.cols());
  for (int k = 0; k < 100000; ++k) {
    const MatrixXd term = P.transpose() * P;
    M += term;
    if (term.norm() < 1e-18) break;
    P = G * P;
  }
  return M;
}

TEST(SpectralRadius, KnownMatrices) {
  MatrixXd R(2, 2);
  R << 0.8, 0.6, -0.6, 0.8;
  EXPECT_NEAR(spectral_radius(R), 1.0, 1e-14);
  EXPECT_EQ(spectral_radius(MatrixXd::Zero(3, 3)), 0.0);
  MatrixXd J(2, 2);
  J << 0.5, 1, 0, 0.5;
  EXPECT_NEAR(spectral_radius(J), 0.5, 1e-12);
  EXPECT_THROW(spectral_radius(MatrixXd::Zero(2, 3)), Error);
}

TEST(SpectralRadius, Homogeneous) {
  std::mt19937 rng(1);
  for (int t = 0; t < 50; ++t) {
    const MatrixXd G = random_matrix_with_radius(rng, 3, 0.7);
    for (double beta : {0.25, 3.0}) {
      EXPECT_NEAR(spectral_radius(beta * G), beta * spectral_radius(G), 1e-12 * beta);
    }
  }
}

TEST(Lyapunov, ResidualOnRandomStableMatrices) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> rho(0.0, 0.95);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 5;
    const MatrixXd G = random_matrix_with_radius(rng, n, rho(rng));
    const MatrixXd M = solve_discrete_lyapunov(G);
    const MatrixXd residual = G.transpose() * M * G - M + MatrixXd::Identity(n, n);
    EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-8 * n) << "trial " << t;
    EXPECT_TRUE(M.isApprox(M.transpose(), 1e-14));
  }
}

TEST(Lyapunov, MatchesSeries) {
  std::mt19937 rng(3);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd G = random_matrix_with_radius(rng, 3, 0.6);
    const MatrixXd M = solve_discrete_lyapunov(G);
    EXPECT_TRUE(M.isApprox(lyapunov_series(G), 1e-9)) << "trial " << t;
  }
}

TEST(Lyapunov, ClosedFormAndErrors) {
  EXPECT_TRUE(solve_discrete_lyapunov(0.5 * MatrixXd::Identity(2, 2))
                  .isApprox(MatrixXd::Identity(2, 2) / 0.75, 1e-14));
  try {
    solve_discrete_lyapunov(MatrixXd::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableDynamics);
  }
}

TEST(Gershgorin, BoundsLargestEigenvalue) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 6;
    MatrixXd S = MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
    S = 0.5 * (S + S.transpose().eval());
    const double lmax = Eigen::SelfAdjointEigenSolver<MatrixXd>(S).eigenvalues().maxCoeff();
    EXPECT_GE(gershgorin_lambda_max(S), lmax - 1e-12) << "trial " << t;
  }
  EXPECT_DOUBLE_EQ(gershgorin_lambda_max(Eigen::Vector3d(1, 4, 2).asDiagonal().toDenseMatrix()),
                   4.0);
}

TEST(Products, LexicographicWords) {
  const Dynamics dyn(switched_pair(1.0));
  const auto words = enumerate_products(dyn, 3);
  ASSERT_EQ(words.size(), 8u);
  for (std::size_t idx = 0; idx < words.size(); ++idx) {
    const std::vector<int> expected{static_cast<int>(idx >> 2) & 1, static_cast<int>(idx >> 1) & 1,
                                    static_cast<int>(idx) & 1};
    EXPECT_EQ(words[idx].indices, expected);
    const MatrixXd P = dyn[expected[0]] * dyn[expected[1]] * dyn[expected[2]];
    EXPECT_TRUE(words[idx].matrix.isApprox(P, 1e-14));
  }
  EXPECT_EQ(enumerate_products(dyn, 0).size(), 1u);
}

TEST(Products, UpToLevelsAndCap) {
  const Dynamics dyn(switched_pair(1.0));
  const auto levels = enumerate_products_up_to(dyn, 4);
  ASSERT_EQ(levels.size(), 5u);
  for (int k = 0; k <= 4; ++k) EXPECT_EQ(levels[k].size(), std::size_t{1} << k);
  Options opts;
  opts.limits.product_cap = 8;
  EXPECT_NO_THROW(enumerate_products(dyn, 3, opts));
  try {
    enumerate_products(dyn, 4, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProductCapExceeded);
  }
}

TEST(SpectralNorm, MatchesGramEigenvalue) {
  std::mt19937 rng(5);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd G = random_matrix_with_radius(rng, 3, 1.0);
    const MatrixXd gram = G.transpose() * G;
    const double expected =
        std::sqrt(Eigen::SelfAdjointEigenSolver<MatrixXd>(gram).eigenvalues().maxCoeff());
    EXPECT_NEAR(spectral_norm(G), expected, 1e-12 * (1 + expected));
  }
}

TEST(FlooredInverse, InvertsWellConditionedAndFloorsSingular) {
  MatrixXd S(2, 2);
  S << 2, 1, 1, 3;
  EXPECT_TRUE(floored_inverse(S, 1e-8).isApprox(S.inverse(), 1e-12));
  const MatrixXd singular = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  const MatrixXd inv = floored_inverse(singular, 1e-8);
  EXPECT_TRUE(inv.allFinite());
  EXPECT_NEAR(inv(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(inv(1, 1), 1.0 / (1e-8 * 0.5), 1e-3);
  EXPECT_NEAR(min_eigenvalue(S), (5.0 - std::sqrt(5.0)) / 2.0, 1e-12);
}

}  // namespace
}  // namespace rdo
