#include "rdo/outer.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "instances.h"
#include "random_instances.h"
#include "rdo/numlin.h"

namespace rdo {
namespace {

using namespace rdo::testing;

RdoInstance with_dynamics(const RdoInstance& base, MatrixXd G) {
  return RdoInstance{base.c, base.polytope, Dynamics(std::move(G)), base.name, std::nullopt};
}

TEST(Preconditions, Boundedness) {
  EXPECT_TRUE(check_bounded(rotation_square().polytope));
  EXPECT_FALSE(check_bounded(halfplane().polytope));
  EXPECT_TRUE(check_bounded(unit_box_corner().polytope));
}

TEST(Preconditions, OriginInterior) {
  EXPECT_TRUE(check_origin_interior(rotation_square().polytope));
  EXPECT_FALSE(check_origin_interior(unit_box_corner().polytope));
  EXPECT_TRUE(check_origin_interior(spiral_quadrilateral().polytope));
}

TEST(Preconditions, EmptyPolytopeIsReported) {
  MatrixXd A(2, 1);
  A << 1, -1;
  EXPECT_THROW(check_bounded(Polytope(A, Eigen::Vector2d(-1, -1))), Error);
}

TEST(OuterSet, RowCount) {
  const RdoInstance inst = switched_pentagon();
  EXPECT_EQ(outer_set(inst, 0).rows(), 5);
  EXPECT_EQ(outer_set(inst, 2).rows(), 5 * (1 + 2 + 4));
}

TEST(LowerBound, DampedRotationPentagon) {
  const RdoInstance inst = damped_rotation_pentagon();
  EXPECT_NEAR(*lower_bound(inst, 0).lower, -1.0, 1e-8);
  EXPECT_NEAR(*lower_bound(inst, 1).lower, -0.941987, 1e-5);
}

TEST(LowerBound, SwitchedPentagon) {
  const RdoInstance inst = switched_pentagon();
  EXPECT_NEAR(*lower_bound(inst, 0).lower, -1.333333, 1e-5);
  EXPECT_NEAR(*lower_bound(inst, 1).lower, -0.937445, 1e-5);
  EXPECT_NEAR(*lower_bound(inst, 2).lower, -0.865705, 1e-5);
}

TEST(LowerBound, IdentityDynamicsKeepsP) {
  const RdoInstance inst = with_dynamics(spiral_quadrilateral(), MatrixXd::Identity(2, 2));
  const double base = *lower_bound(inst, 0).lower;
  for (int r = 1; r <= 4; ++r) EXPECT_NEAR(*lower_bound(inst, r).lower, base, 1e-10);
}

TEST(LowerBound, UnboundedIsMarked) {
  RdoInstance inst = halfplane();
  inst.c = Eigen::Vector2d(0.0, 1.0);
  const OuterLevel level = lower_bound(inst, 0);
  EXPECT_EQ(level.status, SolveStatus::kUnbounded);
  ASSERT_TRUE(level.lower.has_value());
  EXPECT_TRUE(std::isinf(*level.lower) && *level.lower < 0.0);
}

TEST(FixedPoint, SpiralQuadrilateral) {
  const RdoInstance inst = spiral_quadrilateral();
  EXPECT_FALSE(fixed_point_reached(inst, 1));
  EXPECT_TRUE(fixed_point_reached(inst, 2));
  EXPECT_TRUE(fixed_point_reached(inst, 3));
}

TEST(FixedPoint, RotationNeverTerminates) {
  const RdoInstance inst = rotation_square();
  for (int r = 0; r <= 16; ++r) EXPECT_FALSE(fixed_point_reached(inst, r)) << "r = " << r;
}

TEST(SolveOuter, SpiralReachesFixedPoint) {
  const BoundLedger ledger = solve_outer(spiral_quadrilateral(), 64);
  ASSERT_EQ(ledger.rows().size(), 3u);
  EXPECT_EQ(ledger.back().status, LevelStatus::kFixedPoint);
  EXPECT_EQ(ledger.back().r, 2);
  EXPECT_NEAR(*ledger.back().lower, -1.1491935, 1e-6);
  const std::vector<double> expected{-4.0, -1.875, -1.1491935};
  for (int r = 0; r < 3; ++r) EXPECT_NEAR(*ledger.rows()[r].lower, expected[r], 1e-6);
}

TEST(SolveOuter, ZeroDynamicsStopsImmediately) {
  const RdoInstance inst = with_dynamics(rotation_square(), MatrixXd::Zero(2, 2));
  const BoundLedger ledger = solve_outer(inst, 10);
  ASSERT_EQ(ledger.rows().size(), 1u);
  EXPECT_EQ(ledger.back().status, LevelStatus::kFixedPoint);
}

TEST(SolveOuter, SaddleHitsLevelCap) {
  const BoundLedger ledger = solve_outer(saddle_square(2.0), 8);
  EXPECT_EQ(ledger.back().status, LevelStatus::kLevelCapReached);
  EXPECT_EQ(ledger.back().r, 8);
}

TEST(SolveOuter, LowerBoundsNondecreasing) {
  const BoundLedger ledger = solve_outer(switched_pentagon(), 4);
  for (std::size_t i = 1; i < ledger.rows().size(); ++i) {
    EXPECT_GE(*ledger.rows()[i].lower, *ledger.rows()[i - 1].lower);
  }
}

TEST(SolveOuter, NestedArgmins) {
  // The level r+1 minimizer is feasible for level r.
  const RdoInstance inst = switched_pentagon();
  for (int r = 0; r < 4; ++r) {
    const OuterLevel next = lower_bound(inst, r + 1);
    EXPECT_TRUE(outer_set(inst, r).contains(*next.argmin, 1e-7));
  }
}

TEST(StepBound, ZeroDynamicsClosedForm) {
  const RdoInstance inst = with_dynamics(rotation_square(), MatrixXd::Zero(2, 2));
  const StepBound sb = convergence_bound(inst);
  EXPECT_TRUE(sb.M.isApprox(MatrixXd::Identity(2, 2)));
  EXPECT_DOUBLE_EQ(sb.gamma, 0.0);
  EXPECT_NEAR(sb.alpha1, 1.0, 1e-12);
  // Only the diagonal of M = I contributes to the box bound.
  EXPECT_NEAR(sb.alpha2, 2.0, 1e-12);
  EXPECT_EQ(sb.r_bar, 1);
  EXPECT_TRUE(fixed_point_reached(inst, sb.r_bar));
}

TEST(StepBound, SpiralBoundIsAFixedPoint) {
  const RdoInstance inst = spiral_quadrilateral();
  const StepBound sb = convergence_bound(inst);
  EXPECT_GT(sb.r_bar, 0);
  EXPECT_TRUE(fixed_point_reached(inst, sb.r_bar));
  // G^T M G <= gamma M
  const MatrixXd& G = inst.dynamics[0];
  EXPECT_GE(min_eigenvalue(sb.gamma * sb.M - G.transpose() * sb.M * G), -1e-8);
}

TEST(StepBound, Preconditions) {
  EXPECT_THROW(
      {
        try {
          convergence_bound(rotation_square());
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kUnstableDynamics);
          throw;
        }
      },
      Error);
  try {
    convergence_bound(unit_box_corner());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOriginNotInterior);
  }
  try {
    convergence_bound(halfplane());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnboundedPolytope);
  }
}

TEST(StepBound, FixedRho) {
  const RdoInstance half = with_dynamics(rotation_square(), 0.5 * MatrixXd::Identity(2, 2));
  const StepBound sb = convergence_bound_fixed_rho(half, 0.6);
  EXPECT_NEAR(sb.gamma, 0.64, 1e-12);
  EXPECT_TRUE(fixed_point_reached(half, sb.r_bar));

  const RdoInstance zero = with_dynamics(rotation_square(), MatrixXd::Zero(2, 2));
  const StepBound z = convergence_bound_fixed_rho(zero, 0.5);
  EXPECT_TRUE(z.M.isApprox(MatrixXd::Identity(2, 2)));
  // ceil(log 2 / log(1 / 0.5625))
  EXPECT_NEAR(z.alpha2, 2.0, 1e-12);
  EXPECT_EQ(z.r_bar, 2);
  EXPECT_TRUE(fixed_point_reached(zero, z.r_bar));

  const RdoInstance fast = with_dynamics(rotation_square(), 0.9 * MatrixXd::Identity(2, 2));
  try {
    convergence_bound_fixed_rho(fast, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRhoStarViolated);
  }
}

TEST(StepBound, RandomInstancesTerminate) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dim(2, 4);
  std::uniform_real_distribution<double> rho(0.1, 0.9);
  for (int trial = 0; trial < 15; ++trial) {
    const RdoInstance inst = random_stable_instance(rng, dim(rng), rho(rng));
    const StepBound sb = convergence_bound(inst);
    EXPECT_TRUE(fixed_point_reached(inst, sb.r_bar)) << "trial " << trial;
  }
}

TEST(FixedPoint, Idempotent) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> rho(0.2, 0.8);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const RdoInstance inst = random_stable_instance(rng, 2, rho(rng));
    for (int r = 0; r <= 30; ++r) {
      if (fixed_point_reached(inst, r)) {
        EXPECT_TRUE(fixed_point_reached(inst, r + 1)) << "trial " << trial;
        ++checked;
        break;
      }
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(ClosedForm, SaddleSquare) {
  const double a = 2.0;
  for (int r = 1; r <= 5; ++r) {
    const double w = std::pow(a, -r);
    auto inside = [&](const VectorXd& x) { return std::abs(x(0)) <= w && std::abs(x(1)) <= 1.0; };
    std::mt19937 rng(r);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    const Polytope Sr = outer_set(saddle_square(a), r);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      // Concentrate half the samples near the thin strip.
      VectorXd x = Eigen::Vector2d(u(rng), u(rng));
      if (k % 2 == 0) x(0) *= 2.0 * w;
      const double m = std::min(w - std::abs(x(0)), 1.0 - std::abs(x(1)));
      if (std::abs(m) < 1e-9) continue;
      if (Sr.contains(x, 1e-12) != inside(x)) ++bad;
    }
    EXPECT_EQ(bad, 0) << "r = " << r;
  }
}

TEST(ClosedForm, UnitBoxCorner) {
  for (int r = 1; r <= 5; ++r) {
    const double w = std::pow(3.0, -r);
    std::mt19937 rng(100 + r);
    std::uniform_real_distribution<double> u(-0.1, 1.1);
    const Polytope Sr = outer_set(unit_box_corner(), r);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      VectorXd x = Eigen::Vector2d(u(rng), u(rng));
      // Half the samples near the diagonal wedge.
      if (k % 2 == 0) x(1) = x(0) * (1.0 + 2.0 * w * (u(rng) - 0.5));
      const double box = std::min({x(0), x(1), 1.0 - x(0), 1.0 - x(1)});
      const double wedge = w * (x(0) + x(1)) - std::abs(x(0) - x(1));
      const double m = std::min(box, wedge);
      if (std::abs(m) < 1e-9) continue;
      if (Sr.contains(x, 1e-12) != (m >= 0.0)) ++bad;
    }
    EXPECT_EQ(bad, 0) << "r = " << r;
  }
}

}  // namespace
}  // namespace rdo
