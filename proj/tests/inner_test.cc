#include "rdo/inner.h"

#include <cmath>
#include <random>
#include <variant>

#include <gtest/gtest.h>

#include "instances.h"
#include "random_instances.h"
#include "rdo/numlin.h"
#include "rdo/outer.h"

namespace rdo {
namespace {

using namespace rdo::testing;

RdoInstance with_dynamics(const RdoInstance& base, MatrixXd G) {
  return RdoInstance{base.c, base.polytope, Dynamics(std::move(G)), base.name, std::nullopt};
}

// Points of the box [-R, R]^n drawn uniformly.
VectorXd uniform_point(std::mt19937& rng, int n, double R) {
  std::uniform_real_distribution<double> u(-R, R);
  return VectorXd::NullaryExpr(n, [&] { return u(rng); });
}

bool in_level_set(const VectorXd& x, const RdoInstance& inst, const Ellipsoid& E, int r,
                  double tol) {
  const MatrixXd& G = inst.dynamics[0];
  VectorXd y = x;
  for (int k = 0; k < r; ++k) {
    if (inst.polytope.violation(y) > tol) return false;
    y = G * y;
  }
  return y.dot(E.M * y) <= E.alpha + tol;
}

TEST(DefaultEllipsoid, ZeroDynamicsGivesUnitDisk) {
  const RdoInstance inst = with_dynamics(rotation_square(), MatrixXd::Zero(2, 2));
  const Ellipsoid E = default_invariant_ellipsoid(inst);
  EXPECT_TRUE(E.M.isApprox(MatrixXd::Identity(2, 2), 1e-12));
  EXPECT_NEAR(E.alpha, 1.0, 1e-12);
}

TEST(DefaultEllipsoid, HalfIdentityClosedForm) {
  // M = I / (1 - 1/4); the largest disk in ||x||_inf <= 2 has radius 2.
  RdoInstance inst = make_instance(box_A(), 2.0 * VectorXd::Ones(4), Eigen::Vector2d(1, 0),
                                   {0.5 * MatrixXd::Identity(2, 2)}, "half");
  const Ellipsoid E = default_invariant_ellipsoid(inst);
  EXPECT_TRUE(E.M.isApprox(MatrixXd::Identity(2, 2) / 0.75, 1e-12));
  EXPECT_NEAR(E.alpha, 4.0 / 0.75, 1e-12);
  EXPECT_NO_THROW(validate_invariant_ellipsoid(E, inst));
}

TEST(DefaultEllipsoid, SpiralPassesInvarianceAndContainment) {
  const RdoInstance inst = spiral_quadrilateral();
  const Ellipsoid E = default_invariant_ellipsoid(inst);
  const MatrixXd& G = inst.dynamics[0];
  EXPECT_GE(min_eigenvalue(E.M - G.transpose() * E.M * G), 0.0);
  const MatrixXd Minv = E.M.inverse();
  double tightest = 0.0;
  for (int i = 0; i < inst.polytope.rows(); ++i) {
    const VectorXd a = inst.polytope.A().row(i).transpose();
    const double reach = std::sqrt(E.alpha * a.dot(Minv * a)) / inst.polytope.b()(i);
    EXPECT_LE(reach, 1.0 + 1e-12);
    tightest = std::max(tightest, reach);
  }
  EXPECT_NEAR(tightest, 1.0, 1e-12);
}

TEST(DefaultEllipsoid, Errors) {
  try {
    default_invariant_ellipsoid(saddle_square());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableDynamics);
  }
  try {
    default_invariant_ellipsoid(unit_box_corner());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOriginNotInterior);
  }
}

TEST(ValidateEllipsoid, RejectsOversizedAndNonInvariant) {
  const RdoInstance inst = rotation_square();
  try {
    validate_invariant_ellipsoid(Ellipsoid(MatrixXd::Identity(2, 2), 1.5), inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInvariantSet);
  }
  // A flat ellipse is not invariant under a rotation.
  const Ellipsoid flat(Eigen::Vector2d(1.0, 4.0).asDiagonal().toDenseMatrix(), 1.0);
  EXPECT_THROW(validate_invariant_ellipsoid(flat, inst), Error);
  EXPECT_NO_THROW(validate_invariant_ellipsoid(Ellipsoid(MatrixXd::Identity(2, 2), 1.0), inst));
}

TEST(InnerQp, LevelZeroIsTheEllipsoidMinimum) {
  const RdoInstance inst = spiral_quadrilateral();
  const Ellipsoid E = default_invariant_ellipsoid(inst);
  const InnerLevel lvl = inner_bound_qp(inst, E, 0);
  // min c^T x over x^T M x <= alpha is -sqrt(alpha c^T M^-1 c).
  const double expected = -std::sqrt(E.alpha * inst.c.dot(E.M.inverse() * inst.c));
  EXPECT_NEAR(lvl.value, expected, 1e-6);
  EXPECT_NEAR(inst.c.dot(lvl.witness), lvl.value, 1e-9);
  EXPECT_FALSE(lvl.Q.has_value());
}

TEST(InnerQp, SpiralValuesDecreaseTowardTheOptimum) {
  const RdoInstance inst = spiral_quadrilateral();
  const Ellipsoid E = default_invariant_ellipsoid(inst);
  const double optimum = *solve_outer(inst, 64).back().lower;
  double previous = 0.0;
  for (int r = 0; r <= 8; ++r) {
    const InnerLevel lvl = inner_bound_qp(inst, E, r);
    EXPECT_LE(lvl.value, previous + 1e-6) << "r = " << r;
    EXPECT_GE(lvl.value, optimum - 1e-6) << "r = " << r;
    EXPECT_TRUE(in_level_set(lvl.witness, inst, E, r, 1e-6));
    const MembershipVerdict v = membership_by_simulation(lvl.witness, inst, 50, {});
    EXPECT_TRUE(std::holds_alternative<InsideUpTo>(v)) << "r = " << r;
    previous = lvl.value;
  }
}

TEST(InnerQp, TinyBallKeepsWitnessNearOrigin) {
  const RdoInstance inst = spiral_quadrilateral();
  const double radius = 1e-3;
  const Ellipsoid E(MatrixXd::Identity(2, 2), radius * radius);
  // Invariant only if G is a contraction in the 2-norm.
  const RdoInstance contracting = with_dynamics(inst, 0.5 * averaging_contraction());
  const InnerLevel lvl = inner_bound_qp(contracting, E, 0);
  EXPECT_LE(lvl.value, 0.0);
  EXPECT_GE(lvl.value, -inst.c.norm() * radius - 1e-9);
}

TEST(InnerQp, RejectsInvalidEllipsoid) {
  const RdoInstance inst = rotation_square();
  EXPECT_THROW(inner_bound_qp(inst, Ellipsoid(MatrixXd::Identity(2, 2), 4.0), 1), Error);
}

TEST(InnerQp, NestedLevels) {
  const RdoInstance inst = spiral_quadrilateral();
  const Ellipsoid E = default_invariant_ellipsoid(inst);
  std::mt19937 rng(7);
  for (int r = 0; r <= 3; ++r) {
    int sampled = 0;
    while (sampled < 200) {
      const VectorXd x = uniform_point(rng, 2, 3.0);
      if (!in_level_set(x, inst, E, r, 0.0)) continue;
      ++sampled;
      EXPECT_TRUE(in_level_set(x, inst, E, r + 1, 1e-12)) << x.transpose();
    }
  }
}

TEST(InnerSdp, DampedRotationPentagonTable) {
  const RdoInstance inst = damped_rotation_pentagon();
  const InnerLevel r0 = inner_sdp(inst, 0);
  const InnerLevel r1 = inner_sdp(inst, 1);
  EXPECT_NEAR(r0.value, -0.9105, 2e-4);
  EXPECT_NEAR(r1.value, -0.9420, 2e-4);
  // Level one meets the outer bound.
  const double lower = *lower_bound(inst, 1).lower;
  EXPECT_NEAR(r1.value, lower, 1e-5);
}

void expect_sound_level(const RdoInstance& inst, const InnerLevel& lvl) {
  ASSERT_TRUE(lvl.Q.has_value());
  const MatrixXd& Q = *lvl.Q;
  const MatrixXd& G = inst.dynamics[0];
  EXPECT_GE(min_eigenvalue(Q - G * Q * G.transpose()), -1e-8 * Q.trace());
  const Polytope P = normalize_rhs(inst.polytope);
  for (int i = 0; i < P.rows(); ++i) {
    const VectorXd a = P.A().row(i).transpose();
    EXPECT_LE(a.dot(Q * a), 1.0 + 1e-7);
  }
  EXPECT_NEAR(inst.c.dot(lvl.witness), lvl.value, 1e-7);
  const MembershipVerdict v = membership_by_simulation(lvl.witness, inst, 50, {});
  EXPECT_TRUE(std::holds_alternative<InsideUpTo>(v)) << inst.name << " r = " << lvl.r;
}

TEST(InnerSdp, SoundAndMonotoneOnFixedInstances) {
  for (const RdoInstance& inst : {damped_rotation_pentagon(), spiral_quadrilateral()}) {
    const double optimum = *solve_outer(inst, 64).back().lower;
    double previous = 0.0;
    for (int r = 0; r <= 4; ++r) {
      const InnerLevel lvl = inner_sdp(inst, r);
      expect_sound_level(inst, lvl);
      EXPECT_LE(lvl.value, previous + 1e-6) << inst.name << " r = " << r;
      EXPECT_GE(lvl.value, optimum - 1e-6) << inst.name << " r = " << r;
      previous = lvl.value;
    }
  }
}

TEST(InnerSdp, SpiralReachesTheOptimum) {
  const RdoInstance inst = spiral_quadrilateral();
  const double optimum = *solve_outer(inst, 64).back().lower;
  double best = 0.0;
  for (int r = 0; r <= 10; ++r) best = std::min(best, inner_sdp(inst, r).value);
  EXPECT_NEAR(best, optimum, 1e-4);
}

TEST(InnerSdp, MonotoneOnRandomInstances) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const RdoInstance inst = random_stable_instance(rng, n, 0.85);
    double previous = 0.0;
    for (int r = 0; r <= 3; ++r) {
      const InnerLevel lvl = inner_sdp(inst, r);
      expect_sound_level(inst, lvl);
      EXPECT_LE(lvl.value, previous + 1e-6) << "trial " << trial << " r = " << r;
      previous = lvl.value;
    }
    const OuterLevel outer = lower_bound(inst, 3);
    EXPECT_LE(*outer.lower, previous + 1e-6) << "trial " << trial;
  }
}

TEST(InnerSdp, Errors) {
  EXPECT_THROW(inner_sdp(saddle_square(), 0), Error);
  try {
    inner_sdp(unit_box_corner(), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOriginNotInterior);
  }
  EXPECT_THROW(inner_sdp(switched_pentagon(), 0), Error);
}

TEST(SchurPolar, TrivialCase) {
  const RdoInstance inst = with_dynamics(rotation_square(), MatrixXd::Zero(2, 2));
  EXPECT_TRUE(schur_polar_equivalence_check(VectorXd::Zero(2), MatrixXd::Identity(2, 2), inst, 0));
}

TEST(SchurPolar, AgreesOnSampledPairs) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> scale(0.8, 2.0);
  for (const RdoInstance& inst : {spiral_quadrilateral(), damped_rotation_pentagon()}) {
    const Ellipsoid E = default_invariant_ellipsoid(inst);
    for (int r = 0; r <= 2; ++r) {
      for (int trial = 0; trial < 100; ++trial) {
        // Half near M / alpha (scaled either way), half perturbed.
        MatrixXd H = E.M / E.alpha * scale(rng);
        if (trial % 2 == 1) {
          const MatrixXd B = MatrixXd::NullaryExpr(2, 2, [&] { return 0.1 * scale(rng); });
          H += B * B.transpose();
        }
        const VectorXd x = uniform_point(rng, 2, 1.5);
        EXPECT_TRUE(schur_polar_equivalence_check(x, H, inst, r)) << trial;
      }
    }
  }
}

TEST(SchurPolar, ShrunkFormViolatesBothSides) {
  const RdoInstance inst = spiral_quadrilateral();
  const Ellipsoid E = default_invariant_ellipsoid(inst);
  // H scaled down: the ellipsoid grows past P.
  const MatrixXd H = 0.5 * E.M / E.alpha;
  EXPECT_TRUE(schur_polar_equivalence_check(VectorXd::Zero(2), H, inst, 1));
}

}  // namespace
}  // namespace rdo
