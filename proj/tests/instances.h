#pragma once

// Small planar instances shared by the test suites.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rdo/core.h"

namespace rdo::testing {

inline RdoInstance make_instance(MatrixXd A, VectorXd b, VectorXd c, std::vector<MatrixXd> Gs,
                                 std::string name) {
  return RdoInstance{std::move(c), Polytope(std::move(A), std::move(b)),
                     Dynamics(std::move(Gs)), std::move(name), std::nullopt};
}

// Quadrilateral x >= -1, y >= -1, y <= 1, x + y <= 3 under a contracting spiral.
inline RdoInstance spiral_quadrilateral() {
  MatrixXd A(4, 2);
  A << -1, 0, 0, -1, 0, 1, 1, 1;
  VectorXd b(4);
  b << 1, 1, 1, 3;
  MatrixXd G(2, 2);
  G << 0.6, -0.4, 0.8, 0.5;
  return make_instance(A, b, Eigen::Vector2d(-1, 0), {G}, "spiral_quadrilateral");
}

inline MatrixXd pentagon_A() {
  MatrixXd A(5, 2);
  A << 1, 0, -1.5, 0, 0, 1, 0, -1, 1, 1;
  return A;
}

// Pentagon under a rotation by pi/6 scaled by 0.8.
inline RdoInstance damped_rotation_pentagon() {
  const double t = std::numbers::pi / 6.0;
  MatrixXd G(2, 2);
  G << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  return make_instance(pentagon_A(), VectorXd::Ones(5), Eigen::Vector2d(-0.5, -1), {0.8 * G},
                       "damped_rotation_pentagon");
}

inline std::vector<MatrixXd> switched_pair(double scale) {
  MatrixXd G1(2, 2), G2(2, 2);
  G1 << -1, -1, -4, 0;
  G2 << 3, 3, -2, 1;
  return {scale * G1, scale * G2};
}

// Same pentagon, two switching generators.
inline RdoInstance switched_pentagon(double scale = 0.254) {
  return make_instance(pentagon_A(), VectorXd::Ones(5), Eigen::Vector2d(0.5, 1),
                       switched_pair(scale), "switched_pentagon");
}

inline MatrixXd box_A() {
  MatrixXd A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  return A;
}

// Exact rotation with rational entries (3-4-5 triangle) on [-1, 1]^2.
inline RdoInstance rotation_square() {
  MatrixXd G(2, 2);
  G << 0.8, 0.6, -0.6, 0.8;
  return make_instance(box_A(), VectorXd::Ones(4), Eigen::Vector2d(1, 1), {G},
                       "rotation_square");
}

// diag(a, 1/a) on [-1, 1]^2.
inline RdoInstance saddle_square(double a = 2.0) {
  MatrixXd G = Eigen::Vector2d(a, 1.0 / a).asDiagonal();
  return make_instance(box_A(), VectorXd::Ones(4), Eigen::Vector2d(1, 1), {G}, "saddle_square");
}

inline MatrixXd averaging_contraction() {
  MatrixXd G(2, 2);
  G << 2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0;
  return 0.5 * G;
}

// [0, 1]^2, origin on the boundary.
inline RdoInstance unit_box_corner() {
  VectorXd b(4);
  b << 1, 0, 1, 0;
  return make_instance(box_A(), b, Eigen::Vector2d(1, 1), {averaging_contraction()},
                       "unit_box_corner");
}

// Half-plane x_1 >= -1.
inline RdoInstance halfplane() {
  MatrixXd A(1, 2);
  A << -1, 0;
  return make_instance(A, VectorXd::Ones(1), Eigen::Vector2d(1, 0), {averaging_contraction()},
                       "halfplane");
}

inline std::vector<MatrixXd> shear_pair(double scale) {
  MatrixXd G1(2, 2), G2(2, 2);
  G1 << 1, 0, 1, 0;
  G2 << 0, 1, 0, -1;
  return {scale * G1, scale * G2};
}

}  // namespace rdo::testing
