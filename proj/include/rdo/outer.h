#pragma once

// Polyhedral outer approximations
//   S_r = {x | A G_w x <= b for every word w of length <= r}
// and the lower bounds, termination test and step bound built on them.

#include <optional>

#include "rdo/core.h"
#include "rdo/solverapi.h"

namespace rdo {

struct OuterLevel {
  int r = 0;
  Polytope constraints;  // stacked A G_w rows, words grouped by length
  SolveStatus status = SolveStatus::kNumericalError;
  std::optional<double> lower;  // -inf when the LP is unbounded
  std::optional<VectorXd> argmin;
};

struct StepBound {
  MatrixXd M;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double gamma = 0.0;
  int r_bar = 0;
};

struct CoordinateBox {
  VectorXd lower;
  VectorXd upper;
};

// S_r as a single polytope, m * sum_{k<=r} s^k rows.
Polytope outer_set(const RdoInstance& inst, int r, const Options& opts = {});

// Per-coordinate extent of P from 2n LPs. Unbounded directions are +-inf.
// Throws EmptyPolytope when P is empty.
CoordinateBox coordinate_box(const Polytope& p, const Options& opts = {});

bool check_bounded(const Polytope& p, const Options& opts = {});
bool check_origin_interior(const Polytope& p);

OuterLevel lower_bound(const RdoInstance& inst, int r, const Options& opts = {});

// True when every row of every word of length r+1 is implied on S_r, i.e.
// S_r = S_{r+1}.
bool fixed_point_reached(const RdoInstance& inst, int r, const Options& opts = {});

// 64 for a single matrix, 12 for switched dynamics.
int default_r_max(const RdoInstance& inst);

// Levels r = 0..r_max until the first fixed point.
BoundLedger solve_outer(const RdoInstance& inst, int r_max, const Options& opts = {});

// min b_i^2 / (a_i^T M^-1 a_i): the largest level with {x^T M x <= alpha} inside P.
double inscribed_level(const MatrixXd& M, const Polytope& p);

// sum_ij max |M_ij| * |corner products| over the coordinate box; bounds x^T M x on P.
double circumscribed_level(const MatrixXd& M, const CoordinateBox& box);

StepBound convergence_bound(const RdoInstance& inst, const Options& opts = {});
StepBound convergence_bound_fixed_rho(const RdoInstance& inst, double rho_star,
                                      const Options& opts = {});

}  // namespace rdo
