#include "rdo/outer.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdo/numlin.h"

namespace rdo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// max d^T x over p; +inf if unbounded, throws EmptyPolytope if infeasible.
double support(const Polytope& p, const VectorXd& d, const Options& opts) {
  const SolveResult res = solve_dense_lp(p.A(), p.b(), -d, opts);
  switch (res.status) {
    case SolveStatus::kOptimal: return -res.value;
    case SolveStatus::kUnbounded: return kInf;
    case SolveStatus::kInfeasible: throw Error(ErrorCode::kEmptyPolytope, "polytope is empty");
    case SolveStatus::kNumericalError: break;
  }
  throw Error(ErrorCode::kNumericalError, "support LP: " + res.message);
}

int ceil_nonnegative(double v) {
  if (!(v > 0.0)) return 0;
  if (v > 1e9) throw Error(ErrorCode::kNumericalError, "step bound overflows");
  return static_cast<int>(std::ceil(v));
}

void require_bounded_origin_interior(const RdoInstance& inst, const Options& opts) {
  if (!check_bounded(inst.polytope, opts)) {
    throw Error(ErrorCode::kUnboundedPolytope, "P must be bounded");
  }
  if (!check_origin_interior(inst.polytope)) {
    throw Error(ErrorCode::kOriginNotInterior, "every b_i must be positive");
  }
}

StepBound step_bound_from(const MatrixXd& M, const RdoInstance& inst, const Options& opts) {
  StepBound out;
  out.M = M;
  out.alpha1 = inscribed_level(M, inst.polytope);
  out.alpha2 = circumscribed_level(M, coordinate_box(inst.polytope, opts));
  return out;
}

}  // namespace

Polytope outer_set(const RdoInstance& inst, int r, const Options& opts) {
  if (r < 0) throw Error(ErrorCode::kInvalidArgument, "level must be nonnegative");
  const auto levels = enumerate_products_up_to(inst.dynamics, r, opts);
  const MatrixXd& A = inst.polytope.A();
  const VectorXd& b = inst.polytope.b();
  const int m = static_cast<int>(A.rows());
  std::size_t words = 0;
  for (const auto& level : levels) words += level.size();
  MatrixXd stacked(m * static_cast<Eigen::Index>(words), A.cols());
  VectorXd rhs(stacked.rows());
  Eigen::Index row = 0;
  for (const auto& level : levels) {
    for (const auto& w : level) {
      stacked.middleRows(row, m) = A * w.matrix;
      rhs.segment(row, m) = b;
      row += m;
    }
  }
  return Polytope(std::move(stacked), std::move(rhs));
}

CoordinateBox coordinate_box(const Polytope& p, const Options& opts) {
  const int n = p.dim();
  CoordinateBox box{VectorXd(n), VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    const VectorXd e = VectorXd::Unit(n, i);
    box.upper(i) = support(p, e, opts);
    box.lower(i) = -support(p, -e, opts);
  }
  return box;
}

bool check_bounded(const Polytope& p, const Options& opts) {
  const CoordinateBox box = coordinate_box(p, opts);
  return box.lower.allFinite() && box.upper.allFinite();
}

bool check_origin_interior(const Polytope& p) { return (p.b().array() > 0.0).all(); }

OuterLevel lower_bound(const RdoInstance& inst, int r, const Options& opts) {
  OuterLevel out{r, outer_set(inst, r, opts), SolveStatus::kNumericalError, std::nullopt,
                 std::nullopt};
  const SolveResult res =
      solve_dense_lp(out.constraints.A(), out.constraints.b(), inst.c, opts);
  out.status = res.status;
  switch (res.status) {
    case SolveStatus::kOptimal:
      out.lower = res.value;
      out.argmin = res.assignment;
      break;
    case SolveStatus::kUnbounded:
      out.lower = -kInf;
      break;
    case SolveStatus::kInfeasible:
      break;
    case SolveStatus::kNumericalError:
      throw Error(ErrorCode::kNumericalError, "lower-bound LP at r = " + std::to_string(r) +
                                                  ": " + res.message);
  }
  return out;
}

bool fixed_point_reached(const RdoInstance& inst, int r, const Options& opts) {
  const Polytope Sr = outer_set(inst, r, opts);
  const std::vector<ProductWord> next = enumerate_products(inst.dynamics, r + 1, opts);
  const MatrixXd& A = inst.polytope.A();
  const VectorXd& b = inst.polytope.b();
  for (const auto& w : next) {
    const MatrixXd rows = A * w.matrix;
    for (int i = 0; i < rows.rows(); ++i) {
      const double slack = opts.tol.fixed_point * (1.0 + std::abs(b(i)));
      const double top = support(Sr, rows.row(i).transpose(), opts);
      if (top > b(i) + slack) return false;
    }
  }
  return true;
}

int default_r_max(const RdoInstance& inst) { return inst.dynamics.is_switched() ? 12 : 64; }

BoundLedger solve_outer(const RdoInstance& inst, int r_max, const Options& opts) {
  if (r_max < 0) throw Error(ErrorCode::kInvalidArgument, "r_max must be nonnegative");
  BoundLedger ledger(opts.tol.gap);
  for (int r = 0; r <= r_max; ++r) {
    const OuterLevel level = lower_bound(inst, r, opts);
    LedgerRow row;
    row.r = r;
    row.lower = level.lower;
    if (level.argmin) row.witness = level.argmin;
    if (level.status == SolveStatus::kInfeasible) {
      row.status = LevelStatus::kInfeasible;
      ledger.append(std::move(row));
      return ledger;
    }
    bool fixed = false;
    try {
      fixed = fixed_point_reached(inst, r, opts);
    } catch (const Error& e) {
      // Level r+1 is beyond the product cap: the test cannot run.
      if (e.code() != ErrorCode::kProductCapExceeded) throw;
      row.status = LevelStatus::kLevelCapReached;
      ledger.append(std::move(row));
      return ledger;
    }
    if (fixed) {
      row.status = LevelStatus::kFixedPoint;
    } else if (r == r_max) {
      row.status = LevelStatus::kLevelCapReached;
    }
    ledger.append(std::move(row));
    if (fixed) break;
  }
  return ledger;
}

double inscribed_level(const MatrixXd& M, const Polytope& p) {
  const Eigen::LDLT<MatrixXd> ldlt(M);
  double best = kInf;
  for (int i = 0; i < p.rows(); ++i) {
    const VectorXd a = p.A().row(i).transpose();
    const double q = a.dot(ldlt.solve(a));
    if (q <= 0.0) continue;  // zero row: no restriction
    best = std::min(best, p.b()(i) * p.b()(i) / q);
  }
  return best;
}

double circumscribed_level(const MatrixXd& M, const CoordinateBox& box) {
  const auto& l = box.lower;
  const auto& u = box.upper;
  double total = 0.0;
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) {
      const double m = std::abs(M(i, j));
      total += m * std::max({std::abs(u(i) * u(j)), std::abs(l(i) * l(j)),
                             std::abs(u(i) * l(j)), std::abs(l(i) * u(j))});
    }
  }
  return total;
}

StepBound convergence_bound(const RdoInstance& inst, const Options& opts) {
  if (inst.dynamics.is_switched()) {
    throw Error(ErrorCode::kInvalidArgument, "convergence_bound needs a single matrix");
  }
  const MatrixXd M = solve_discrete_lyapunov(inst.dynamics[0]);
  require_bounded_origin_interior(inst, opts);
  StepBound out = step_bound_from(M, inst, opts);
  out.gamma = 1.0 - 1.0 / gershgorin_lambda_max(M);
  out.r_bar = ceil_nonnegative((out.alpha2 / out.alpha1 - 1.0) / (1.0 - out.gamma));
  return out;
}

StepBound convergence_bound_fixed_rho(const RdoInstance& inst, double rho_star,
                                      const Options& opts) {
  if (inst.dynamics.is_switched()) {
    throw Error(ErrorCode::kInvalidArgument, "convergence_bound_fixed_rho needs a single matrix");
  }
  if (!(rho_star >= 0.0 && rho_star < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho_star must lie in [0, 1)");
  }
  const MatrixXd& G = inst.dynamics[0];
  const double rho = spectral_radius(G);
  if (rho > rho_star * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kRhoStarViolated,
                "rho(G) = " + std::to_string(rho) + " > " + std::to_string(rho_star));
  }
  const double rho_hat = 0.5 * (1.0 + rho_star);
  const MatrixXd M = solve_discrete_lyapunov(G / rho_hat);
  require_bounded_origin_interior(inst, opts);
  StepBound out = step_bound_from(M, inst, opts);
  out.gamma = rho_hat * rho_hat;
  out.r_bar = ceil_nonnegative(std::log(out.alpha2 / out.alpha1) / std::log(1.0 / out.gamma));
  return out;
}

}  // namespace rdo
