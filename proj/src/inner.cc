#include "rdo/inner.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "rdo/numlin.h"
#include "rdo/outer.h"

namespace rdo {

namespace {

MatrixXd matrix_power(const MatrixXd& G, int k) {
  MatrixXd out = MatrixXd::Identity(G.rows(), G.cols());
  for (int i = 0; i < k; ++i) out = out * G;
  return out;
}

const MatrixXd& single_matrix(const RdoInstance& inst, const char* what) {
  if (inst.dynamics.is_switched()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " needs a single matrix");
  }
  return inst.dynamics[0];
}

// A G^k x <= b for k = 0..r-1.
void add_trajectory_rows(ConicProblem& p, const VectorVar& x, const Polytope& P,
                         const MatrixXd& G, int r) {
  MatrixXd Gk = MatrixXd::Identity(G.rows(), G.cols());
  for (int k = 0; k < r; ++k) {
    const LinearVector rows = apply(P.A() * Gk, x);
    for (int i = 0; i < P.rows(); ++i) p.add_linear_le(rows[i], P.b()(i));
    Gk = G * Gk;
  }
}

double psd_slack(const MatrixXd& S) {
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  return min_eigenvalue(S) / scale;
}

}  // namespace

Ellipsoid default_invariant_ellipsoid(const RdoInstance& inst, const Options& opts) {
  const MatrixXd& G = single_matrix(inst, "default_invariant_ellipsoid");
  const MatrixXd M = solve_discrete_lyapunov(G);
  if (!check_origin_interior(inst.polytope)) {
    throw Error(ErrorCode::kOriginNotInterior, "every b_i must be positive");
  }
  return Ellipsoid(M, inscribed_level(M, inst.polytope), opts.tol);
}

void validate_invariant_ellipsoid(const Ellipsoid& E, const RdoInstance& inst,
                                  const Options& opts) {
  const double eps = opts.tol.psd * E.M.trace();
  for (const auto& G : inst.dynamics.matrices()) {
    if (min_eigenvalue(E.M - G.transpose() * E.M * G) < -eps) {
      throw Error(ErrorCode::kInvalidInvariantSet, "ellipsoid is not invariant");
    }
  }
  const Eigen::LLT<MatrixXd> llt(E.M);
  const Polytope& P = inst.polytope;
  for (int i = 0; i < P.rows(); ++i) {
    const VectorXd a = P.A().row(i).transpose();
    const double reach = std::sqrt(E.alpha * a.dot(llt.solve(a)));
    if (reach > P.b()(i) + opts.tol.feas * (1.0 + std::abs(P.b()(i)))) {
      throw Error(ErrorCode::kInvalidInvariantSet,
                  "ellipsoid leaves P across row " + std::to_string(i));
    }
  }
}

InnerLevel inner_bound_qp(const RdoInstance& inst, const Ellipsoid& E, int r,
                          const Options& opts) {
  const MatrixXd& G = single_matrix(inst, "inner_bound_qp");
  if (r < 0) throw Error(ErrorCode::kInvalidArgument, "level must be nonnegative");
  validate_invariant_ellipsoid(E, inst, opts);

  ConicProblem p;
  const VectorVar x = p.add_vector(inst.dim());
  p.add_quadratic(apply(matrix_power(G, r), x), E.M, E.alpha);
  add_trajectory_rows(p, x, inst.polytope, G, r);
  p.minimize(dot(inst.c, x));
  const SolveResult res = solve_qcqp(p, opts);
  if (!res.optimal()) {
    throw Error(ErrorCode::kNumericalError,
                "inner QP at r = " + std::to_string(r) + ": " + to_string(res.status) + " " +
                    res.message);
  }
  return InnerLevel{r, E, res.value, res.vector(x), std::nullopt};
}

InnerLevel inner_sdp(const RdoInstance& inst, int r, const Options& opts) {
  const MatrixXd& G = single_matrix(inst, "inner_sdp");
  if (r < 0) throw Error(ErrorCode::kInvalidArgument, "level must be nonnegative");
  const Polytope P = normalize_rhs(inst.polytope);
  if (spectral_radius(G) >= 1.0) {
    throw Error(ErrorCode::kUnstableDynamics, "inner_sdp needs rho(G) < 1");
  }
  if (!check_bounded(P, opts)) throw Error(ErrorCode::kUnboundedPolytope, "P must be bounded");

  const int n = inst.dim();
  ConicProblem p;
  const VectorVar x = p.add_vector(n);
  const SymMatrixVar Qv = p.add_symmetric(n);
  const AffineMatrix Q = AffineMatrix::of(Qv);
  p.add_psd(Q, /*strict=*/true, "Q");
  p.add_psd(Q - Q.congruence(G), false, "invariance");
  for (int i = 0; i < P.rows(); ++i) {
    p.add_linear_le(Q.quad_form(P.A().row(i).transpose()), 1.0);
  }
  p.add_psd(AffineMatrix::schur_block(Q, apply(matrix_power(G, r), x), 1.0), false, "landing");
  add_trajectory_rows(p, x, P, G, r);
  p.minimize(dot(inst.c, x));

  const SolveResult res = solve_sdp(p, opts);
  if (!res.optimal()) {
    throw Error(ErrorCode::kNumericalError,
                "inner SDP at r = " + std::to_string(r) + ": " + to_string(res.status) + " " +
                    res.message);
  }
  const MatrixXd Qr = res.matrix(Qv);
  const MatrixXd H = floored_inverse(Qr, opts.tol.psd);
  return InnerLevel{r, Ellipsoid(H, 1.0, opts.tol), res.value, res.vector(x), Qr};
}

bool schur_polar_equivalence_check(const VectorXd& x, const MatrixXd& H,
                                   const RdoInstance& inst, int r, const Options& opts) {
  const MatrixXd& G = single_matrix(inst, "schur_polar_equivalence_check");
  const Polytope P = normalize_rhs(inst.polytope);
  const double tol = opts.tol.feas;
  const VectorXd landing = matrix_power(G, r) * x;

  bool trajectory_ok = true;
  {
    VectorXd y = x;
    for (int k = 0; k < r; ++k) {
      if (P.violation(y) > tol) trajectory_ok = false;
      y = G * y;
    }
  }

  // H side: invariance G^T H G <= H, support values a^T H^-1 a <= 1 via a
  // Cholesky solve, and the landing point inside {z^T H z <= 1}.
  bool h_side = trajectory_ok;
  {
    const Eigen::LLT<MatrixXd> llt(H);
    h_side = h_side && llt.info() == Eigen::Success;
    h_side = h_side && psd_slack(H - G.transpose() * H * G) >= -tol;
    for (int i = 0; h_side && i < P.rows(); ++i) {
      const VectorXd a = P.A().row(i).transpose();
      h_side = a.dot(llt.solve(a)) <= 1.0 + tol;
    }
    h_side = h_side && landing.dot(H * landing) <= 1.0 + tol;
  }

  // Q side: explicit inverse, congruence invariance, quadratic support
  // bounds and the Schur block.
  bool q_side = trajectory_ok;
  {
    const MatrixXd Q = H.inverse();
    q_side = q_side && psd_slack(Q) > 0.0;
    q_side = q_side && psd_slack(Q - G * Q * G.transpose()) >= -tol;
    for (int i = 0; q_side && i < P.rows(); ++i) {
      const VectorXd a = P.A().row(i).transpose();
      q_side = a.dot(Q * a) <= 1.0 + tol;
    }
    const int n = static_cast<int>(x.size());
    MatrixXd S(n + 1, n + 1);
    S.topLeftCorner(n, n) = Q;
    S.topRightCorner(n, 1) = landing;
    S.bottomLeftCorner(1, n) = landing.transpose();
    S(n, n) = 1.0;
    q_side = q_side && psd_slack(S) >= -tol;
  }
  return h_side == q_side;
}

}  // namespace rdo
