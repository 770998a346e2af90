#include "rdo/switched.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "rdo/numlin.h"

namespace rdo {

namespace {

int form_count(int s, int l, const Options& opts) {
  if (l < 1) throw Error(ErrorCode::kInvalidArgument, "level l must be >= 1");
  std::size_t count = 1;
  for (int i = 0; i + 1 < l; ++i) {
    count *= static_cast<std::size_t>(s);
    if (count > opts.limits.product_cap) {
      throw Error(ErrorCode::kProductCapExceeded,
                  "s^(l-1) forms exceed the cap at l = " + std::to_string(l));
    }
  }
  return static_cast<int>(count);
}

// One path-complete edge: G_j^T H_from G_j <= H_to, with from = i.sigma and
// to = sigma.j; for l = 1 both are the single form.
struct Edge {
  int from = 0;
  int to = 0;
  int j = 0;
};

std::vector<Edge> path_complete_edges(int s, int l, const Options& opts) {
  const int forms = form_count(s, l, opts);
  std::vector<Edge> edges;
  if (l == 1) {
    for (int j = 0; j < s; ++j) edges.push_back({0, 0, j});
    return edges;
  }
  const int tails = forms / s;  // s^(l-2) choices of sigma
  for (int i = 0; i < s; ++i) {
    for (int sigma = 0; sigma < tails; ++sigma) {
      for (int j = 0; j < s; ++j) edges.push_back({i * tails + sigma, sigma * s + j, j});
    }
  }
  return edges;
}

}  // namespace

double jsr_lower_bound(const Dynamics& dyn, int k_max, const Options& opts) {
  if (k_max < 1) throw Error(ErrorCode::kInvalidArgument, "k_max must be >= 1");
  const auto levels = enumerate_products_up_to(dyn, k_max, opts);
  double best = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    for (const auto& w : levels[k]) {
      best = std::max(best, std::pow(spectral_radius(w.matrix), 1.0 / k));
    }
  }
  return best;
}

std::optional<PathCompleteCertificate> path_complete_feasible(const Dynamics& dyn, int l,
                                                              const Options& opts) {
  const int s = dyn.count();
  const int n = dyn.dim();
  const int forms = form_count(s, l, opts);
  const std::vector<Edge> edges = path_complete_edges(s, l, opts);

  ConicProblem p;
  std::vector<SymMatrixVar> vars;
  std::vector<AffineMatrix> H;
  for (int k = 0; k < forms; ++k) {
    vars.push_back(p.add_symmetric(n));
    H.push_back(AffineMatrix::of(vars.back()));
    p.add_psd(H.back(), true, "H");
    p.add_psd(AffineMatrix(MatrixXd::Identity(n, n)) - H.back(), false, "H <= I");
  }
  for (const Edge& e : edges) {
    const MatrixXd& G = dyn[e.j];
    p.add_psd(H[e.to] - H[e.from].congruence(G.transpose()), true, "edge");
  }
  const SolveResult res = solve_sdp(p, opts);
  if (res.status == SolveStatus::kInfeasible) return std::nullopt;
  if (!res.optimal()) {
    throw Error(ErrorCode::kNumericalError, "path-complete SDP at l = " + std::to_string(l) +
                                                ": " + to_string(res.status) + " " + res.message);
  }
  PathCompleteCertificate cert;
  cert.l = l;
  cert.s = s;
  for (const auto& v : vars) cert.forms.push_back(res.matrix(v));
  cert.margin = res.margin.value_or(0.0);
  return cert;
}

double certificate_slack(const PathCompleteCertificate& cert, const Dynamics& dyn) {
  Options opts;
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& H : cert.forms) slack = std::min(slack, min_eigenvalue(H));
  for (const Edge& e : path_complete_edges(cert.s, cert.l, opts)) {
    const MatrixXd& G = dyn[e.j];
    slack = std::min(slack, min_eigenvalue(cert.forms[e.to] -
                                           G.transpose() * cert.forms[e.from] * G));
  }
  return slack;
}

JsrBounds jsr_upper_bound(const Dynamics& dyn, int l, double tol, const Options& opts) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  JsrBounds out;
  out.l_used = l;
  out.k_used = 2;
  double top = 0.0;
  for (const auto& G : dyn.matrices()) top = std::max(top, spectral_norm(G));
  double lo = jsr_lower_bound(dyn, 2, opts);
  if (top == 0.0) return out;
  double hi = top * (1.0 + tol);
  if (!path_complete_feasible(dyn.scaled(1.0 / hi), l, opts)) {
    throw Error(ErrorCode::kBracketFailure,
                "level " + std::to_string(l) + " infeasible at the norm bound " +
                    std::to_string(hi));
  }
  for (int it = 0; it < 40 && hi - lo > tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (path_complete_feasible(dyn.scaled(1.0 / mid), l, opts)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.lower = lo;
  out.upper = hi;
  return out;
}

MultiEllipsoid multi_ellipsoid_invariant_set(const Dynamics& dyn, int l, const Polytope& p,
                                             const Options& opts) {
  if (!check_origin_interior(p)) {
    throw Error(ErrorCode::kOriginNotInterior, "every b_i must be positive");
  }
  const auto cert = path_complete_feasible(dyn, l, opts);
  if (!cert) {
    throw Error(ErrorCode::kInfeasibleLevel,
                "no path-complete certificate at l = " + std::to_string(l));
  }
  const double alpha = inscribed_level(cert->forms.front(), p);
  return MultiEllipsoid(l, dyn.count(), cert->forms, alpha, opts.tol);
}

void validate_multi_ellipsoid(const MultiEllipsoid& F, const RdoInstance& inst,
                              const Options& opts) {
  const Dynamics& dyn = inst.dynamics;
  if (F.generators != dyn.count()) {
    throw Error(ErrorCode::kDimensionMismatch, "form family built for another generator count");
  }
  PathCompleteCertificate cert{F.level, F.generators, F.forms, 0.0};
  double scale = 0.0;
  for (const auto& H : F.forms) scale = std::max(scale, H.trace());
  if (certificate_slack(cert, dyn) < -opts.tol.psd * scale) {
    throw Error(ErrorCode::kInvalidInvariantSet, "forms violate the path-complete inequalities");
  }
  const Eigen::LLT<MatrixXd> llt(F.forms.front());
  const Polytope& P = inst.polytope;
  for (int i = 0; i < P.rows(); ++i) {
    const VectorXd a = P.A().row(i).transpose();
    const double reach = std::sqrt(F.alpha * a.dot(llt.solve(a)));
    if (reach > P.b()(i) + opts.tol.feas * (1.0 + std::abs(P.b()(i)))) {
      throw Error(ErrorCode::kInvalidInvariantSet,
                  "leading ellipsoid leaves P across row " + std::to_string(i));
    }
  }
}

SwitchedInnerLevel switched_inner_qp(const RdoInstance& inst, const MultiEllipsoid& F, int r,
                                     const Options& opts) {
  if (r < 0) throw Error(ErrorCode::kInvalidArgument, "level must be nonnegative");
  validate_multi_ellipsoid(F, inst, opts);
  const auto levels = enumerate_products_up_to(inst.dynamics, r, opts);
  const Polytope& P = inst.polytope;

  ConicProblem p;
  const VectorVar x = p.add_vector(inst.dim());
  for (const auto& w : levels[r]) {
    const LinearVector v = apply(w.matrix, x);
    for (const auto& H : F.forms) p.add_quadratic(v, H, F.alpha);
  }
  for (int k = 0; k < r; ++k) {
    for (const auto& w : levels[k]) {
      const LinearVector rows = apply(P.A() * w.matrix, x);
      for (int i = 0; i < P.rows(); ++i) p.add_linear_le(rows[i], P.b()(i));
    }
  }
  p.minimize(dot(inst.c, x));
  const SolveResult res = solve_qcqp(p, opts);
  if (!res.optimal()) {
    throw Error(ErrorCode::kNumericalError, "switched inner QP at r = " + std::to_string(r) +
                                                ": " + to_string(res.status) + " " + res.message);
  }
  return SwitchedInnerLevel{r, F, res.value, res.vector(x), {}};
}

SwitchedInnerLevel switched_inner_sdp(const RdoInstance& inst, int l, int r,
                                      const Options& opts) {
  if (r < 0) throw Error(ErrorCode::kInvalidArgument, "level must be nonnegative");
  const Polytope P = normalize_rhs(inst.polytope);
  if (!check_bounded(P, opts)) throw Error(ErrorCode::kUnboundedPolytope, "P must be bounded");
  const Dynamics& dyn = inst.dynamics;
  if (!path_complete_feasible(dyn, l, opts)) {
    throw Error(ErrorCode::kInfeasibleLevel,
                "no path-complete certificate at l = " + std::to_string(l));
  }
  const int s = dyn.count();
  const int n = inst.dim();
  const int forms = form_count(s, l, opts);
  const auto levels = enumerate_products_up_to(dyn, r, opts);

  ConicProblem p;
  const VectorVar x = p.add_vector(n);
  std::vector<SymMatrixVar> vars;
  std::vector<AffineMatrix> Q;
  for (int k = 0; k < forms; ++k) {
    vars.push_back(p.add_symmetric(n));
    Q.push_back(AffineMatrix::of(vars.back()));
    p.add_psd(Q.back(), true, "Q");
  }
  // Polar form of G_j^T H_from G_j <= H_to.
  for (const Edge& e : path_complete_edges(s, l, opts)) {
    p.add_psd(Q[e.from] - Q[e.to].congruence(dyn[e.j]), false, "edge");
  }
  for (int i = 0; i < P.rows(); ++i) {
    p.add_linear_le(Q.front().quad_form(P.A().row(i).transpose()), 1.0);
  }
  for (const auto& w : levels[r]) {
    const LinearVector v = apply(w.matrix, x);
    for (const auto& Qk : Q) p.add_psd(AffineMatrix::schur_block(Qk, v, 1.0), false, "landing");
  }
  for (int k = 0; k < r; ++k) {
    for (const auto& w : levels[k]) {
      const LinearVector rows = apply(P.A() * w.matrix, x);
      for (int i = 0; i < P.rows(); ++i) p.add_linear_le(rows[i], 1.0);
    }
  }
  p.minimize(dot(inst.c, x));

  const SolveResult res = solve_sdp(p, opts);
  if (!res.optimal()) {
    throw Error(ErrorCode::kNumericalError, "switched inner SDP at r = " + std::to_string(r) +
                                                ": " + to_string(res.status) + " " + res.message);
  }
  SwitchedInnerLevel out{r, MultiEllipsoid(1, 1, {MatrixXd::Identity(n, n)}, 1.0), res.value,
                         res.vector(x), {}};
  std::vector<MatrixXd> H;
  for (const auto& v : vars) {
    out.Q.push_back(res.matrix(v));
    H.push_back(floored_inverse(out.Q.back(), opts.tol.psd));
  }
  out.sets = MultiEllipsoid(l, s, std::move(H), 1.0, opts.tol);
  return out;
}

}  // namespace rdo
