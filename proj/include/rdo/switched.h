#pragma once

// Switched dynamics x_{k+1} in conv{G_1 x_k, ..., G_s x_k}: joint spectral
// radius bounds, path-complete ellipsoid families and the inner hierarchy
// built on them. Multi-indices pi in {1..s}^(l-1) are stored in lexicographic
// order, first index most significant; forms[0] is H_{1...1}.

#include <optional>
#include <vector>

#include "rdo/core.h"
#include "rdo/inner.h"
#include "rdo/outer.h"
#include "rdo/solverapi.h"

namespace rdo {

struct JsrBounds {
  double lower = 0.0;
  double upper = 0.0;
  int l_used = 1;
  int k_used = 2;
};

// H_pi > 0 with G_j^T H_{i sigma} G_j <= H_{sigma j} for all i, j, sigma.
// l = 1 uses one form (G_j^T H G_j <= H); l = 2 uses H_1..H_s.
struct PathCompleteCertificate {
  int l = 1;
  int s = 1;
  std::vector<MatrixXd> forms;
  double margin = 0.0;  // smallest eigenvalue over all strict blocks, forms scaled to H <= I
};

struct SwitchedInnerLevel {
  int r = 0;
  MultiEllipsoid sets;  // F_1 = {z | z^T H_pi z <= 1 for all pi}, H_pi = Q_pi^-1
  double value = 0.0;
  VectorXd witness;
  std::vector<MatrixXd> Q;
};

// max over nonempty words w with |w| <= k_max of rho(G_w)^(1/|w|).
double jsr_lower_bound(const Dynamics& dyn, int k_max, const Options& opts = {});

// Maximizes the common slack t of H_pi >= t I and H_{sigma j} - G_j^T H_{i sigma} G_j >= t I
// under H_pi <= I. Empty when t* < tol.strict.
std::optional<PathCompleteCertificate> path_complete_feasible(const Dynamics& dyn, int l,
                                                              const Options& opts = {});

// Smallest eigenvalue over the certificate's blocks, recomputed from the forms.
double certificate_slack(const PathCompleteCertificate& cert, const Dynamics& dyn);

// Bisection on beta over [jsr_lower_bound(dyn, 2), max_i ||G_i||_2 (1 + tol)] using
// feasibility of dyn / beta at level l. Throws BracketFailure if the top is infeasible.
JsrBounds jsr_upper_bound(const Dynamics& dyn, int l, double tol, const Options& opts = {});

// F_alpha from a level-l certificate, with alpha the largest level keeping
// {x | x^T H_{1...1} x <= alpha} inside p. Throws InfeasibleLevel.
MultiEllipsoid multi_ellipsoid_invariant_set(const Dynamics& dyn, int l, const Polytope& p,
                                             const Options& opts = {});

// Throws InvalidInvariantSet unless the forms satisfy the path-complete LMIs
// and {x^T H_{1...1} x <= alpha} lies in P.
void validate_multi_ellipsoid(const MultiEllipsoid& F, const RdoInstance& inst,
                              const Options& opts = {});

// min c^T x  s.t. (G_w x)^T H_pi (G_w x) <= alpha for |w| = r and all pi,
//                 A G_w x <= b for |w| < r.
SwitchedInnerLevel switched_inner_qp(const RdoInstance& inst, const MultiEllipsoid& F, int r,
                                     const Options& opts = {});

// Joint search in Q_pi = H_pi^-1 coordinates, after scaling b to ones:
//   min c^T x  s.t.  Q_pi > 0,  G_j Q_{sigma j} G_j^T <= Q_{i sigma},  a^T Q_{1...1} a <= 1,
//                    [[Q_pi, G_w x], [(G_w x)^T, 1]] >= 0 for |w| = r,
//                    A G_w x <= 1 for |w| < r.
// Throws InfeasibleLevel when no level-l certificate exists for the dynamics.
SwitchedInnerLevel switched_inner_sdp(const RdoInstance& inst, int l, int r,
                                      const Options& opts = {});

inline OuterLevel switched_lower_bound(const RdoInstance& inst, int r, const Options& opts = {}) {
  return lower_bound(inst, r, opts);
}
inline bool switched_fixed_point(const RdoInstance& inst, int r, const Options& opts = {}) {
  return fixed_point_reached(inst, r, opts);
}

}  // namespace rdo
