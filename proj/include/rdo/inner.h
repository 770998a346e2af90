#pragma once

// Inner approximations I_r(E) = S_{r-1} ∩ {x | G^r x ∈ E} for a single
// matrix G, where E is an invariant ellipsoid contained in P.

#include <optional>

#include "rdo/core.h"
#include "rdo/solverapi.h"

namespace rdo {

struct InnerLevel {
  int r = 0;
  Ellipsoid ellipsoid;     // the fixed E, or E_r = {z | z^T Q_r^-1 z <= 1}
  double value = 0.0;      // upper bound on the optimum
  VectorXd witness;        // a point of I_r(E), feasible for the original problem
  std::optional<MatrixXd> Q;  // SDP hierarchy only
};

// Lyapunov form M (G^T M G - M = -I) at the largest level inside P.
Ellipsoid default_invariant_ellipsoid(const RdoInstance& inst, const Options& opts = {});

// Throws InvalidInvariantSet unless G^T M G <= M and E ⊆ P.
void validate_invariant_ellipsoid(const Ellipsoid& E, const RdoInstance& inst,
                                  const Options& opts = {});

// min c^T x  s.t. (G^r x)^T M (G^r x) <= alpha,  A G^k x <= b  for k < r.
InnerLevel inner_bound_qp(const RdoInstance& inst, const Ellipsoid& E, int r,
                          const Options& opts = {});

// Joint search over the point and the ellipsoid, in Q = H^-1 coordinates:
//   min c^T x  s.t.  Q > 0,  G Q G^T <= Q,  a_i^T Q a_i <= 1,
//                    [[Q, G^r x], [(G^r x)^T, 1]] >= 0,  A G^k x <= 1 (k < r)
// after scaling b to ones.
InnerLevel inner_sdp(const RdoInstance& inst, int r, const Options& opts = {});

// Checks that (x, H) satisfies the H-form constraints exactly when (x, H^-1)
// satisfies the Q-form ones. Returns true when the two verdicts agree.
bool schur_polar_equivalence_check(const VectorXd& x, const MatrixXd& H,
                                   const RdoInstance& inst, int r, const Options& opts = {});

}  // namespace rdo
