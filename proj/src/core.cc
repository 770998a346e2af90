#include "rdo/core.h"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace rdo {

std::string to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::kEmptyPolytopeRow: return "EmptyPolytopeRow";
    case ErrorCode::kOriginNotInterior: return "OriginNotInterior";
    case ErrorCode::kProductCapExceeded: return "ProductCapExceeded";
    case ErrorCode::kEigenFailure: return "EigenFailure";
    case ErrorCode::kUnstableDynamics: return "UnstableDynamics";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kNonConvexQuadratic: return "NonConvexQuadratic";
    case ErrorCode::kNumericalError: return "NumericalError";
    case ErrorCode::kEmptyPolytope: return "EmptyPolytope";
    case ErrorCode::kUnboundedPolytope: return "UnboundedPolytope";
    case ErrorCode::kRhoStarViolated: return "RhoStarViolated";
    case ErrorCode::kInvalidInvariantSet: return "InvalidInvariantSet";
    case ErrorCode::kInfeasibleLevel: return "InfeasibleLevel";
    case ErrorCode::kBracketFailure: return "BracketFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDimensionNotPlottable: return "DimensionNotPlottable";
    case ErrorCode::kLedgerViolation: return "LedgerViolation";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_string(LevelStatus status) {
  switch (status) {
    case LevelStatus::kOpen: return "Open";
    case LevelStatus::kFixedPoint: return "FixedPoint";
    case LevelStatus::kConverged: return "Converged";
    case LevelStatus::kInfeasible: return "Infeasible";
    case LevelStatus::kLevelCapReached: return "LevelCapReached";
  }
  return "Unknown";
}

namespace {

std::string join_issues(const std::vector<ValidationError::Issue>& issues) {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i > 0) out << "; ";
    out << to_string(issues[i].code) << " (" << issues[i].message << ")";
  }
  return out.str();
}

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

// Smallest eigenvalue must clear eps * trace / n.
void require_positive_definite(const MatrixXd& M, const Tolerances& tol, const char* what) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " must be square");
  }
  if (!all_finite(M)) throw Error(ErrorCode::kNonFiniteEntry, what);
  const MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  const double floor = tol.psd * sym.trace() / static_cast<double>(sym.rows());
  if (eig.eigenvalues().minCoeff() < floor || sym.trace() <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " is not positive definite");
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(issues.empty() ? ErrorCode::kInvalidArgument : issues.front().code,
            join_issues(issues)),
      issues_(std::move(issues)) {}

Polytope::Polytope(MatrixXd A, VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() < 1 || A_.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "polytope needs at least one row and column");
  }
  if (b_.size() != A_.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "length of b differs from rows of A");
  }
  if (!A_.allFinite() || !b_.allFinite()) {
    throw Error(ErrorCode::kNonFiniteEntry, "polytope data");
  }
  for (int i = 0; i < A_.rows(); ++i) {
    if (A_.row(i).cwiseAbs().maxCoeff() == 0.0 && b_(i) < 0.0) {
      throw Error(ErrorCode::kEmptyPolytopeRow, "row " + std::to_string(i) + " reads 0 <= " +
                                                     std::to_string(b_(i)));
    }
  }
}

double Polytope::violation(const VectorXd& x) const { return (A_ * x - b_).maxCoeff(); }

Dynamics::Dynamics(std::vector<MatrixXd> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw Error(ErrorCode::kDimensionMismatch, "no dynamics matrices");
  const auto n = matrices_.front().rows();
  for (const auto& G : matrices_) {
    if (G.rows() != n || G.cols() != n || n == 0) {
      throw Error(ErrorCode::kDimensionMismatch, "dynamics matrices must be square and equal-sized");
    }
    if (!G.allFinite()) throw Error(ErrorCode::kNonFiniteEntry, "dynamics matrix");
  }
}

Dynamics Dynamics::scaled(double beta) const {
  std::vector<MatrixXd> out;
  out.reserve(matrices_.size());
  for (const auto& G : matrices_) out.push_back(beta * G);
  return Dynamics(std::move(out));
}

Ellipsoid::Ellipsoid(MatrixXd form, double level, const Tolerances& tol)
    : M(0.5 * (form + form.transpose())), alpha(level) {
  require_positive_definite(M, tol, "ellipsoid form");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "ellipsoid level must be positive");
  }
}

bool Ellipsoid::contains(const VectorXd& x, double tol) const {
  return x.dot(M * x) <= alpha * (1.0 + tol) + tol;
}

MultiEllipsoid::MultiEllipsoid(int l, int s, std::vector<MatrixXd> fs, double a,
                               const Tolerances& tol)
    : level(l), generators(s), forms(std::move(fs)), alpha(a) {
  if (l < 1 || s < 1) throw Error(ErrorCode::kInvalidArgument, "level and generator count >= 1");
  std::size_t expected = 1;
  for (int i = 0; i + 1 < l; ++i) expected *= static_cast<std::size_t>(s);
  if (forms.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(expected) + " forms, got " + std::to_string(forms.size()));
  }
  for (auto& H : forms) {
    H = 0.5 * (H + H.transpose().eval());
    require_positive_definite(H, tol, "multi-ellipsoid form");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "multi-ellipsoid level must be positive");
  }
}

double MultiEllipsoid::gauge(const VectorXd& x) const {
  double w = 0.0;
  for (const auto& H : forms) w = std::max(w, x.dot(H * x));
  return w;
}

bool MultiEllipsoid::contains(const VectorXd& x, double tol) const {
  return gauge(x) <= alpha * (1.0 + tol) + tol;
}

void BoundLedger::append(LedgerRow row) {
  if (row.lower && row.upper && *row.lower > *row.upper + gap_tol_ * (1.0 + std::abs(*row.upper))) {
    throw Error(ErrorCode::kLedgerViolation, "lower bound exceeds upper bound at r = " +
                                                 std::to_string(row.r));
  }
  const auto prev_lower = best_lower();
  const auto prev_upper = best_upper();
  if (row.lower && prev_lower && *row.lower < *prev_lower - gap_tol_ * (1.0 + std::abs(*prev_lower))) {
    throw Error(ErrorCode::kLedgerViolation, "lower bounds decreased at r = " + std::to_string(row.r));
  }
  if (row.upper && prev_upper && *row.upper > *prev_upper + gap_tol_ * (1.0 + std::abs(*prev_upper))) {
    throw Error(ErrorCode::kLedgerViolation, "upper bounds increased at r = " + std::to_string(row.r));
  }
  if (row.lower && prev_upper && *row.lower > *prev_upper + gap_tol_ * (1.0 + std::abs(*prev_upper))) {
    throw Error(ErrorCode::kLedgerViolation, "lower bound crosses an earlier upper bound");
  }
  if (row.upper && prev_lower && *row.upper < *prev_lower - gap_tol_ * (1.0 + std::abs(*prev_lower))) {
    throw Error(ErrorCode::kLedgerViolation, "upper bound crosses an earlier lower bound");
  }
  rows_.push_back(std::move(row));
}

std::optional<double> BoundLedger::best_lower() const {
  std::optional<double> best;
  for (const auto& row : rows_) {
    if (row.lower && (!best || *row.lower > *best)) best = row.lower;
  }
  return best;
}

std::optional<double> BoundLedger::best_upper() const {
  std::optional<double> best;
  for (const auto& row : rows_) {
    if (row.upper && (!best || *row.upper < *best)) best = row.upper;
  }
  return best;
}

RdoInstance validate_instance(const RawInstance& raw) {
  std::vector<ValidationError::Issue> issues;
  auto issue = [&](ErrorCode code, std::string msg) { issues.push_back({code, std::move(msg)}); };

  const std::size_t n = raw.c.size();
  const std::size_t m = raw.A.size();
  if (n == 0) issue(ErrorCode::kDimensionMismatch, "c is empty");
  if (m == 0) issue(ErrorCode::kDimensionMismatch, "A has no rows");
  if (raw.b.size() != m) {
    issue(ErrorCode::kDimensionMismatch,
          "b has length " + std::to_string(raw.b.size()) + " but A has " + std::to_string(m) + " rows");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (raw.A[i].size() != n) {
      issue(ErrorCode::kDimensionMismatch, "row " + std::to_string(i) + " of A has " +
                                               std::to_string(raw.A[i].size()) +
                                               " columns, c has length " + std::to_string(n));
    }
  }
  if (raw.Gs.empty()) issue(ErrorCode::kDimensionMismatch, "no dynamics matrix given");
  for (std::size_t j = 0; j < raw.Gs.size(); ++j) {
    const auto& G = raw.Gs[j];
    bool square = G.size() == n;
    for (const auto& row : G) square = square && row.size() == n;
    if (!square) {
      issue(ErrorCode::kDimensionMismatch,
            "dynamics matrix " + std::to_string(j) + " is not " + std::to_string(n) + "x" +
                std::to_string(n));
    }
  }

  auto finite = [](double v) { return std::isfinite(v); };
  for (std::size_t i = 0; i < n; ++i) {
    if (!finite(raw.c[i])) issue(ErrorCode::kNonFiniteEntry, "c[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < raw.A[i].size(); ++k) {
      if (!finite(raw.A[i][k])) {
        issue(ErrorCode::kNonFiniteEntry, "A[" + std::to_string(i) + "][" + std::to_string(k) + "]");
      }
    }
  }
  for (std::size_t i = 0; i < raw.b.size(); ++i) {
    if (!finite(raw.b[i])) issue(ErrorCode::kNonFiniteEntry, "b[" + std::to_string(i) + "]");
  }
  for (std::size_t j = 0; j < raw.Gs.size(); ++j) {
    for (const auto& row : raw.Gs[j]) {
      for (double v : row) {
        if (!finite(v)) {
          issue(ErrorCode::kNonFiniteEntry, "dynamics matrix " + std::to_string(j));
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < m && i < raw.b.size(); ++i) {
    bool zero = true;
    for (double v : raw.A[i]) zero = zero && v == 0.0;
    if (zero && raw.b[i] < 0.0) {
      issue(ErrorCode::kEmptyPolytopeRow, "row " + std::to_string(i) + " reads 0 <= " +
                                              std::to_string(raw.b[i]));
    }
  }
  if (raw.rho_star && !(*raw.rho_star < 1.0 && *raw.rho_star >= 0.0)) {
    issue(ErrorCode::kInvalidArgument, "rho_star must lie in [0, 1)");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  const int ni = static_cast<int>(n);
  const int mi = static_cast<int>(m);
  MatrixXd A(mi, ni);
  VectorXd b(mi), c(ni);
  for (int i = 0; i < mi; ++i) {
    b(i) = raw.b[i];
    for (int k = 0; k < ni; ++k) A(i, k) = raw.A[i][k];
  }
  for (int k = 0; k < ni; ++k) c(k) = raw.c[k];
  std::vector<MatrixXd> Gs;
  for (const auto& Graw : raw.Gs) {
    MatrixXd G(ni, ni);
    for (int i = 0; i < ni; ++i) {
      for (int k = 0; k < ni; ++k) G(i, k) = Graw[i][k];
    }
    Gs.push_back(std::move(G));
  }
  return RdoInstance{std::move(c), Polytope(std::move(A), std::move(b)), Dynamics(std::move(Gs)),
                     raw.name, raw.rho_star};
}

Polytope normalize_rhs(const Polytope& p) {
  MatrixXd A = p.A();
  for (int i = 0; i < p.rows(); ++i) {
    const double bi = p.b()(i);
    if (!(bi > 0.0)) {
      throw Error(ErrorCode::kOriginNotInterior,
                  "b[" + std::to_string(i) + "] = " + std::to_string(bi) + " is not positive");
    }
    A.row(i) /= bi;
  }
  return Polytope(std::move(A), VectorXd::Ones(p.rows()));
}

MembershipVerdict membership_by_simulation(const VectorXd& x, const RdoInstance& inst, int k_max,
                                           const Options& opts) {
  if (k_max < 0) throw Error(ErrorCode::kInvalidArgument, "k_max must be nonnegative");
  if (x.size() != inst.dim()) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  const auto& P = inst.polytope;
  const auto& dyn = inst.dynamics;
  const int s = dyn.count();

  if (s >= 2) {
    double total = 0.0, level = 1.0;
    for (int k = 0; k <= k_max; ++k) {
      total += level;
      level *= s;
    }
    if (total > static_cast<double>(opts.limits.simulation_cap)) {
      throw Error(ErrorCode::kProductCapExceeded,
                  "simulation would visit " + std::to_string(total) + " products");
    }
  }

  // Level k holds G_w x for every word w of length k, in lexicographic order.
  // Prepending a generator keeps that order: j.w for j = 0..s-1, w in level k.
  std::vector<VectorXd> points{x};
  std::vector<std::vector<int>> words{{}};
  for (int k = 0;; ++k) {
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
      const double v = P.violation(points[idx]);
      if (v > opts.tol.feas) return ExcludedAt{k, words[idx], v};
    }
    if (k == k_max) break;
    std::vector<VectorXd> next;
    std::vector<std::vector<int>> next_words;
    next.reserve(points.size() * s);
    next_words.reserve(points.size() * s);
    for (int j = 0; j < s; ++j) {
      for (std::size_t idx = 0; idx < points.size(); ++idx) {
        next.push_back(dyn[j] * points[idx]);
        std::vector<int> w{j};
        w.insert(w.end(), words[idx].begin(), words[idx].end());
        next_words.push_back(std::move(w));
      }
    }
    points = std::move(next);
    words = std::move(next_words);
  }
  return InsideUpTo{k_max};
}

}  // namespace rdo
