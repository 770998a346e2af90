#pragma once

// Domain types shared by every part of the solver: polytopes, dynamics,
// problem instances, ellipsoidal invariant sets and the bound ledger.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace rdo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class ErrorCode {
  kDimensionMismatch,
  kNonFiniteEntry,
  kEmptyPolytopeRow,
  kOriginNotInterior,
  kProductCapExceeded,
  kEigenFailure,
  kUnstableDynamics,
  kSingularSystem,
  kNonConvexQuadratic,
  kNumericalError,
  kEmptyPolytope,
  kUnboundedPolytope,
  kRhoStarViolated,
  kInvalidInvariantSet,
  kInfeasibleLevel,
  kBracketFailure,
  kParseError,
  kDimensionNotPlottable,
  kLedgerViolation,
  kInvalidArgument,
};

std::string to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(to_string(code) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by validate_instance. Carries every violated rule, not only the
// first; code() reports the first one.
class ValidationError : public Error {
 public:
  struct Issue {
    ErrorCode code;
    std::string message;
  };
  explicit ValidationError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

struct Tolerances {
  double feas = 1e-7;         // absolute constraint violation
  double psd = 1e-8;          // relative minimum-eigenvalue floor
  double gap = 1e-6;          // ledger sanity slack
  double fixed_point = 1e-6;  // relative slack of the S_r = S_{r+1} test
  double strict = 1e-6;       // H > 0 is encoded as H >= strict * I
};

struct Limits {
  std::size_t product_cap = 4096;          // s^k per level
  std::size_t simulation_cap = 1u << 22;   // total points in brute-force membership
};

struct Options {
  Tolerances tol;
  Limits limits;
  std::string solver = "builtin";  // backend name, see solverapi.h
};

// {x | A x <= b}.
class Polytope {
 public:
  Polytope(MatrixXd A, VectorXd b);

  const MatrixXd& A() const { return A_; }
  const VectorXd& b() const { return b_; }
  int rows() const { return static_cast<int>(A_.rows()); }
  int dim() const { return static_cast<int>(A_.cols()); }

  // Largest violation max_i (a_i^T x - b_i); nonpositive means inside.
  double violation(const VectorXd& x) const;
  bool contains(const VectorXd& x, double tol) const { return violation(x) <= tol; }

 private:
  MatrixXd A_;
  VectorXd b_;
};

// Generators G_1..G_s of x_{k+1} in conv{G_1 x_k, ..., G_s x_k}.
class Dynamics {
 public:
  explicit Dynamics(std::vector<MatrixXd> matrices);
  explicit Dynamics(MatrixXd single) : Dynamics(std::vector<MatrixXd>{std::move(single)}) {}

  const std::vector<MatrixXd>& matrices() const { return matrices_; }
  const MatrixXd& operator[](std::size_t j) const { return matrices_[j]; }
  int count() const { return static_cast<int>(matrices_.size()); }
  int dim() const { return static_cast<int>(matrices_.front().rows()); }
  bool is_switched() const { return matrices_.size() > 1; }

  Dynamics scaled(double beta) const;

 private:
  std::vector<MatrixXd> matrices_;
};

struct RdoInstance {
  VectorXd c;
  Polytope polytope;
  Dynamics dynamics;
  std::string name;
  std::optional<double> rho_star;

  int dim() const { return polytope.dim(); }
};

// {x | x^T M x <= alpha}.
struct Ellipsoid {
  MatrixXd M;
  double alpha = 1.0;

  Ellipsoid(MatrixXd form, double level, const Tolerances& tol = {});
  bool contains(const VectorXd& x, double tol) const;
};

// F_alpha = {x | x^T H_pi x <= alpha for every multi-index pi in {1..s}^(l-1)}.
// Forms are stored in lexicographic order of pi, so forms[0] is H_{1...1}.
struct MultiEllipsoid {
  int level = 1;
  int generators = 1;
  std::vector<MatrixXd> forms;
  double alpha = 1.0;

  MultiEllipsoid(int l, int s, std::vector<MatrixXd> forms, double alpha,
                 const Tolerances& tol = {});

  // max_pi x^T H_pi x
  double gauge(const VectorXd& x) const;
  bool contains(const VectorXd& x, double tol) const;
};

enum class LevelStatus { kOpen, kFixedPoint, kConverged, kInfeasible, kLevelCapReached };
std::string to_string(LevelStatus status);

struct LedgerRow {
  int r = 0;
  std::optional<double> lower;  // -inf marks an unbounded relaxation
  std::optional<double> upper;
  std::optional<VectorXd> witness;
  LevelStatus status = LevelStatus::kOpen;
};

// Per-level bound record. append() enforces monotonicity of both bound
// sequences and lower <= upper, each within tol.gap.
class BoundLedger {
 public:
  explicit BoundLedger(double gap_tol = Tolerances{}.gap) : gap_tol_(gap_tol) {}

  void append(LedgerRow row);
  const std::vector<LedgerRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const LedgerRow& back() const { return rows_.back(); }
  LedgerRow& back() { return rows_.back(); }

  std::optional<double> best_lower() const;
  std::optional<double> best_upper() const;

 private:
  double gap_tol_;
  std::vector<LedgerRow> rows_;
};

// Unvalidated instance data as read from a file.
struct RawInstance {
  std::vector<double> c;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<std::vector<std::vector<double>>> Gs;
  std::string name;
  std::optional<double> rho_star;
};

RdoInstance validate_instance(const RawInstance& raw);

// Rescales each row to (a_i / b_i, 1). Requires b > 0.
Polytope normalize_rhs(const Polytope& p);

struct ExcludedAt {
  int k = 0;
  std::vector<int> word;  // generator indices (0-based), product G_{w1} ... G_{wk}
  double violation = 0.0;
};
struct InsideUpTo {
  int k_max = 0;
};
using MembershipVerdict = std::variant<ExcludedAt, InsideUpTo>;

// Brute-force trajectory check of x against every product of length <= k_max.
MembershipVerdict membership_by_simulation(const VectorXd& x, const RdoInstance& inst,
                                           int k_max, const Options& opts = {});

}  // namespace rdo
