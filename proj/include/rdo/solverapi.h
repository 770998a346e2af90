#pragma once

// Modeling layer for the convex subproblems the hierarchies emit, and the
// solver adapter contract. A problem is built from declared variables
// (scalar vectors and symmetric matrix blocks), affine expressions over
// their entries, and three constraint kinds: linear inequalities, convex
// quadratic inequalities and semidefinite constraints.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdo/core.h"

namespace rdo {

struct VectorVar {
  int offset = 0;
  int size = 0;
};

// Symmetric n x n matrix variable, packed as the upper triangle row by row.
struct SymMatrixVar {
  int offset = 0;
  int dim = 0;
  int entry(int i, int j) const;
  int packed_size() const { return dim * (dim + 1) / 2; }
};

// constant + sum_k coef_k * var_k
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  static LinearExpr var(int index, double coef = 1.0);

  double constant() const { return constant_; }
  const std::map<int, double>& terms() const { return terms_; }

  LinearExpr& add(int index, double coef);
  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& operator*=(double s);
  LinearExpr& operator+=(double v) {
    constant_ += v;
    return *this;
  }

  double evaluate(const VectorXd& y) const;

 private:
  double constant_ = 0.0;
  std::map<int, double> terms_;
};

LinearExpr operator+(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a, const LinearExpr& b);
LinearExpr operator*(double s, LinearExpr a);

using LinearVector = std::vector<LinearExpr>;

// c^T v for a vector variable.
LinearExpr dot(const VectorXd& c, const VectorVar& v);
// T v as a vector of expressions.
LinearVector apply(const MatrixXd& T, const VectorVar& v);

// Symmetric matrix whose entries are affine in the decision variables:
// constant + sum_k y_k * coefficient_k.
class AffineMatrix {
 public:
  AffineMatrix() = default;
  explicit AffineMatrix(MatrixXd constant);

  static AffineMatrix of(const SymMatrixVar& Q);
  // [[Q, v], [v^T, corner]]
  static AffineMatrix schur_block(const AffineMatrix& Q, const LinearVector& v, double corner);
  // e * I_n
  static AffineMatrix identity_times(int n, const LinearExpr& e);

  AffineMatrix& add_term(int index, const MatrixXd& coef);

  int dim() const { return static_cast<int>(constant_.rows()); }
  const MatrixXd& constant() const { return constant_; }
  const std::map<int, MatrixXd>& terms() const { return terms_; }

  AffineMatrix& operator+=(const AffineMatrix& other);
  AffineMatrix& operator-=(const AffineMatrix& other);
  AffineMatrix& operator*=(double s);

  // T F T^T
  AffineMatrix congruence(const MatrixXd& T) const;
  // a^T F a
  LinearExpr quad_form(const VectorXd& a) const;

  MatrixXd evaluate(const VectorXd& y) const;

 private:
  MatrixXd constant_;
  std::map<int, MatrixXd> terms_;
};

AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b);
AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b);

// v^T M v <= bound, M positive semidefinite.
struct QuadraticConstraint {
  LinearVector v;
  MatrixXd M;
  double bound = 0.0;
};

struct PsdConstraint {
  AffineMatrix F;
  bool strict = false;  // F > 0, encoded as F >= tol.strict * I
  std::string label;
};

class ConicProblem {
 public:
  VectorVar add_vector(int size);
  SymMatrixVar add_symmetric(int dim);
  int num_variables() const { return num_vars_; }

  void minimize(LinearExpr objective);
  bool is_feasibility() const { return !objective_.has_value(); }
  const LinearExpr& objective() const;

  // expr <= 0
  void add_linear(LinearExpr expr);
  // expr <= rhs
  void add_linear_le(LinearExpr expr, double rhs);
  void add_quadratic(LinearVector v, MatrixXd M, double bound);
  void add_psd(AffineMatrix F, bool strict = false, std::string label = {});

  const std::vector<LinearExpr>& linear() const { return linear_; }
  const std::vector<QuadraticConstraint>& quadratic() const { return quadratic_; }
  const std::vector<PsdConstraint>& psd() const { return psd_; }
  bool has_matrix_blocks() const { return !matrix_vars_.empty(); }

 private:
  int num_vars_ = 0;
  std::vector<SymMatrixVar> matrix_vars_;
  std::optional<LinearExpr> objective_;
  std::vector<LinearExpr> linear_;
  std::vector<QuadraticConstraint> quadratic_;
  std::vector<PsdConstraint> psd_;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalError };
std::string to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::kNumericalError;
  double value = 0.0;
  VectorXd assignment;
  // Smallest slack across strict semidefinite constraints (feasibility
  // problems maximize it).
  std::optional<double> margin;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  VectorXd vector(const VectorVar& v) const;
  MatrixXd matrix(const SymMatrixVar& Q) const;
};

// Largest violations of an assignment against the problem.
struct Residuals {
  double linear = 0.0;      // max(expr, 0)
  double quadratic = 0.0;   // max(v^T M v - bound, 0)
  double psd = 0.0;         // max(-lambda_min(F) / scale, 0), strict floor excluded
};
Residuals check_assignment(const ConicProblem& p, const VectorXd& y);

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual SolveResult solve_lp(const ConicProblem& p, const Options& opts) = 0;
  virtual SolveResult solve_qcqp(const ConicProblem& p, const Options& opts) = 0;
  virtual SolveResult solve_sdp(const ConicProblem& p, const Options& opts) = 0;
  // min c^T x s.t. A x <= h over a free vector x. The default builds a
  // ConicProblem and forwards to solve_lp.
  virtual SolveResult solve_dense_lp(const MatrixXd& A, const VectorXd& h, const VectorXd& c,
                                     const Options& opts);
};

// "builtin" is the only backend compiled in: a dense simplex method for
// linear programs and a primal-dual interior-point method for the conic ones.
std::unique_ptr<SolverBackend> make_backend(std::string_view name = "builtin");
std::vector<std::string> available_backends();

// The free functions dispatch to make_backend(opts.solver).
SolveResult solve_lp(const ConicProblem& p, const Options& opts = {});
SolveResult solve_dense_lp(const MatrixXd& A, const VectorXd& h, const VectorXd& c,
                           const Options& opts = {});
SolveResult solve_qcqp(const ConicProblem& p, const Options& opts = {});
SolveResult solve_sdp(const ConicProblem& p, const Options& opts = {});

}  // namespace rdo
