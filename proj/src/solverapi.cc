#include "rdo/solverapi.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lp_simplex.h"
#include "sdp_ipm.h"

namespace rdo {

int SymMatrixVar::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  return offset + i * dim - i * (i - 1) / 2 + (j - i);
}

LinearExpr LinearExpr::var(int index, double coef) {
  LinearExpr e;
  e.add(index, coef);
  return e;
}

LinearExpr& LinearExpr::add(int index, double coef) {
  if (coef == 0.0) return *this;
  auto [it, inserted] = terms_.emplace(index, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
  return *this;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  constant_ += other.constant_;
  for (const auto& [k, v] : other.terms_) add(k, v);
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  constant_ -= other.constant_;
  for (const auto& [k, v] : other.terms_) add(k, -v);
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  constant_ *= s;
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= s;
  return *this;
}

double LinearExpr::evaluate(const VectorXd& y) const {
  double out = constant_;
  for (const auto& [k, v] : terms_) out += v * y(k);
  return out;
}

LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
LinearExpr operator*(double s, LinearExpr a) { return a *= s; }

LinearExpr dot(const VectorXd& c, const VectorVar& v) {
  if (c.size() != v.size) throw Error(ErrorCode::kDimensionMismatch, "dot: size mismatch");
  LinearExpr e;
  for (int i = 0; i < v.size; ++i) e.add(v.offset + i, c(i));
  return e;
}

LinearVector apply(const MatrixXd& T, const VectorVar& v) {
  if (T.cols() != v.size) throw Error(ErrorCode::kDimensionMismatch, "apply: size mismatch");
  LinearVector out(T.rows());
  for (int i = 0; i < T.rows(); ++i) {
    for (int j = 0; j < v.size; ++j) out[i].add(v.offset + j, T(i, j));
  }
  return out;
}

AffineMatrix::AffineMatrix(MatrixXd constant) : constant_(std::move(constant)) {}

AffineMatrix AffineMatrix::of(const SymMatrixVar& Q) {
  AffineMatrix F(MatrixXd::Zero(Q.dim, Q.dim));
  for (int i = 0; i < Q.dim; ++i) {
    for (int j = i; j < Q.dim; ++j) {
      MatrixXd E = MatrixXd::Zero(Q.dim, Q.dim);
      E(i, j) = 1.0;
      E(j, i) = 1.0;
      F.terms_.emplace(Q.entry(i, j), std::move(E));
    }
  }
  return F;
}

AffineMatrix AffineMatrix::schur_block(const AffineMatrix& Q, const LinearVector& v,
                                       double corner) {
  const int n = Q.dim();
  if (static_cast<int>(v.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "schur_block: vector size mismatch");
  }
  AffineMatrix F(MatrixXd::Zero(n + 1, n + 1));
  F.constant_.topLeftCorner(n, n) = Q.constant_;
  F.constant_(n, n) = corner;
  for (const auto& [k, M] : Q.terms_) {
    MatrixXd E = MatrixXd::Zero(n + 1, n + 1);
    E.topLeftCorner(n, n) = M;
    F.terms_.emplace(k, std::move(E));
  }
  for (int i = 0; i < n; ++i) {
    F.constant_(i, n) = F.constant_(n, i) = v[i].constant();
    for (const auto& [k, c] : v[i].terms()) {
      auto it = F.terms_.find(k);
      if (it == F.terms_.end()) it = F.terms_.emplace(k, MatrixXd::Zero(n + 1, n + 1)).first;
      it->second(i, n) += c;
      it->second(n, i) += c;
    }
  }
  return F;
}

AffineMatrix AffineMatrix::identity_times(int n, const LinearExpr& e) {
  AffineMatrix F(e.constant() * MatrixXd::Identity(n, n));
  for (const auto& [k, c] : e.terms()) F.add_term(k, c * MatrixXd::Identity(n, n));
  return F;
}

AffineMatrix& AffineMatrix::add_term(int index, const MatrixXd& coef) {
  if (coef.rows() != dim() || coef.cols() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "add_term: shape mismatch");
  }
  auto it = terms_.find(index);
  if (it == terms_.end()) {
    terms_.emplace(index, coef);
  } else {
    it->second += coef;
  }
  return *this;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& other) {
  if (constant_.size() == 0) constant_ = MatrixXd::Zero(other.dim(), other.dim());
  if (other.dim() != dim()) throw Error(ErrorCode::kDimensionMismatch, "AffineMatrix sum");
  constant_ += other.constant_;
  for (const auto& [k, M] : other.terms_) {
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, M);
    } else {
      it->second += M;
    }
  }
  return *this;
}

AffineMatrix& AffineMatrix::operator-=(const AffineMatrix& other) {
  AffineMatrix neg = other;
  neg *= -1.0;
  return *this += neg;
}

AffineMatrix& AffineMatrix::operator*=(double s) {
  constant_ *= s;
  for (auto& [k, M] : terms_) M *= s;
  return *this;
}

AffineMatrix operator+(AffineMatrix a, const AffineMatrix& b) { return a += b; }
AffineMatrix operator-(AffineMatrix a, const AffineMatrix& b) { return a -= b; }

AffineMatrix AffineMatrix::congruence(const MatrixXd& T) const {
  if (T.cols() != dim()) throw Error(ErrorCode::kDimensionMismatch, "congruence");
  AffineMatrix out(T * constant_ * T.transpose());
  for (const auto& [k, M] : terms_) out.terms_.emplace(k, T * M * T.transpose());
  return out;
}

LinearExpr AffineMatrix::quad_form(const VectorXd& a) const {
  if (a.size() != dim()) throw Error(ErrorCode::kDimensionMismatch, "quad_form");
  LinearExpr e(a.dot(constant_ * a));
  for (const auto& [k, M] : terms_) e.add(k, a.dot(M * a));
  return e;
}

MatrixXd AffineMatrix::evaluate(const VectorXd& y) const {
  MatrixXd out = constant_;
  for (const auto& [k, M] : terms_) out += y(k) * M;
  return out;
}

VectorVar ConicProblem::add_vector(int size) {
  VectorVar v{num_vars_, size};
  num_vars_ += size;
  return v;
}

SymMatrixVar ConicProblem::add_symmetric(int dim) {
  SymMatrixVar Q{num_vars_, dim};
  num_vars_ += Q.packed_size();
  matrix_vars_.push_back(Q);
  return Q;
}

void ConicProblem::minimize(LinearExpr objective) { objective_ = std::move(objective); }

const LinearExpr& ConicProblem::objective() const {
  static const LinearExpr kZero;
  return objective_ ? *objective_ : kZero;
}

void ConicProblem::add_linear(LinearExpr expr) { linear_.push_back(std::move(expr)); }

void ConicProblem::add_linear_le(LinearExpr expr, double rhs) {
  expr += -rhs;
  linear_.push_back(std::move(expr));
}

void ConicProblem::add_quadratic(LinearVector v, MatrixXd M, double bound) {
  if (M.rows() != M.cols() || M.rows() != static_cast<int>(v.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "quadratic constraint shape");
  }
  quadratic_.push_back({std::move(v), std::move(M), bound});
}

void ConicProblem::add_psd(AffineMatrix F, bool strict, std::string label) {
  psd_.push_back({std::move(F), strict, std::move(label)});
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalError: return "numerical_error";
  }
  return "unknown";
}

VectorXd SolveResult::vector(const VectorVar& v) const { return assignment.segment(v.offset, v.size); }

MatrixXd SolveResult::matrix(const SymMatrixVar& Q) const {
  MatrixXd out(Q.dim, Q.dim);
  for (int i = 0; i < Q.dim; ++i) {
    for (int j = i; j < Q.dim; ++j) out(i, j) = out(j, i) = assignment(Q.entry(i, j));
  }
  return out;
}

namespace {

double lambda_min(const MatrixXd& S) {
  if (S.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

// Factor L with M = L^T L; rows for numerically zero eigenvalues are dropped.
MatrixXd psd_root(const MatrixXd& M, double psd_tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (M + M.transpose()));
  const VectorXd& w = eig.eigenvalues();
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if (w.minCoeff() < -psd_tol * scale) {
    throw Error(ErrorCode::kNonConvexQuadratic, "quadratic form is not positive semidefinite");
  }
  std::vector<int> keep;
  for (int i = 0; i < w.size(); ++i) {
    if (w(i) > 1e-14 * scale) keep.push_back(i);
  }
  MatrixXd L(keep.size(), M.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    L.row(r) = std::sqrt(w(keep[r])) * eig.eigenvectors().col(keep[r]).transpose();
  }
  return L;
}

// [[I, L v], [(L v)^T, bound]] >= 0  <=>  v^T M v <= bound.
AffineMatrix lower_quadratic(const QuadraticConstraint& q, double psd_tol) {
  const MatrixXd L = psd_root(q.M, psd_tol);
  LinearVector lv(L.rows());
  for (int i = 0; i < L.rows(); ++i) {
    for (std::size_t j = 0; j < q.v.size(); ++j) {
      if (L(i, j) != 0.0) lv[i] += L(i, j) * q.v[j];
    }
  }
  const auto k = L.rows();
  return AffineMatrix::schur_block(AffineMatrix(MatrixXd::Identity(k, k)), lv, q.bound);
}

struct Lowered {
  detail::SdpData data;
  int n = 0;             // original variables
  int margin = -1;       // index of the margin variable in feasibility mode
  std::vector<int> strict_blocks;
};

detail::SdpBlock to_block(const AffineMatrix& F, double shift) {
  detail::SdpBlock blk;
  blk.C = F.constant();
  if (shift != 0.0) blk.C.diagonal().array() -= shift;
  for (const auto& [k, M] : F.terms()) {
    if (M.cwiseAbs().maxCoeff() == 0.0) continue;
    blk.A.emplace_back(k, -M);
  }
  return blk;
}

Lowered lower(const ConicProblem& p, const Options& opts) {
  Lowered out;
  out.n = p.num_variables();
  const bool feasibility = p.is_feasibility();
  bool any_strict = false;
  for (const auto& c : p.psd()) any_strict = any_strict || c.strict;
  const bool use_margin = feasibility && any_strict;
  const int m = out.n + (use_margin ? 1 : 0);
  if (use_margin) out.margin = out.n;

  auto& d = out.data;
  d.m = m;
  d.b = VectorXd::Zero(m);
  if (use_margin) {
    d.b(out.margin) = 1.0;
  } else if (!feasibility) {
    for (const auto& [k, v] : p.objective().terms()) d.b(k) = -v;
  }

  const int rows = static_cast<int>(p.linear().size()) + (use_margin ? 1 : 0);
  d.lp_A = MatrixXd::Zero(rows, m);
  d.lp_c = VectorXd::Zero(rows);
  int r = 0;
  for (const auto& e : p.linear()) {
    d.lp_c(r) = -e.constant();
    for (const auto& [k, v] : e.terms()) d.lp_A(r, k) = v;
    ++r;
  }
  if (use_margin) {
    d.lp_A(r, out.margin) = 1.0;
    d.lp_c(r) = 1.0;
  }

  for (const auto& c : p.psd()) {
    const double shift = (c.strict && !feasibility) ? opts.tol.strict : 0.0;
    detail::SdpBlock blk = to_block(c.F, shift);
    if (c.strict && use_margin) {
      blk.A.emplace_back(out.margin, MatrixXd::Identity(c.F.dim(), c.F.dim()));
      out.strict_blocks.push_back(static_cast<int>(d.blocks.size()));
    }
    d.blocks.push_back(std::move(blk));
  }
  for (const auto& q : p.quadratic()) d.blocks.push_back(to_block(lower_quadratic(q, opts.tol.psd), 0.0));
  return out;
}

std::optional<double> strict_margin(const ConicProblem& p, const VectorXd& y) {
  std::optional<double> margin;
  for (const auto& c : p.psd()) {
    if (!c.strict) continue;
    const double lm = lambda_min(c.F.evaluate(y));
    margin = margin ? std::min(*margin, lm) : lm;
  }
  return margin;
}

SolveResult run_ipm(const ConicProblem& p, const Options& opts) {
  const Lowered low = lower(p, opts);
  const detail::IpmResult res = detail::solve_sdp_ipm(low.data);
  SolveResult out;
  out.iterations = res.iterations;
  switch (res.status) {
    case detail::IpmStatus::kPrimalInfeasible:
      out.status = SolveStatus::kInfeasible;
      out.message = "infeasibility certificate found";
      return out;
    case detail::IpmStatus::kDualInfeasible:
      out.status = SolveStatus::kUnbounded;
      out.message = "improving ray found";
      return out;
    case detail::IpmStatus::kStalled:
      out.status = SolveStatus::kNumericalError;
      out.message = "interior-point method stalled (gap " + std::to_string(res.gap) +
                    ", infeasibility " + std::to_string(res.infeasibility) + ")";
      return out;
    case detail::IpmStatus::kOptimal:
      break;
  }
  out.assignment = res.y.head(low.n);
  out.status = SolveStatus::kOptimal;
  out.value = p.objective().evaluate(out.assignment);
  if (low.margin >= 0) {
    out.margin = res.y(low.margin);
    if (*out.margin < opts.tol.strict) {
      out.status = SolveStatus::kInfeasible;
      out.message = "strict constraints admit no margin";
    }
  } else {
    out.margin = strict_margin(p, out.assignment);
  }
  return out;
}

class BuiltinBackend final : public SolverBackend {
 public:
  std::string name() const override { return "builtin"; }

  SolveResult solve_lp(const ConicProblem& p, const Options& opts) override {
    if (!p.psd().empty() || !p.quadratic().empty()) {
      throw Error(ErrorCode::kInvalidArgument, "solve_lp: problem has conic constraints");
    }
    const int n = p.num_variables();
    const int rows = static_cast<int>(p.linear().size());
    MatrixXd A = MatrixXd::Zero(rows, n);
    VectorXd h(rows);
    for (int r = 0; r < rows; ++r) {
      const auto& e = p.linear()[r];
      h(r) = -e.constant();
      for (const auto& [k, v] : e.terms()) A(r, k) = v;
    }
    VectorXd c = VectorXd::Zero(n);
    for (const auto& [k, v] : p.objective().terms()) c(k) = v;
    SolveResult out = solve_dense_lp(A, h, c, opts);
    if (out.optimal()) out.value = p.objective().evaluate(out.assignment);
    return out;
  }

  SolveResult solve_dense_lp(const MatrixXd& A, const VectorXd& h, const VectorXd& c,
                             const Options&) override {
    const detail::LpSolution sol = detail::solve_inequality_lp(A, h, c);
    SolveResult out;
    out.iterations = sol.iterations;
    switch (sol.status) {
      case detail::LpStatus::kOptimal:
        out.status = SolveStatus::kOptimal;
        out.assignment = sol.x;
        out.value = c.dot(sol.x);
        break;
      case detail::LpStatus::kInfeasible:
        out.status = SolveStatus::kInfeasible;
        break;
      case detail::LpStatus::kUnbounded:
        out.status = SolveStatus::kUnbounded;
        break;
      case detail::LpStatus::kIterationLimit:
        out.status = SolveStatus::kNumericalError;
        out.message = "simplex iteration limit";
        break;
    }
    return out;
  }

  SolveResult solve_qcqp(const ConicProblem& p, const Options& opts) override {
    return run_ipm(p, opts);
  }

  SolveResult solve_sdp(const ConicProblem& p, const Options& opts) override {
    return run_ipm(p, opts);
  }
};

}  // namespace

SolveResult SolverBackend::solve_dense_lp(const MatrixXd& A, const VectorXd& h,
                                          const VectorXd& c, const Options& opts) {
  ConicProblem p;
  const VectorVar x = p.add_vector(static_cast<int>(A.cols()));
  const LinearVector Ax = apply(A, x);
  for (int i = 0; i < A.rows(); ++i) p.add_linear_le(Ax[i], h(i));
  p.minimize(dot(c, x));
  return solve_lp(p, opts);
}

Residuals check_assignment(const ConicProblem& p, const VectorXd& y) {
  Residuals r;
  for (const auto& e : p.linear()) r.linear = std::max(r.linear, e.evaluate(y));
  for (const auto& q : p.quadratic()) {
    VectorXd v(q.v.size());
    for (std::size_t i = 0; i < q.v.size(); ++i) v(i) = q.v[i].evaluate(y);
    r.quadratic = std::max(r.quadratic, v.dot(q.M * v) - q.bound);
  }
  for (const auto& c : p.psd()) {
    const MatrixXd F = c.F.evaluate(y);
    const double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
    r.psd = std::max(r.psd, -lambda_min(F) / scale);
  }
  return r;
}

std::unique_ptr<SolverBackend> make_backend(std::string_view name) {
  if (name == "builtin" || name.empty()) return std::make_unique<BuiltinBackend>();
  throw Error(ErrorCode::kInvalidArgument, "unknown solver backend '" + std::string(name) + "'");
}

std::vector<std::string> available_backends() { return {"builtin"}; }

SolveResult solve_lp(const ConicProblem& p, const Options& opts) {
  return make_backend(opts.solver)->solve_lp(p, opts);
}
SolveResult solve_dense_lp(const MatrixXd& A, const VectorXd& h, const VectorXd& c,
                           const Options& opts) {
  return make_backend(opts.solver)->solve_dense_lp(A, h, c, opts);
}
SolveResult solve_qcqp(const ConicProblem& p, const Options& opts) {
  return make_backend(opts.solver)->solve_qcqp(p, opts);
}
SolveResult solve_sdp(const ConicProblem& p, const Options& opts) {
  return make_backend(opts.solver)->solve_sdp(p, opts);
}

}  // namespace rdo
