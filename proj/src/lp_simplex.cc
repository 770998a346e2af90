#include "lp_simplex.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>

namespace rdo::detail {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPivotTol = 1e-9;
constexpr double kOptimalityTol = 1e-10;
constexpr int kDegenerateRunBeforeBland = 50;

enum class StdStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct StdResult {
  StdStatus status = StdStatus::kIterationLimit;
  VectorXd lambda;  // structural values
  VectorXd pi;      // multipliers of the (sign-restored) equality rows
  double value = 0.0;
  int iterations = 0;
};

// min cost^T y  s.t.  W^T y = rhs, y >= 0.  Column k of the constraint
// matrix is row k of W; p = W.cols() equality rows.
class StandardFormSimplex {
 public:
  StandardFormSimplex(const MatrixXd& W, const VectorXd& rhs, const VectorXd& cost)
      : K_(static_cast<int>(W.rows())), p_(static_cast<int>(W.cols())), W_(W), rhs_(rhs),
        cost_(cost), sign_(VectorXd::Ones(p_)) {
    for (int i = 0; i < p_; ++i) {
      if (rhs_(i) < 0.0) {
        sign_(i) = -1.0;
        rhs_(i) = -rhs_(i);
        W_.col(i) *= -1.0;
      }
    }
    basis_.resize(p_);
    basic_.assign(K_ + p_, false);
    for (int i = 0; i < p_; ++i) {
      basis_[i] = K_ + i;
      basic_[K_ + i] = true;
    }
  }

  StdResult run() {
    StdResult out;
    const int limit = std::max(1000, 50 * (K_ + p_));

    if (!iterate(/*phase_one=*/true, limit, out.iterations)) {
      out.status = StdStatus::kIterationLimit;
      return out;
    }
    if (phase_one_unbounded_) {
      out.status = StdStatus::kIterationLimit;
      return out;
    }
    factor();
    double artificial = 0.0;
    for (int i = 0; i < p_; ++i) {
      if (basis_[i] >= K_) artificial += std::max(xB_(i), 0.0);
    }
    if (artificial > 1e-8 * (1.0 + rhs_.lpNorm<1>())) {
      out.status = StdStatus::kInfeasible;
      return out;
    }

    bland_ = false;
    degenerate_run_ = 0;
    if (!iterate(/*phase_one=*/false, limit, out.iterations)) {
      out.status = unbounded_ ? StdStatus::kUnbounded : StdStatus::kIterationLimit;
      return out;
    }
    factor();
    out.status = StdStatus::kOptimal;
    out.lambda = VectorXd::Zero(K_);
    for (int i = 0; i < p_; ++i) {
      if (basis_[i] < K_) out.lambda(basis_[i]) = std::max(xB_(i), 0.0);
    }
    out.pi = multipliers(false).cwiseProduct(sign_);
    out.value = cost_.dot(out.lambda);
    return out;
  }

 private:
  VectorXd column(int j) const {
    if (j < K_) return W_.row(j).transpose();
    VectorXd e = VectorXd::Zero(p_);
    e(j - K_) = 1.0;
    return e;
  }

  double cost(int j, bool phase_one) const {
    if (phase_one) return j >= K_ ? 1.0 : 0.0;
    return j >= K_ ? 0.0 : cost_(j);
  }

  void factor() {
    MatrixXd B(p_, p_);
    for (int i = 0; i < p_; ++i) B.col(i) = column(basis_[i]);
    lu_.compute(B);
    luT_.compute(B.transpose());
    xB_ = lu_.solve(rhs_);
  }

  VectorXd multipliers(bool phase_one) const {
    VectorXd cB(p_);
    for (int i = 0; i < p_; ++i) cB(i) = cost(basis_[i], phase_one);
    return luT_.solve(cB);
  }

  // Returns false on iteration limit or unboundedness.
  bool iterate(bool phase_one, int limit, int& iterations) {
    while (true) {
      if (iterations >= limit) return false;
      factor();
      const VectorXd pi = multipliers(phase_one);

      // Pricing over structural columns only; artificials never re-enter.
      int entering = -1;
      double best = -kOptimalityTol;
      if (K_ > 0) {
        VectorXd reduced = -(W_ * pi);
        if (!phase_one) reduced += cost_;
        for (int k = 0; k < K_; ++k) {
          if (basic_[k]) continue;
          const double scale = phase_one ? 1.0 : 1.0 + std::abs(cost_(k));
          const double d = reduced(k) / scale;
          if (d < best) {
            entering = k;
            if (bland_) break;
            best = d;
          }
        }
      }
      if (entering < 0) return true;

      const VectorXd u = lu_.solve(column(entering));
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      double best_pivot = 0.0;
      for (int i = 0; i < p_; ++i) {
        double ratio;
        if (!phase_one && basis_[i] >= K_) {
          // A basic artificial sits at zero and must stay there.
          if (std::abs(u(i)) <= kPivotTol) continue;
          ratio = 0.0;
        } else {
          if (u(i) <= kPivotTol) continue;
          ratio = std::max(xB_(i), 0.0) / u(i);
        }
        const bool better =
            leave < 0 || ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 &&
             (bland_ ? basis_[i] < basis_[leave] : std::abs(u(i)) > best_pivot));
        if (better) {
          leave = i;
          best_ratio = ratio;
          best_pivot = std::abs(u(i));
        }
      }
      if (leave < 0) {
        if (phase_one) phase_one_unbounded_ = true;
        unbounded_ = !phase_one;
        return false;
      }

      if (best_ratio <= 1e-12) {
        if (++degenerate_run_ >= kDegenerateRunBeforeBland) bland_ = true;
      } else {
        degenerate_run_ = 0;
      }
      basic_[basis_[leave]] = false;
      basis_[leave] = entering;
      basic_[entering] = true;
      ++iterations;
    }
  }

  int K_, p_;
  MatrixXd W_;
  VectorXd rhs_, cost_, sign_;
  std::vector<int> basis_;
  std::vector<bool> basic_;
  Eigen::PartialPivLU<MatrixXd> lu_, luT_;
  VectorXd xB_;
  bool bland_ = false;
  int degenerate_run_ = 0;
  bool unbounded_ = false;
  bool phase_one_unbounded_ = false;
};

}  // namespace

LpSolution solve_inequality_lp(const MatrixXd& A, const VectorXd& h, const VectorXd& c) {
  const int n = static_cast<int>(A.cols());
  LpSolution out;

  // Row normalization; rows that vanish are either trivially satisfied or
  // certify emptiness.
  std::vector<int> keep;
  keep.reserve(A.rows());
  double max_norm = 0.0;
  VectorXd norms(A.rows());
  for (int k = 0; k < A.rows(); ++k) {
    norms(k) = A.row(k).norm();
    max_norm = std::max(max_norm, norms(k));
  }
  for (int k = 0; k < A.rows(); ++k) {
    if (norms(k) <= std::numeric_limits<double>::min() * 1e10) {
      if (h(k) < -1e-12) {
        out.status = LpStatus::kInfeasible;
        return out;
      }
      continue;
    }
    keep.push_back(k);
  }
  const int K = static_cast<int>(keep.size());
  MatrixXd W(K, n);
  VectorXd hs(K);
  for (int i = 0; i < K; ++i) {
    const int k = keep[i];
    W.row(i) = A.row(k) / norms(k);
    hs(i) = h(k) / norms(k);
  }

  if (K == 0) {
    if (c.cwiseAbs().maxCoeff() == 0.0 || n == 0) {
      out.status = LpStatus::kOptimal;
      out.x = VectorXd::Zero(n);
      out.value = 0.0;
    } else {
      out.status = LpStatus::kUnbounded;
    }
    return out;
  }

  StandardFormSimplex dual(W, -c, hs);
  StdResult res = dual.run();
  out.iterations = res.iterations;
  switch (res.status) {
    case StdStatus::kOptimal:
      out.status = LpStatus::kOptimal;
      out.x = res.pi;
      out.value = c.dot(out.x);
      return out;
    case StdStatus::kUnbounded:
      out.status = LpStatus::kInfeasible;
      return out;
    case StdStatus::kIterationLimit:
      out.status = LpStatus::kIterationLimit;
      return out;
    case StdStatus::kInfeasible:
      break;
  }

  // The dual is infeasible: the primal is unbounded or empty. Decide by
  // the Farkas system  W^T y = 0, 1^T y = 1, y >= 0, min h^T y < 0.
  MatrixXd W2(K, n + 1);
  W2.leftCols(n) = W;
  W2.col(n).setOnes();
  VectorXd rhs2 = VectorXd::Zero(n + 1);
  rhs2(n) = 1.0;
  StandardFormSimplex farkas(W2, rhs2, hs);
  StdResult fr = farkas.run();
  out.iterations += fr.iterations;
  if (fr.status == StdStatus::kOptimal && fr.value < -1e-9) {
    out.status = LpStatus::kInfeasible;
  } else if (fr.status == StdStatus::kIterationLimit) {
    out.status = LpStatus::kIterationLimit;
  } else {
    out.status = LpStatus::kUnbounded;
  }
  return out;
}

}  // namespace rdo::detail
