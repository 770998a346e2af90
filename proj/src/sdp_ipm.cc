#include "sdp_ipm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace rdo::detail {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

// Largest t with X + t dX >= 0 (X positive definite).
double max_step(const MatrixXd& X, const MatrixXd& dX) {
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd S = llt.matrixL().solve(dX);
  S = llt.matrixL().solve(S.transpose()).transpose();
  S = 0.5 * (S + S.transpose().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double max_step(const VectorXd& x, const VectorXd& dx) {
  double t = kInf;
  for (int k = 0; k < x.size(); ++k) {
    if (dx(k) < 0.0) t = std::min(t, -x(k) / dx(k));
  }
  return t;
}

MatrixXd spd_inverse(const MatrixXd& Z) {
  Eigen::LLT<MatrixXd> llt(Z);
  MatrixXd inv = llt.solve(MatrixXd::Identity(Z.rows(), Z.cols()));
  return 0.5 * (inv + inv.transpose());
}

class Ipm {
 public:
  Ipm(const SdpData& d, const IpmSettings& s) : d_(d), s_(s) {
    nb_ = static_cast<int>(d_.blocks.size());
    K_ = static_cast<int>(d_.lp_c.size());
    N_ = K_;
    for (const auto& blk : d_.blocks) N_ += static_cast<int>(blk.C.rows());

    double a_norm = 0.0, c_norm = d_.lp_c.size() ? d_.lp_c.lpNorm<Eigen::Infinity>() : 0.0;
    for (const auto& blk : d_.blocks) {
      c_norm = std::max(c_norm, blk.C.norm());
      for (const auto& [i, Ai] : blk.A) a_norm = std::max(a_norm, Ai.norm());
    }
    if (K_ > 0) {
      for (int i = 0; i < d_.m; ++i) a_norm = std::max(a_norm, d_.lp_A.col(i).norm());
    }
    a_norm_ = a_norm;
    c_norm_ = c_norm;
    b_norm_ = d_.b.size() ? d_.b.norm() : 0.0;
    const double b_max = d_.b.size() ? d_.b.lpNorm<Eigen::Infinity>() : 0.0;
    const double root_n = std::sqrt(static_cast<double>(std::max(N_, 1)));
    const double xi = std::max({10.0, root_n, N_ * (1.0 + b_max) / (1.0 + a_norm)});
    const double eta = std::max({10.0, root_n, c_norm, a_norm});

    y_ = VectorXd::Zero(d_.m);
    for (const auto& blk : d_.blocks) {
      const auto n = blk.C.rows();
      X_.push_back(xi * MatrixXd::Identity(n, n));
      Z_.push_back(eta * MatrixXd::Identity(n, n));
    }
    x_ = VectorXd::Constant(K_, xi);
    z_ = VectorXd::Constant(K_, eta);
  }

  IpmResult run() {
    IpmResult best;
    double best_err = kInf;
    for (int iter = 0; iter < s_.max_iterations; ++iter) {
      residuals();
      const double err = std::max({rel_p_, rel_d_, rel_gap_});
      if (err < best_err) {
        best_err = err;
        best = snapshot(iter, IpmStatus::kStalled);
      }
      if (err < s_.tolerance) return snapshot(iter, IpmStatus::kOptimal);
      if (auto cert = certificates()) return snapshot(iter, *cert);
      if (!step()) break;
    }
    residuals();
    const double err = std::max({rel_p_, rel_d_, rel_gap_});
    if (err < best_err) best = snapshot(s_.max_iterations, IpmStatus::kStalled);
    if (std::min(err, best_err) < s_.acceptable) best.status = IpmStatus::kOptimal;
    return best;
  }

 private:
  VectorXd apply_adjoint_sum(const std::vector<MatrixXd>& Xs, const VectorXd& x) const {
    VectorXd out = VectorXd::Zero(d_.m);
    for (int j = 0; j < nb_; ++j) {
      for (const auto& [i, Ai] : d_.blocks[j].A) out(i) += inner(Ai, Xs[j]);
    }
    if (K_ > 0) out += d_.lp_A.transpose() * x;
    return out;
  }

  MatrixXd weighted(int j, const VectorXd& y) const {
    MatrixXd S = MatrixXd::Zero(d_.blocks[j].C.rows(), d_.blocks[j].C.cols());
    for (const auto& [i, Ai] : d_.blocks[j].A) S += y(i) * Ai;
    return S;
  }

  void residuals() {
    rp_ = d_.b - apply_adjoint_sum(X_, x_);
    Rd_.resize(nb_);
    double rd_sq = 0.0, compl_sum = 0.0;
    pobj_ = 0.0;
    for (int j = 0; j < nb_; ++j) {
      Rd_[j] = d_.blocks[j].C - weighted(j, y_) - Z_[j];
      rd_sq += Rd_[j].squaredNorm();
      compl_sum += inner(X_[j], Z_[j]);
      pobj_ += inner(d_.blocks[j].C, X_[j]);
    }
    if (K_ > 0) {
      rd_ = d_.lp_c - d_.lp_A * y_ - z_;
      rd_sq += rd_.squaredNorm();
      compl_sum += x_.dot(z_);
      pobj_ += d_.lp_c.dot(x_);
    }
    dobj_ = d_.b.dot(y_);
    mu_ = compl_sum / std::max(N_, 1);
    rel_p_ = rp_.norm() / (1.0 + b_norm_);
    rel_d_ = std::sqrt(rd_sq) / (1.0 + c_norm_);
    rel_gap_ = std::max(std::abs(pobj_ - dobj_), compl_sum) /
               (1.0 + std::abs(pobj_) + std::abs(dobj_));
  }

  std::optional<IpmStatus> certificates() const {
    // No y is feasible: X >= 0 with A(X) ~ 0 and C . X < 0.
    const VectorXd ax = apply_adjoint_sum(X_, x_);
    if (pobj_ < 0.0 && ax.norm() * (1.0 + c_norm_) < 1e-8 * (-pobj_) * (1.0 + a_norm_)) {
      return IpmStatus::kPrimalInfeasible;
    }
    // Improving ray: sum y_i A_i <= 0 along y with b^T y > 0.
    const double ny = y_.norm();
    if (ny > 1e8 * (1.0 + c_norm_ + b_norm_) && dobj_ > 0.0) {
      const VectorXd dir = y_ / ny;
      double worst = 0.0;
      for (int j = 0; j < nb_; ++j) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(weighted(j, dir), Eigen::EigenvaluesOnly);
        worst = std::max(worst, eig.eigenvalues().maxCoeff());
      }
      if (K_ > 0) worst = std::max(worst, (d_.lp_A * dir).maxCoeff());
      if (worst <= 1e-8 * (1.0 + a_norm_) && d_.b.dot(dir) > 1e-10 * (1.0 + b_norm_)) {
        return IpmStatus::kDualInfeasible;
      }
    }
    return std::nullopt;
  }

  struct Direction {
    VectorXd dy;
    std::vector<MatrixXd> dX, dZ;
    VectorXd dx, dz;
  };

  Direction direction(double mu_target, const std::vector<MatrixXd>* corrX,
                      const VectorXd* corr_x) const {
    std::vector<MatrixXd> R(nb_);
    for (int j = 0; j < nb_; ++j) {
      R[j] = mu_target * Zinv_[j] - X_[j] - X_[j] * Rd_[j] * Zinv_[j];
      if (corrX) R[j] -= (*corrX)[j];
    }
    VectorXd r_lp;
    if (K_ > 0) {
      r_lp = (mu_target - (x_.array() * rd_.array())).matrix().cwiseQuotient(z_) - x_;
      if (corr_x) r_lp -= *corr_x;
    }
    const VectorXd rhs = rp_ - apply_adjoint_sum(R, r_lp);
    Direction out;
    out.dy = schur_.solve(rhs);
    out.dX.resize(nb_);
    out.dZ.resize(nb_);
    for (int j = 0; j < nb_; ++j) {
      const MatrixXd S = weighted(j, out.dy);
      out.dZ[j] = Rd_[j] - S;
      MatrixXd dX = R[j] + X_[j] * S * Zinv_[j];
      out.dX[j] = 0.5 * (dX + dX.transpose());
    }
    if (K_ > 0) {
      const VectorXd ady = d_.lp_A * out.dy;
      out.dz = rd_ - ady;
      out.dx = r_lp + x_.cwiseProduct(ady).cwiseQuotient(z_);
    }
    return out;
  }

  std::pair<double, double> step_lengths(const Direction& dir) const {
    double ap = kInf, ad = kInf;
    for (int j = 0; j < nb_; ++j) {
      ap = std::min(ap, max_step(X_[j], dir.dX[j]));
      ad = std::min(ad, max_step(Z_[j], dir.dZ[j]));
    }
    if (K_ > 0) {
      ap = std::min(ap, max_step(x_, dir.dx));
      ad = std::min(ad, max_step(z_, dir.dz));
    }
    return {ap, ad};
  }

  bool step() {
    Zinv_.resize(nb_);
    for (int j = 0; j < nb_; ++j) Zinv_[j] = spd_inverse(Z_[j]);

    MatrixXd M = MatrixXd::Zero(d_.m, d_.m);
    for (int j = 0; j < nb_; ++j) {
      const auto& A = d_.blocks[j].A;
      for (const auto& [i, Ai] : A) {
        const MatrixXd W = X_[j] * Ai * Zinv_[j];
        for (const auto& [k, Ak] : A) M(k, i) += inner(Ak, W);
      }
    }
    if (K_ > 0) {
      const VectorXd w = x_.cwiseQuotient(z_);
      M.noalias() += d_.lp_A.transpose() * w.asDiagonal() * d_.lp_A;
    }
    M = 0.5 * (M + M.transpose().eval());
    const double diag = M.diagonal().cwiseAbs().maxCoeff();
    M.diagonal().array() += 1e-14 * std::max(diag, 1.0);
    schur_.compute(M);
    if (schur_.info() != Eigen::Success) return false;

    const Direction pred = direction(0.0, nullptr, nullptr);
    auto [ap, ad] = step_lengths(pred);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (int j = 0; j < nb_; ++j) {
      mu_aff += inner(X_[j] + ap * pred.dX[j], Z_[j] + ad * pred.dZ[j]);
    }
    if (K_ > 0) mu_aff += (x_ + ap * pred.dx).dot(z_ + ad * pred.dz);
    mu_aff /= std::max(N_, 1);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu_, 3.0), 0.0, 1.0);

    std::vector<MatrixXd> corrX(nb_);
    for (int j = 0; j < nb_; ++j) corrX[j] = pred.dX[j] * pred.dZ[j] * Zinv_[j];
    VectorXd corr_x;
    if (K_ > 0) corr_x = pred.dx.cwiseProduct(pred.dz).cwiseQuotient(z_);
    const Direction dir = direction(sigma * mu_, &corrX, K_ > 0 ? &corr_x : nullptr);
    if (!dir.dy.allFinite()) return false;
    std::tie(ap, ad) = step_lengths(dir);
    const double tau = 0.95;
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);
    if (ap < 1e-14 && ad < 1e-14) return false;

    for (int j = 0; j < nb_; ++j) {
      X_[j] += ap * dir.dX[j];
      Z_[j] += ad * dir.dZ[j];
      X_[j] = 0.5 * (X_[j] + X_[j].transpose().eval());
      Z_[j] = 0.5 * (Z_[j] + Z_[j].transpose().eval());
    }
    if (K_ > 0) {
      x_ += ap * dir.dx;
      z_ += ad * dir.dz;
    }
    y_ += ad * dir.dy;
    return true;
  }

  IpmResult snapshot(int iter, IpmStatus status) const {
    IpmResult r;
    r.status = status;
    r.y = y_;
    r.objective = dobj_;
    r.gap = rel_gap_;
    r.infeasibility = std::max(rel_p_, rel_d_);
    r.iterations = iter;
    return r;
  }

  const SdpData& d_;
  IpmSettings s_;
  int nb_ = 0, K_ = 0, N_ = 0;
  double a_norm_ = 0.0, c_norm_ = 0.0, b_norm_ = 0.0;

  VectorXd y_, x_, z_;
  std::vector<MatrixXd> X_, Z_, Zinv_, Rd_;
  VectorXd rp_, rd_;
  double pobj_ = 0.0, dobj_ = 0.0, mu_ = 0.0;
  double rel_p_ = kInf, rel_d_ = kInf, rel_gap_ = kInf;
  Eigen::LDLT<MatrixXd> schur_;
};

}  // namespace

IpmResult solve_sdp_ipm(const SdpData& data, const IpmSettings& settings) {
  Ipm ipm(data, settings);
  return ipm.run();
}

}  // namespace rdo::detail
