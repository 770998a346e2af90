#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rdo::detail {

// One dense semidefinite block of  C - sum_i y_i A_i >= 0.
struct SdpBlock {
  Eigen::MatrixXd C;
  std::vector<std::pair<int, Eigen::MatrixXd>> A;  // sparse in the variable index
};

// maximize b^T y  s.t.  C_j - sum_i y_i A_ij >= 0 for every dense block j,
//                        lp_c - lp_A y >= 0 (elementwise).
// Its conic dual is  minimize sum_j C_j . X_j + lp_c^T x
//                    s.t. sum_j A_ij . X_j + (lp_A^T x)_i = b_i, X, x >= 0.
struct SdpData {
  int m = 0;
  Eigen::VectorXd b;
  std::vector<SdpBlock> blocks;
  Eigen::MatrixXd lp_A;
  Eigen::VectorXd lp_c;
};

enum class IpmStatus { kOptimal, kPrimalInfeasible, kDualInfeasible, kStalled };

struct IpmSettings {
  double tolerance = 1e-9;
  double acceptable = 1e-6;
  int max_iterations = 200;
};

struct IpmResult {
  IpmStatus status = IpmStatus::kStalled;
  Eigen::VectorXd y;
  double objective = 0.0;  // b^T y
  double gap = 0.0;
  double infeasibility = 0.0;
  int iterations = 0;
};

// Infeasible-start primal-dual path following with the HKM search
// direction and Mehrotra predictor-corrector steps. kPrimalInfeasible
// means no y satisfies the constraints; kDualInfeasible means b^T y is
// unbounded above.
IpmResult solve_sdp_ipm(const SdpData& data, const IpmSettings& settings = {});

}  // namespace rdo::detail
