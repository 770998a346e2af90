#include "rdo/cli/gen_hard.h"

namespace rdo::cli {

InstanceDocument gen_hard_instance(const Digraph& g) {
  if (g.nodes < 2) throw Error(ErrorCode::kInvalidArgument, "gen-hard needs at least 2 nodes");
  const int n = g.nodes;
  MatrixXd G = MatrixXd::Zero(n, n);
  for (const auto& [from, to] : g.edges) {
    if (from < 0 || from >= n || to < 0 || to >= n) {
      throw Error(ErrorCode::kInvalidArgument, "edge endpoint outside 1.." + std::to_string(n));
    }
    G(from, to) = 1.0;
  }
  InstanceDocument doc;
  RawInstance& raw = doc.raw;
  raw.name = "path_lengths_" + std::to_string(n);
  raw.c.assign(n, 0.0);
  raw.A.assign(1, std::vector<double>(n));
  for (int j = 0; j < n; ++j) raw.A[0][j] = 0.0 - G(0, j);  // no negative zeros in the file
  raw.b = {-0.5};
  raw.Gs.assign(1, std::vector<std::vector<double>>(n, std::vector<double>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) raw.Gs[0][i][j] = G(i, j);
  }
  doc.query = VectorXd::Unit(n, n - 1);
  return doc;
}

MembershipVerdict hard_instance_membership(const Digraph& g, int k_max, const Options& opts) {
  const InstanceDocument doc = gen_hard_instance(g);
  bool zero_row = true;
  for (double v : doc.raw.A[0]) zero_row = zero_row && v == 0.0;
  if (zero_row) return ExcludedAt{0, {}, 0.5};
  return membership_by_simulation(*doc.query, validate_instance(doc.raw), k_max, opts);
}

}  // namespace rdo::cli
