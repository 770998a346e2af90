#pragma once

// Instances whose membership question encodes path lengths in a digraph:
// G is the adjacency matrix, z = e_n, A = -e_1^T G, b = -1/2. Then
// A G^k z = -(number of length-(k+1) paths from node 1 to node n), so z
// stays feasible exactly while every length has such a path.

#include <utility>
#include <vector>

#include "rdo/cli/instance_io.h"
#include "rdo/core.h"

namespace rdo::cli {

struct Digraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based (from, to)
};

// The document holds the instance and z as "query". Requires nodes >= 2.
InstanceDocument gen_hard_instance(const Digraph& g);

// Membership of z up to k_max. When node 1 has no outgoing edge the single
// row reads 0 <= -1/2, P is empty and the verdict is ExcludedAt{0}.
MembershipVerdict hard_instance_membership(const Digraph& g, int k_max, const Options& opts = {});

}  // namespace rdo::cli
