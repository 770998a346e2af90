#pragma once

// Command implementations behind the rdo executable. Each returns the
// process exit status: 0 for FixedPoint, Converged or a definitive answer,
// 2 for LevelCapReached, 1 for errors.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rdo/cli/gen_hard.h"
#include "rdo/core.h"

namespace rdo::cli {

struct Settings {
  std::optional<double> tol;   // fixed-point slack; also the JSR bisection tolerance
  std::optional<int> r_max;
  std::optional<int> l;        // path-complete level; default tries 1, 2, 3
  std::string solver = "builtin";
  std::string out;             // output file for plot and gen-hard; empty means stdout
  int k_max = 2;               // product depth for jsr lower bounds
  int r = 0;                   // plot level
  std::optional<double> rho_star;
};

// Builds solver options. The RDO_SOLVER environment variable overrides
// settings.solver; unknown names raise InvalidArgument.
Options make_options(const Settings& settings);

struct SolveReport {
  BoundLedger ledger;
  LevelStatus status = LevelStatus::kOpen;
  std::optional<int> l_used;             // switched instances
  std::optional<std::string> upper_skipped;  // why no upper bounds were computed
  std::optional<VectorXd> witness;       // best inner witness
  std::optional<double> optimum;         // set on FixedPoint and Converged
};

// Levels r = 0..r_max of both hierarchies. Stops at the first outer fixed
// point or when upper - lower <= tol.gap (1 + |lower|). With require_upper,
// a failed precondition of the inner hierarchy is an error; otherwise only
// lower bounds are produced and upper_skipped says why.
SolveReport run_solve(const RdoInstance& inst, int r_max, std::optional<int> l,
                      bool require_upper, const Options& opts);

// Two rows in the layout of a bound table: lower row, then upper row.
std::string format_table(const BoundLedger& ledger, bool lower_row, bool upper_row);

int cmd_check(const RdoInstance& inst, const Settings& s, std::ostream& out);
int cmd_lower(const RdoInstance& inst, const Settings& s, std::ostream& out);
int cmd_upper(const RdoInstance& inst, const Settings& s, std::ostream& out);
int cmd_solve(const RdoInstance& inst, const Settings& s, std::ostream& out);
int cmd_bound(const RdoInstance& inst, const Settings& s, std::ostream& out);
int cmd_jsr(const RdoInstance& inst, const Settings& s, std::ostream& out);
int cmd_plot(const RdoInstance& inst, const Settings& s, std::ostream& out);
int cmd_gen_hard(const Digraph& g, int k_max, const Settings& s, std::ostream& out);

// "1-2,2-3" with 1-based node numbers.
Digraph parse_edges(int nodes, const std::string& edges);

}  // namespace rdo::cli
