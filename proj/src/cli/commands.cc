#include "rdo/cli/commands.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <variant>

#include "rdo/cli/instance_io.h"
#include "rdo/cli/plot.h"
#include "rdo/inner.h"
#include "rdo/numlin.h"
#include "rdo/outer.h"
#include "rdo/switched.h"

namespace rdo::cli {

namespace {

std::string fixed4(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string general(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string point_text(const VectorXd& x) {
  std::string s = "(";
  for (int i = 0; i < x.size(); ++i) s += (i ? ", " : "") + general(x(i));
  return s + ")";
}

std::string matrix_lines(const MatrixXd& M, const std::string& indent) {
  std::string s;
  for (int i = 0; i < M.rows(); ++i) {
    s += indent + "[";
    for (int j = 0; j < M.cols(); ++j) s += (j ? ", " : "") + general(M(i, j));
    s += "]\n";
  }
  return s;
}

int exit_code(LevelStatus status) { return status == LevelStatus::kLevelCapReached ? 2 : 0; }

// The level l used for switched upper bounds: the requested one, or the
// first of 1, 2, 3 with a path-complete certificate.
int choose_level(const RdoInstance& inst, std::optional<int> l, const Options& opts) {
  if (l) {
    if (!path_complete_feasible(inst.dynamics, *l, opts)) {
      throw Error(ErrorCode::kInfeasibleLevel,
                  "no path-complete certificate at l = " + std::to_string(*l));
    }
    return *l;
  }
  for (int k = 1; k <= 3; ++k) {
    if (path_complete_feasible(inst.dynamics, k, opts)) return k;
  }
  throw Error(ErrorCode::kInfeasibleLevel, "no path-complete certificate for l <= 3");
}

// Checks the inner hierarchy's preconditions; returns the level for
// switched instances.
std::optional<int> prepare_inner(const RdoInstance& inst, std::optional<int> l,
                                 const Options& opts) {
  if (!inst.dynamics.is_switched() && spectral_radius(inst.dynamics[0]) >= 1.0) {
    throw Error(ErrorCode::kUnstableDynamics, "upper bounds need rho(G) < 1");
  }
  if (!check_origin_interior(inst.polytope)) {
    throw Error(ErrorCode::kOriginNotInterior, "upper bounds need every b_i > 0");
  }
  if (!check_bounded(inst.polytope, opts)) {
    throw Error(ErrorCode::kUnboundedPolytope, "upper bounds need a bounded P");
  }
  if (!inst.dynamics.is_switched()) return std::nullopt;
  return choose_level(inst, l, opts);
}

std::string status_line(const SolveReport& rep) {
  std::string s = "status: " + to_string(rep.status);
  if (!rep.ledger.empty()) s += " at r = " + std::to_string(rep.ledger.back().r);
  return s + "\n";
}

}  // namespace

Options make_options(const Settings& settings) {
  Options opts;
  const char* env = std::getenv("RDO_SOLVER");
  opts.solver = (env && *env) ? std::string(env) : settings.solver;
  make_backend(opts.solver);  // rejects unknown names
  if (settings.tol) {
    if (!(*settings.tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--tol must be positive");
    opts.tol.fixed_point = *settings.tol;
  }
  return opts;
}

SolveReport run_solve(const RdoInstance& inst, int r_max, std::optional<int> l,
                      bool require_upper, const Options& opts) {
  if (r_max < 0) throw Error(ErrorCode::kInvalidArgument, "r_max must be nonnegative");
  SolveReport rep{BoundLedger(opts.tol.gap), LevelStatus::kOpen, std::nullopt, std::nullopt,
                  std::nullopt, std::nullopt};
  bool with_upper = true;
  try {
    rep.l_used = prepare_inner(inst, l, opts);
  } catch (const Error& e) {
    if (require_upper) throw;
    with_upper = false;
    rep.upper_skipped = e.what();
  }

  for (int r = 0; r <= r_max; ++r) {
    LedgerRow row;
    row.r = r;
    bool fixed = false;
    try {
      const OuterLevel lo = lower_bound(inst, r, opts);
      row.lower = lo.lower;
      if (lo.status == SolveStatus::kInfeasible) {
        row.status = LevelStatus::kInfeasible;
        rep.ledger.append(std::move(row));
        rep.status = LevelStatus::kInfeasible;
        return rep;
      }
      if (with_upper) {
        if (rep.l_used) {
          const SwitchedInnerLevel up = switched_inner_sdp(inst, *rep.l_used, r, opts);
          row.upper = up.value;
          row.witness = up.witness;
        } else {
          const InnerLevel up = inner_sdp(inst, r, opts);
          row.upper = up.value;
          row.witness = up.witness;
        }
      }
      fixed = fixed_point_reached(inst, r, opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kProductCapExceeded) throw;
      // The next word length is beyond the product cap.
      if (row.lower) {
        row.status = LevelStatus::kLevelCapReached;
        rep.ledger.append(std::move(row));
      } else if (!rep.ledger.empty()) {
        rep.ledger.back().status = LevelStatus::kLevelCapReached;
      }
      rep.status = LevelStatus::kLevelCapReached;
      break;
    }
    if (row.witness) rep.witness = row.witness;
    const bool converged =
        row.lower && row.upper && std::isfinite(*row.lower) &&
        *row.upper - *row.lower <= opts.tol.gap * (1.0 + std::abs(*row.lower));
    if (fixed) {
      row.status = LevelStatus::kFixedPoint;
      rep.optimum = row.lower;
    } else if (converged) {
      row.status = LevelStatus::kConverged;
      rep.optimum = row.upper;
    } else if (r == r_max) {
      row.status = LevelStatus::kLevelCapReached;
    }
    rep.status = row.status;
    rep.ledger.append(std::move(row));
    if (fixed || converged) break;
  }
  return rep;
}

std::string format_table(const BoundLedger& ledger, bool lower_row, bool upper_row) {
  const int label_width = 38;
  const int col = 10;
  auto pad = [](std::string s, int w) {
    if (static_cast<int>(s.size()) < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  std::string head = std::string(label_width, ' ');
  for (const auto& row : ledger.rows()) head += pad("r=" + std::to_string(row.r), col);
  std::string out = head + "\n";
  auto line = [&](const std::string& label, auto get) {
    std::string s = label;
    s.resize(label_width, ' ');
    for (const auto& row : ledger.rows()) {
      const std::optional<double> v = get(row);
      s += pad(v ? fixed4(*v) : "n/a", col);
    }
    return s + "\n";
  };
  if (lower_row) {
    out += line("Lower bounds (min c^T x over S_r)", [](const LedgerRow& r) { return r.lower; });
  }
  if (upper_row) {
    out += line("Upper bounds (min c^T x over I_r)", [](const LedgerRow& r) { return r.upper; });
  }
  return out;
}

int cmd_check(const RdoInstance& inst, const Settings& s, std::ostream& out) {
  const Options opts = make_options(s);
  out << "instance: " << (inst.name.empty() ? "(unnamed)" : inst.name) << "\n";
  out << "n = " << inst.dim() << ", m = " << inst.polytope.rows()
      << ", s = " << inst.dynamics.count() << "\n";
  if (inst.dynamics.is_switched()) {
    out << "jsr lower bound (products up to length 2): "
        << general(jsr_lower_bound(inst.dynamics, 2, opts)) << "\n";
  } else {
    const double rho = spectral_radius(inst.dynamics[0]);
    out << "spectral radius: " << general(rho) << (rho < 1.0 ? " (stable)" : " (not stable)")
        << "\n";
    if (inst.rho_star) {
      out << "rho_star: " << general(*inst.rho_star)
          << (rho <= *inst.rho_star ? " (holds)" : " (violated)") << "\n";
    }
  }
  out << "P bounded: " << (check_bounded(inst.polytope, opts) ? "yes" : "no") << "\n";
  out << "origin in interior of P: " << (check_origin_interior(inst.polytope) ? "yes" : "no")
      << "\n";
  return 0;
}

int cmd_lower(const RdoInstance& inst, const Settings& s, std::ostream& out) {
  const Options opts = make_options(s);
  const BoundLedger ledger = solve_outer(inst, s.r_max.value_or(default_r_max(inst)), opts);
  out << format_table(ledger, true, false);
  const LedgerRow& last = ledger.back();
  out << "status: " << to_string(last.status) << " at r = " << last.r << "\n";
  if (last.status == LevelStatus::kFixedPoint && last.lower) {
    out << "optimal value: " << fixed4(*last.lower) << "\n";
    out << "|optimal value|: " << fixed4(std::abs(*last.lower))
        << " (sign convention: c^T x is minimized)\n";
  }
  if (last.witness) out << "argmin over S_r: " << point_text(*last.witness) << "\n";
  return exit_code(last.status);
}

int cmd_upper(const RdoInstance& inst, const Settings& s, std::ostream& out) {
  const Options opts = make_options(s);
  const SolveReport rep =
      run_solve(inst, s.r_max.value_or(default_r_max(inst)), s.l, /*require_upper=*/true, opts);
  out << format_table(rep.ledger, false, true);
  if (rep.l_used) out << "path-complete level: l = " << *rep.l_used << "\n";
  out << status_line(rep);
  if (rep.witness) out << "witness: " << point_text(*rep.witness) << "\n";
  return exit_code(rep.status);
}

int cmd_solve(const RdoInstance& inst, const Settings& s, std::ostream& out) {
  const Options opts = make_options(s);
  const SolveReport rep =
      run_solve(inst, s.r_max.value_or(default_r_max(inst)), s.l, /*require_upper=*/false, opts);
  out << "instance: " << (inst.name.empty() ? "(unnamed)" : inst.name) << " (n = " << inst.dim()
      << ", m = " << inst.polytope.rows() << ", s = " << inst.dynamics.count() << ")\n";
  out << format_table(rep.ledger, true, !rep.upper_skipped);
  if (rep.upper_skipped) out << "upper bounds skipped: " << *rep.upper_skipped << "\n";
  out << status_line(rep);
  if (rep.optimum) {
    out << "optimal value: " << fixed4(*rep.optimum) << "\n";
    out << "|optimal value|: " << fixed4(std::abs(*rep.optimum))
        << " (sign convention: c^T x is minimized)\n";
  }
  if (rep.witness) out << "witness: " << point_text(*rep.witness) << "\n";
  if (rep.l_used) {
    out << "certificate: path-complete family at l = " << *rep.l_used << " proves rho < 1\n";
  } else if (!rep.upper_skipped) {
    out << "certificate: ellipsoid from the inner SDP at each level, invariant and inside P\n";
  }
  return exit_code(rep.status);
}

int cmd_bound(const RdoInstance& inst, const Settings& s, std::ostream& out) {
  const Options opts = make_options(s);
  const StepBound b = convergence_bound(inst, opts);
  auto report = [&](const std::string& title, const StepBound& sb) {
    out << title << "\n";
    out << "  M =\n" << matrix_lines(sb.M, "    ");
    out << "  alpha1 = " << general(sb.alpha1) << "\n";
    out << "  alpha2 = " << general(sb.alpha2) << "\n";
    out << "  gamma  = " << general(sb.gamma) << "\n";
    out << "  r_bar  = " << sb.r_bar << "\n";
    out << "  fixed point at r_bar: "
        << (fixed_point_reached(inst, sb.r_bar, opts) ? "yes" : "no") << "\n";
  };
  report("step bound (Lyapunov M, Gershgorin gamma):", b);
  const std::optional<double> rho_star = s.rho_star ? s.rho_star : inst.rho_star;
  if (rho_star) {
    report("step bound with rho_star = " + general(*rho_star) + ":",
           convergence_bound_fixed_rho(inst, *rho_star, opts));
  }
  return 0;
}

int cmd_jsr(const RdoInstance& inst, const Settings& s, std::ostream& out) {
  const Options opts = make_options(s);
  const double tol = s.tol.value_or(1e-3);
  const int max_level = s.l.value_or(3);
  const Dynamics& dyn = inst.dynamics;
  out << "jsr lower bound (products up to length " << s.k_max
      << "): " << general(jsr_lower_bound(dyn, s.k_max, opts)) << "\n";

  std::optional<int> first;
  std::string pattern;
  for (int l = 1; l <= max_level; ++l) {
    const bool ok = path_complete_feasible(dyn, l, opts).has_value();
    if (ok && !first) first = l;
    pattern += (l > 1 ? ", " : "") + ("l=" + std::to_string(l)) + (ok ? " feasible" : " infeasible");
  }
  out << pattern << "\n";

  const int level = first.value_or(max_level);
  try {
    const JsrBounds b = jsr_upper_bound(dyn, level, tol, opts);
    out << "bracket: lower = " << general(b.lower) << ", upper = " << general(b.upper)
        << " (l = " << b.l_used << ", tol = " << general(tol) << ")\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBracketFailure) throw;
    double top = 0.0;
    for (const auto& G : dyn.matrices()) top = std::max(top, spectral_norm(G));
    out << "bracket: level " << level << " cannot certify the norm bound; upper = " << general(top)
        << " (max spectral norm)\n";
  }
  return 0;
}

int cmd_plot(const RdoInstance& inst, const Settings& s, std::ostream& out) {
  const Options opts = make_options(s);
  const std::string text = format_plot(plot_instance(inst, s.r, opts));
  if (s.out.empty()) {
    out << text;
  } else {
    std::ofstream f(s.out, std::ios::binary);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + s.out);
    f << text;
    out << "wrote " << s.out << "\n";
  }
  return 0;
}

int cmd_gen_hard(const Digraph& g, int k_max, const Settings& s, std::ostream& out) {
  const Options opts = make_options(s);
  const std::string doc = emit_document(gen_hard_instance(g));
  if (s.out.empty()) {
    out << doc;
  } else {
    std::ofstream f(s.out, std::ios::binary);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + s.out);
    f << doc;
  }
  const MembershipVerdict v = hard_instance_membership(g, k_max, opts);
  if (const auto* e = std::get_if<ExcludedAt>(&v)) {
    out << "query point excluded at k = " << e->k << ": no path of length " << e->k + 1
        << " from node 1 to node " << g.nodes << "\n";
  } else {
    out << "query point inside up to k = " << k_max << ": paths of every length 1.." << k_max + 1
        << " from node 1 to node " << g.nodes << "\n";
  }
  return 0;
}

Digraph parse_edges(int nodes, const std::string& edges) {
  Digraph g;
  g.nodes = nodes;
  std::stringstream in(edges);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    int a = 0, b = 0;
    char dash = 0;
    std::stringstream pair(item);
    if (!(pair >> a >> dash >> b) || dash != '-') {
      throw Error(ErrorCode::kParseError, "edge \"" + item + "\" is not of the form i-j");
    }
    if (a < 1 || a > nodes || b < 1 || b > nodes) {
      throw Error(ErrorCode::kInvalidArgument, "edge \"" + item + "\" names a node outside 1.." +
                                                   std::to_string(nodes));
    }
    g.edges.emplace_back(a - 1, b - 1);
  }
  return g;
}

}  // namespace rdo::cli
