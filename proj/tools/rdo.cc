// rdo: bounds for linear programs whose feasible points must keep their
// whole linear trajectory inside a polytope.

#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rdo/cli/commands.h"
#include "rdo/cli/instance_io.h"

namespace {

using rdo::cli::Settings;
using Command = std::function<int(const rdo::RdoInstance&, const Settings&, std::ostream&)>;

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const rdo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust-to-dynamics linear programs: outer and inner bound hierarchies"};
  app.require_subcommand(1);
  app.fallthrough();

  Settings settings;
  double tol = 0.0;
  int r_max = 0, level = 0;
  double rho_star = 0.0;
  auto* tol_opt = app.add_option("--tol", tol, "fixed-point slack; JSR bisection tolerance");
  auto* rmax_opt = app.add_option("--r-max", r_max, "largest level r to compute");
  auto* l_opt = app.add_option("--l", level, "path-complete level for switched dynamics");
  app.add_option("--solver", settings.solver, "solver backend (RDO_SOLVER overrides)");
  app.add_option("--out", settings.out, "output file for plot and gen-hard");

  CLI::Option* rho_opt = nullptr;
  auto finalize = [&] {
    if (*tol_opt) settings.tol = tol;
    if (*rmax_opt) settings.r_max = r_max;
    if (*l_opt) settings.l = level;
    if (rho_opt && *rho_opt) settings.rho_star = rho_star;
  };

  std::string path;
  int result = 0;
  auto instance_command = [&](const std::string& name, const std::string& help, Command run) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("instance", path, "instance file (JSON)")->required();
    sub->callback([&, run] {
      finalize();
      result = guarded([&] { return run(rdo::cli::parse_instance(path), settings, std::cout); });
    });
    return sub;
  };

  instance_command("check", "validate an instance and report its properties", rdo::cli::cmd_check);
  instance_command("lower", "outer hierarchy lower bounds", rdo::cli::cmd_lower);
  instance_command("upper", "inner hierarchy upper bounds", rdo::cli::cmd_upper);
  instance_command("solve", "both hierarchies until they meet", rdo::cli::cmd_solve);
  auto* bound = instance_command("bound", "a-priori level at which S_r stops changing",
                                 rdo::cli::cmd_bound);
  rho_opt = bound->add_option("--rho-star", rho_star, "known bound on rho(G)");
  auto* jsr = instance_command("jsr", "joint spectral radius bounds", rdo::cli::cmd_jsr);
  jsr->add_option("--k-max", settings.k_max, "product length for the lower bound");
  auto* plot = instance_command("plot", "2-D plot data for P, S_r and E_r", rdo::cli::cmd_plot);
  plot->add_option("--r", settings.r, "level to plot");

  int nodes = 0, k_max = 30;
  std::string edges;
  CLI::App* gen = app.add_subcommand("gen-hard", "instance encoding path lengths in a digraph");
  gen->add_option("--nodes", nodes, "number of nodes")->required();
  gen->add_option("--edges", edges, "comma-separated edges i-j, 1-based");
  gen->add_option("--k-max", k_max, "horizon for the membership check");
  gen->callback([&] {
    finalize();
    result = guarded([&] {
      return rdo::cli::cmd_gen_hard(rdo::cli::parse_edges(nodes, edges), k_max, settings,
                                    std::cout);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return result;
}
