// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skeldd/driver.hpp"

namespace {

void add_common_options(CLI::App* cmd, skeldd::RunSpec& spec, std::string& solver_name) {
  cmd->add_option("--mesh", spec.mesh, "'disk' or a mesh file (.msh v2 / native json)");
  cmd->add_option("--radius", spec.radius, "disk radius");
  cmd->add_option("--nlambda", spec.nlambda, "points per wavelength (>= 5)");
  cmd->add_option("--kappa", spec.kappa, "wavenumber");
  cmd->add_option("--partition", spec.partition, "pie:J | strip:J | file:PATH");
  cmd->add_option("--skeleton", spec.skeleton, "thin | layers:k | with-boundary");
  cmd->add_option("--inductance", spec.inductance, "despres | schur | schur-interface | scalar");
  cmd->add_flag("--interface-decouple", spec.interface_decouple,
                "decouple Despres blocks across interface classes");
  cmd->add_option("--medium", spec.medium,
                  "homogeneous | flower-heterogeneous | flower-dissipative | json:PATH");
  cmd->add_option("--solver", solver_name, "richardson | gmres");
  cmd->add_option("--damping", spec.solver.damping, "Richardson relaxation parameter");
  cmd->add_option("--restart", spec.solver.restart, "GMRES restart length");
  cmd->add_option("--tol", spec.solver.tol, "outer relative tolerance");
  cmd->add_option("--max-iters", spec.solver.max_iterations, "outer iteration cap");
  cmd->add_option("--pcg-tol", spec.pcg.tol, "projection PCG tolerance");
  cmd->add_option("--out", spec.out_dir, "output directory");
  cmd->add_option("--threads", spec.threads, "per-subdomain parallelism (1 = deterministic)");
}

int parse_solver(const std::string& name, skeldd::RunSpec& spec) {
  if (name == "richardson")
    spec.solver.method = skeldd::SolverConfig::Method::richardson;
  else if (name == "gmres")
    spec.solver.method = skeldd::SolverConfig::Method::gmres;
  else {
    std::fprintf(stderr, "error: unknown solver '%s'\n", name.c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton-formulation domain decomposition solver for 2D time-harmonic "
               "electromagnetic scattering"};
  app.require_subcommand(1);

  skeldd::RunSpec spec;
  std::string solver_name = "gmres";
  std::string axis = "nlambda";
  std::vector<double> values;

  CLI::App* solve = app.add_subcommand("solve", "run one solve, write history.csv + report.json");
  add_common_options(solve, spec, solver_name);
  solve->add_flag("--write-solution", spec.write_solution, "also dump solution.json");
  solve->add_flag("--alpha", spec.compute_alpha, "estimate the coercivity constant (dense)");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep, write sweep.csv");
  add_common_options(sweep, spec, solver_name);
  sweep->add_option("--axis", axis, "nlambda | kappa | subdomains")->required();
  sweep->add_option("--values", values, "monotone increasing axis values")
      ->required()
      ->delimiter(',');

  CLI::App* spectrum = app.add_subcommand("spectrum", "dense eigenvalues of Id + Pi S");
  add_common_options(spectrum, spec, solver_name);

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse_solver(solver_name, spec) != 0) return 1;
    if (solve->parsed()) {
      auto outcome = skeldd::run_solve(spec);
      std::printf("%s in %d iterations (residual %.3e%s)\n",
                  outcome.report.converged ? "converged" : "NOT converged",
                  outcome.report.iterations, outcome.report.final_residual,
                  outcome.report.final_error >= 0.0
                      ? (", error vs direct " + std::to_string(outcome.report.final_error)).c_str()
                      : "");
      return outcome.exit_code;
    }
    if (sweep->parsed()) {
      auto rows = skeldd::run_sweep(spec, axis, values);
      std::printf("value,iters_despres,iters_schur,pcg_max\n");
      for (const auto& row : rows)
        std::printf("%g,%d,%d,%d\n", row.value, row.iters_despres, row.iters_schur, row.pcg_max);
      return 0;
    }
    if (spectrum->parsed()) {
      auto summary = skeldd::run_spectrum(spec);
      std::printf("n_sys %zu  min|lambda| %.6e  max|1-lambda| %.6e  alpha %.6e\n", summary.n_sys,
                  summary.min_abs, summary.max_dist_one, summary.alpha);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
