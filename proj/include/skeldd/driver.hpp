// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "skeldd/solvers.hpp"

namespace skeldd {

// One solver run as driven from the command line: mesh/partition sources,
// operator choices and output directory.
struct RunSpec {
  std::string mesh = "disk";  // "disk" or a mesh file path
  double radius = 1.0;
  double nlambda = 20.0;  // points per wavelength, >= 5
  double kappa = 5.0;
  std::string partition = "pie:3";     // pie:J | strip:J | file:PATH
  std::string skeleton = "thin";       // thin | layers:k | with-boundary
  std::string inductance = "despres";  // despres | schur | schur-interface | scalar
  bool interface_decouple = false;
  std::string medium = "homogeneous";  // preset name or json:PATH
  SolverConfig solver;
  PcgConfig pcg;
  std::string out_dir = ".";
  int threads = 1;
  bool write_solution = false;
  bool compute_alpha = false;
};

std::unique_ptr<Problem> build_from_spec(const RunSpec& spec);

struct RunOutcome {
  int exit_code = 0;  // 0 converged, 2 not converged
  SolveReport report;
};

// Runs one solve and writes history.csv and report.json (and optionally
// solution.json) under spec.out_dir.
RunOutcome run_solve(const RunSpec& spec);

// Parameter sweep over nlambda | kappa | subdomains; each point is solved
// with both the Despres and the subdomain Schur inductance. Writes sweep.csv.
struct SweepRow {
  double value = 0.0;
  int iters_despres = -1;  // -1 encodes a failed run (written as nan)
  int iters_schur = -1;
  int pcg_max = -1;
};
std::vector<SweepRow> run_sweep(const RunSpec& spec, const std::string& axis,
                                const std::vector<double>& values);

// Dense spectrum of Id + Pi S; writes spectrum.csv and spectrum.json.
struct SpectrumSummary {
  double min_abs = 0.0;
  double max_dist_one = 0.0;
  double alpha = 0.0;
  std::size_t n_sys = 0;
};
SpectrumSummary run_spectrum(const RunSpec& spec);

// Reads back a report.json and checks the versioned schema.
void validate_report_file(const std::string& path);

}  // namespace skeldd
