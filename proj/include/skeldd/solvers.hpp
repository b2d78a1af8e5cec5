// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "skeldd/scattering.hpp"

namespace skeldd {

struct SolverConfig {
  enum class Method { richardson, gmres };
  Method method = Method::gmres;
  double damping = 0.5;  // Richardson relaxation
  int restart = 20;
  double tol = 1e-8;
  int max_iterations = 1000;
  bool track_error = false;    // record energy-norm error vs the direct solve
  bool stop_on_error = false;  // use that error as the stopping quantity

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // length iterations + 1
  std::vector<double> error_history;     // same length when tracked, else empty
  std::vector<int> pcg_history;          // inner PCG iterations per outer step
  int pcg_iters_max = 0;
  double wall_time_seconds = 0.0;
  double final_residual = 0.0;
  double final_error = -1.0;
  bool stagnated = false;
};

// Everything needed to run the skeleton formulation on one configuration.
// Build once via build_problem; the structure is immutable afterwards apart
// from lazily cached factorizations.
class Problem {
public:
  Mesh mesh;
  Partition partition;
  EdgeSets edge_sets;
  Skeleton skeleton;
  SubdomainMaps maps;
  Medium medium;
  SourceSpec source;
  LinearSystem global;
  SparseMatrix energy_gram;
  int threads = 1;

  const Inductance& inductance() const { return *inductance_; }
  const Projector& projector() const { return *projector_; }
  const ScatteringOperator& scattering() const { return *scattering_; }

  // Direct sparse solution of the undecomposed system (cached factorization).
  const CVec& direct_solution() const;
  double direct_energy_norm() const;

  friend std::unique_ptr<Problem> build_problem(Mesh mesh, Partition partition,
                                                SkeletonPolicy skeleton_policy, Medium medium,
                                                SourceSpec source, InductanceKind kind,
                                                bool interface_decouple, PcgConfig pcg,
                                                int threads);

private:
  std::unique_ptr<Inductance> inductance_;
  std::unique_ptr<Projector> projector_;
  std::unique_ptr<ScatteringOperator> scattering_;
  mutable std::unique_ptr<SparseLU> global_factor_;
  mutable CVec direct_solution_;
  mutable double direct_norm_ = -1.0;
};

std::unique_ptr<Problem> build_problem(Mesh mesh, Partition partition,
                                       SkeletonPolicy skeleton_policy, Medium medium,
                                       SourceSpec source, InductanceKind kind,
                                       bool interface_decouple = false, PcgConfig pcg = {},
                                       int threads = 1);

// q = (Id + Pi S) p.
MultiTrace apply_skeleton_operator(const Problem& problem, const MultiTrace& p);

std::pair<MultiTrace, SolveReport> solve_richardson(const Problem& problem,
                                                    const SolverConfig& config);
std::pair<MultiTrace, SolveReport> solve_gmres(const Problem& problem, const SolverConfig& config);
std::pair<MultiTrace, SolveReport> solve_skeleton(const Problem& problem,
                                                  const SolverConfig& config);

struct VolumeSolution {
  BrokenField broken;  // u_j = (A - iB^T T B)^{-1}(B^T T p + f)
  CVec merged;         // duplicated edges averaged by 1/d_e
};

VolumeSolution recover_volume(const Problem& problem, const MultiTrace& p);
CVec merge_broken(const Problem& problem, const BrokenField& u);

double energy_norm(const SparseMatrix& gram, const CVec& u);
double energy_norm_error(const SparseMatrix& gram, const CVec& u, const CVec& u_ref);

// Eigenvalues of the dense operator, built column by column; refuses systems
// with more than 2000 skeleton unknowns.
enum class SpectrumOf { skeleton_operator, iteration_operator };  // Id+PiS vs PiS
std::vector<Cplx> spectrum(const Problem& problem, SpectrumOf which);

// Coercivity constant estimate: smallest eigenvalue of the T-symmetrized part
// of Id + Pi S (generalized eigenproblem against T).
double alpha_estimate(const Problem& problem);

}  // namespace skeldd
