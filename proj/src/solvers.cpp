// SPDX-License-Identifier: Apache-2.0

#include "skeldd/solvers.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skeldd/krylov.hpp"
#include "skeldd/parallel.hpp"

namespace skeldd {

void SolverConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0))
    throw std::invalid_argument("solver config: damping must be in (0, 1]");
  if (restart < 1) throw std::invalid_argument("solver config: restart must be >= 1");
  if (tol <= 0.0) throw std::invalid_argument("solver config: tol must be positive");
  if (max_iterations < 1) throw std::invalid_argument("solver config: max_iterations must be >= 1");
}

std::unique_ptr<Problem> build_problem(Mesh mesh, Partition partition,
                                       SkeletonPolicy skeleton_policy, Medium medium,
                                       SourceSpec source, InductanceKind kind,
                                       bool interface_decouple, PcgConfig pcg, int threads) {
  medium.validate(mesh);
  auto problem = std::make_unique<Problem>();
  problem->mesh = std::move(mesh);
  problem->partition = std::move(partition);
  problem->medium = std::move(medium);
  problem->source = std::move(source);
  problem->threads = threads;
  problem->edge_sets = build_edge_sets(problem->mesh, problem->partition);
  problem->skeleton = build_thick_skeleton(problem->edge_sets, problem->mesh, skeleton_policy);
  problem->maps = build_index_maps(problem->edge_sets, problem->skeleton);
  problem->global = assemble_global(problem->mesh, problem->medium, problem->source);
  problem->energy_gram = assemble_energy_gram(problem->mesh, problem->medium.kappa);

  const int count = problem->partition.count;
  std::vector<LinearSystem> locals(count);
  parallel_for(count, threads, [&](int j) {
    locals[j] = assemble_local(j, problem->mesh, problem->partition, problem->edge_sets,
                               problem->medium, problem->source);
  });

  switch (kind) {
    case InductanceKind::scalar:
      problem->inductance_ =
          std::make_unique<Inductance>(Inductance::scalar(problem->skeleton, 1.0));
      break;
    case InductanceKind::despres:
      problem->inductance_ = std::make_unique<Inductance>(Inductance::despres(
          problem->mesh, problem->skeleton, problem->medium, interface_decouple));
      break;
    case InductanceKind::schur_subdomain:
    case InductanceKind::schur_interface: {
      std::vector<AuxiliarySystem> aux(count);
      parallel_for(count, threads, [&](int j) {
        aux[j] = assemble_auxiliary(j, problem->mesh, problem->partition, problem->edge_sets,
                                    problem->skeleton, problem->medium);
      });
      if (kind == InductanceKind::schur_subdomain)
        problem->inductance_ = std::make_unique<Inductance>(
            Inductance::schur_subdomain(problem->skeleton, std::move(aux), threads));
      else
        problem->inductance_ = std::make_unique<Inductance>(Inductance::schur_interface(
            problem->skeleton, problem->edge_sets, std::move(aux), threads));
      break;
    }
    case InductanceKind::explicit_blocks:
      throw std::invalid_argument("build_problem: explicit_blocks requires manual construction");
  }

  problem->projector_ = std::make_unique<Projector>(problem->skeleton, problem->edge_sets,
                                                    *problem->inductance_, pcg, threads);
  problem->scattering_ = std::make_unique<ScatteringOperator>(
      problem->skeleton, problem->maps, std::move(locals), *problem->inductance_, threads);
  return problem;
}

const CVec& Problem::direct_solution() const {
  if (direct_solution_.empty()) {
    if (!global_factor_) global_factor_ = std::make_unique<SparseLU>(global.matrix);
    direct_solution_ = global_factor_->solve(global.rhs);
  }
  return direct_solution_;
}

double Problem::direct_energy_norm() const {
  if (direct_norm_ < 0.0) direct_norm_ = energy_norm(energy_gram, direct_solution());
  return direct_norm_;
}

MultiTrace apply_skeleton_operator(const Problem& problem, const MultiTrace& p) {
  auto sp = problem.scattering().apply(p);
  MultiTrace q = problem.projector().communicate(sp.q);
  for (std::size_t i = 0; i < q.v.size(); ++i) q.v[i] += p.v[i];
  return q;
}

CVec merge_broken(const Problem& problem, const BrokenField& u) {
  CVec merged(problem.mesh.num_edges(), Cplx(0.0, 0.0));
  for (int j = 0; j < problem.partition.count; ++j) {
    const auto& targets = problem.maps.restrict_edges[j].targets;
    for (std::size_t i = 0; i < targets.size(); ++i) merged[targets[i]] += u[j][i];
  }
  for (int e = 0; e < problem.mesh.num_edges(); ++e)
    merged[e] /= static_cast<double>(problem.edge_sets.multiplicity[e]);
  return merged;
}

VolumeSolution recover_volume(const Problem& problem, const MultiTrace& p) {
  VolumeSolution out;
  out.broken = problem.scattering().volume_solve(&p);
  out.merged = merge_broken(problem, out.broken);
  return out;
}

double energy_norm(const SparseMatrix& gram, const CVec& u) {
  CVec gu = gram.multiply(u);
  Cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * gu[i];
  return std::sqrt(std::max(s.real(), 0.0));
}

double energy_norm_error(const SparseMatrix& gram, const CVec& u, const CVec& u_ref) {
  if (u.size() != u_ref.size()) throw std::invalid_argument("energy_norm_error: size mismatch");
  double ref = energy_norm(gram, u_ref);
  if (ref == 0.0) throw std::invalid_argument("energy_norm_error: zero reference field");
  CVec diff(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) diff[i] = u[i] - u_ref[i];
  return energy_norm(gram, diff) / ref;
}

namespace {

struct ErrorTracker {
  const Problem& problem;
  bool enabled;
  CVec reference;

  explicit ErrorTracker(const Problem& p, bool on) : problem(p), enabled(on) {
    if (enabled) reference = p.direct_solution();
  }
  double error_of_broken(const BrokenField& u) const {
    return energy_norm_error(problem.energy_gram, merge_broken(problem, u), reference);
  }
  double error_of_trace(const MultiTrace& p) const {
    return error_of_broken(problem.scattering().volume_solve(&p));
  }
};

}  // namespace

std::pair<MultiTrace, SolveReport> solve_richardson(const Problem& problem,
                                                    const SolverConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& skel = problem.skeleton;
  const auto& scattering = problem.scattering();
  const auto& projector = problem.projector();
  projector.reset_stats();

  SolveReport report;
  ErrorTracker tracker(problem, config.track_error || config.stop_on_error);

  MultiTrace p{CVec(skel.n_sys, Cplx(0.0, 0.0))};
  BrokenField u = scattering.volume_solve(nullptr);
  const double r = config.damping;
  double g_norm = -1.0;

  for (int n = 0; n <= config.max_iterations; ++n) {
    // Residual of the current iterate: g - (Id + Pi S)p = 2(iBu - Qv).
    MultiTrace w = scattering.trace_of(u);
    for (std::size_t i = 0; i < w.v.size(); ++i)
      w.v[i] = p.v[i] + Cplx(0.0, 2.0) * w.v[i];
    MultiTrace update{CVec(skel.n_sys, Cplx(0.0, 0.0))};
    int pcg_iters = 0;
    if (skel.n_sys > 0) {
      SingleTrace v = projector.gram_solve(w);
      pcg_iters = projector.stats().last_pcg_iterations;
      MultiTrace qv = projector.lift(v);
      for (std::size_t i = 0; i < update.v.size(); ++i)
        update.v[i] = 0.5 * (w.v[i] - p.v[i]) - qv.v[i];  // iBu - Qv
    }
    double res = 2.0 * norm2(update.v);
    if (g_norm < 0.0) g_norm = res > 0.0 ? res : 1.0;
    double rel = res / g_norm;
    report.residual_history.push_back(rel);
    report.pcg_history.push_back(pcg_iters);
    report.pcg_iters_max = std::max(report.pcg_iters_max, pcg_iters);
    double err = -1.0;
    if (tracker.enabled) {
      err = tracker.error_of_broken(u);
      report.error_history.push_back(err);
    }
    report.iterations = n;
    report.final_residual = rel;
    report.final_error = err;
    const double stop_quantity = config.stop_on_error ? err : rel;
    if (stop_quantity <= config.tol) {
      report.converged = true;
      break;
    }
    if (n == config.max_iterations) break;

    for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] += 2.0 * r * update.v[i];
    u = scattering.volume_solve(&p);
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(p), std::move(report)};
}

std::pair<MultiTrace, SolveReport> solve_gmres(const Problem& problem,
                                               const SolverConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& projector = problem.projector();
  projector.reset_stats();

  SolveReport report;
  ErrorTracker tracker(problem, config.track_error || config.stop_on_error);

  SkeletonRhs rhs = skeleton_rhs(problem.scattering(), projector);
  if (tracker.enabled) report.error_history.push_back(tracker.error_of_broken(rhs.source));
  report.pcg_history.push_back(projector.stats().last_pcg_iterations);

  int last_pcg = 0;
  auto apply = [&](const CVec& x, CVec& y) {
    MultiTrace q = apply_skeleton_operator(problem, {x});
    last_pcg = projector.stats().last_pcg_iterations;
    y = std::move(q.v);
  };

  GmresCallback callback = [&](int, double, const std::function<CVec()>& build) {
    report.pcg_history.push_back(last_pcg);
    if (!tracker.enabled) return false;
    double err = tracker.error_of_trace({build()});
    report.error_history.push_back(err);
    report.final_error = err;
    return config.stop_on_error && err <= config.tol;
  };

  CVec x(problem.skeleton.n_sys, Cplx(0.0, 0.0));
  const double residual_tol = config.stop_on_error ? 1e-30 : config.tol;
  GmresResult res =
      gmres_solve(apply, rhs.g.v, x, config.restart, residual_tol, config.max_iterations, callback);

  report.iterations = res.iterations;
  report.converged = res.converged;
  report.stagnated = res.stagnated;
  report.residual_history = std::move(res.residual_history);
  report.final_residual = res.rel_residual;
  report.pcg_iters_max = projector.stats().max_pcg_iterations;
  if (tracker.enabled && !report.error_history.empty())
    report.final_error = report.error_history.back();
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {MultiTrace{std::move(x)}, std::move(report)};
}

std::pair<MultiTrace, SolveReport> solve_skeleton(const Problem& problem,
                                                  const SolverConfig& config) {
  return config.method == SolverConfig::Method::richardson ? solve_richardson(problem, config)
                                                           : solve_gmres(problem, config);
}

namespace {

Eigen::MatrixXcd dense_operator(const Problem& problem, bool subtract_identity) {
  const std::size_t n = problem.skeleton.n_sys;
  if (n > 2000) throw std::runtime_error("spectrum: skeleton system exceeds the 2000-dof cap");
  Eigen::MatrixXcd dense(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    MultiTrace basis{CVec(n, Cplx(0.0, 0.0))};
    basis.v[c] = Cplx(1.0, 0.0);
    MultiTrace col = apply_skeleton_operator(problem, basis);
    for (std::size_t r = 0; r < n; ++r) dense(r, c) = col.v[r];
    if (subtract_identity) dense(c, c) -= 1.0;
  }
  return dense;
}

Eigen::MatrixXcd dense_inductance(const Problem& problem) {
  const std::size_t n = problem.skeleton.n_sys;
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
  const auto& skel = problem.skeleton;
  for (int j = 0; j < skel.num_subdomains(); ++j) {
    const int m = skel.block_size(j);
    const std::size_t off = skel.block_offset[j];
    CVec x(m), y(m);
    for (int c = 0; c < m; ++c) {
      std::fill(x.begin(), x.end(), Cplx(0.0, 0.0));
      x[c] = Cplx(1.0, 0.0);
      problem.inductance().apply(j, x, y);
      for (int r = 0; r < m; ++r) dense(off + r, off + c) = y[r];
    }
  }
  return dense;
}

}  // namespace

std::vector<Cplx> spectrum(const Problem& problem, SpectrumOf which) {
  Eigen::MatrixXcd dense =
      dense_operator(problem, which == SpectrumOf::iteration_operator);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dense, false);
  std::vector<Cplx> out(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

double alpha_estimate(const Problem& problem) {
  const std::size_t n = problem.skeleton.n_sys;
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXcd op = dense_operator(problem, false);
  Eigen::MatrixXcd t = dense_inductance(problem);
  // Re(p, Lp)_T = p^H (T L + (T L)^H)/2 p with T real symmetric.
  Eigen::MatrixXcd tl = t * op;
  Eigen::MatrixXcd h = 0.5 * (tl + tl.adjoint());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, t);
  return solver.eigenvalues()(0);
}

}  // namespace skeldd
