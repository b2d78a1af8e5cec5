// SPDX-License-Identifier: Apache-2.0

#include "support/oracles.hpp"

#include <random>
#include <stdexcept>

namespace skeldd::testing {

Eigen::MatrixXcd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
  a.for_each([&](int r, int c, Cplx v) { m(r, c) = v; });
  return m;
}

Eigen::VectorXcd to_eigen(const CVec& v) {
  Eigen::VectorXcd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
  return out;
}

CVec from_eigen(const Eigen::VectorXcd& v) {
  CVec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
  return out;
}

CVec random_cvec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CVec out(n);
  for (auto& x : out) {
    double re = dist(rng), im = dist(rng);
    x = Cplx(re, im);
  }
  return out;
}

RVec random_rvec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RVec out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

Eigen::MatrixXcd dense_inductance(const Skeleton& skeleton, const Inductance& inductance) {
  const std::size_t n = skeleton.n_sys;
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < skeleton.num_subdomains(); ++j) {
    const int m = skeleton.block_size(j);
    const std::size_t off = skeleton.block_offset[j];
    CVec x(m), y(m);
    for (int c = 0; c < m; ++c) {
      std::fill(x.begin(), x.end(), Cplx(0.0, 0.0));
      x[c] = Cplx(1.0, 0.0);
      inductance.apply(j, x, y);
      for (int r = 0; r < m; ++r) dense(off + r, off + c) = y[r];
    }
  }
  return dense;
}

Eigen::MatrixXcd dense_q(const Skeleton& skeleton) {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(skeleton.n_sys, skeleton.gamma.size());
  for (int j = 0; j < skeleton.num_subdomains(); ++j) {
    const std::size_t off = skeleton.block_offset[j];
    const auto& gj = skeleton.gamma_of[j];
    for (std::size_t i = 0; i < gj.size(); ++i) q(off + i, skeleton.gamma_index[gj[i]]) = 1.0;
  }
  return q;
}

Eigen::MatrixXcd dense_projector(const Skeleton& skeleton, const Inductance& inductance) {
  Eigen::MatrixXcd q = dense_q(skeleton);
  Eigen::MatrixXcd t = dense_inductance(skeleton, inductance);
  Eigen::MatrixXcd gram = q.transpose() * t * q;
  return q * gram.fullPivLu().solve(q.transpose() * t);
}

Eigen::MatrixXcd dense_communicator(const Skeleton& skeleton, const Inductance& inductance) {
  Eigen::MatrixXcd p = dense_projector(skeleton, inductance);
  return 2.0 * p - Eigen::MatrixXcd::Identity(p.rows(), p.cols());
}

namespace {

struct BrokenBlocks {
  Eigen::MatrixXcd a;       // block-diagonal A over E_+
  Eigen::MatrixXcd b;       // trace E_+ -> gamma_+
  Eigen::MatrixXcd t;       // inductance over gamma_+
  std::vector<int> boundary_rows;  // rows of E_+ that carry skeleton dofs
  std::size_t n_broken = 0;
};

BrokenBlocks broken_blocks(const Problem& problem) {
  if (problem.mesh.num_edges() > 500)
    throw std::runtime_error("dense oracle: mesh exceeds the 500-edge cap");
  const auto& skel = problem.skeleton;
  BrokenBlocks out;
  std::vector<std::size_t> edge_offset(skel.num_subdomains() + 1, 0);
  for (int j = 0; j < skel.num_subdomains(); ++j)
    edge_offset[j + 1] = edge_offset[j] + problem.edge_sets.edges_of[j].size();
  out.n_broken = edge_offset.back();

  out.a = Eigen::MatrixXcd::Zero(out.n_broken, out.n_broken);
  out.b = Eigen::MatrixXcd::Zero(skel.n_sys, out.n_broken);
  for (int j = 0; j < skel.num_subdomains(); ++j) {
    const auto& local = problem.scattering().local(j).matrix;
    local.for_each([&](int r, int c, Cplx v) {
      out.a(edge_offset[j] + r, edge_offset[j] + c) = v;
    });
    const auto& bmap = problem.maps.trace[j];
    for (int i = 0; i < bmap.codomain_size(); ++i) {
      out.b(skel.block_offset[j] + i, edge_offset[j] + bmap.targets[i]) = 1.0;
      out.boundary_rows.push_back(static_cast<int>(edge_offset[j]) + bmap.targets[i]);
    }
  }
  out.t = dense_inductance(skel, problem.inductance());
  return out;
}

}  // namespace

Eigen::MatrixXcd dense_scattering_direct(const Problem& problem) {
  BrokenBlocks blk = broken_blocks(problem);
  const std::size_t n = problem.skeleton.n_sys;
  Eigen::MatrixXcd k = blk.a - Cplx(0.0, 1.0) * blk.b.transpose() * blk.t * blk.b;
  Eigen::MatrixXcd rhs = blk.b.transpose() * blk.t;
  Eigen::MatrixXcd sol = k.fullPivLu().solve(rhs);
  return Eigen::MatrixXcd::Identity(n, n) + Cplx(0.0, 2.0) * blk.b * sol;
}

Eigen::MatrixXcd dense_cayley_from_blocks(const Eigen::MatrixXcd& a_full,
                                          const std::vector<int>& boundary_rows,
                                          const Eigen::MatrixXcd& t) {
  const int n = static_cast<int>(a_full.rows());
  const int nb = static_cast<int>(boundary_rows.size());
  std::vector<char> is_boundary(n, 0);
  for (int r : boundary_rows) is_boundary[r] = 1;
  std::vector<int> interior_rows;
  for (int r = 0; r < n; ++r)
    if (!is_boundary[r]) interior_rows.push_back(r);
  const int ni = static_cast<int>(interior_rows.size());

  Eigen::MatrixXcd a_ii(ni, ni), a_ib(ni, nb), a_bi(nb, ni), a_bb(nb, nb);
  for (int r = 0; r < ni; ++r)
    for (int c = 0; c < ni; ++c) a_ii(r, c) = a_full(interior_rows[r], interior_rows[c]);
  for (int r = 0; r < ni; ++r)
    for (int c = 0; c < nb; ++c) a_ib(r, c) = a_full(interior_rows[r], boundary_rows[c]);
  for (int r = 0; r < nb; ++r)
    for (int c = 0; c < ni; ++c) a_bi(r, c) = a_full(boundary_rows[r], interior_rows[c]);
  for (int r = 0; r < nb; ++r)
    for (int c = 0; c < nb; ++c) a_bb(r, c) = a_full(boundary_rows[r], boundary_rows[c]);

  Eigen::FullPivLU<Eigen::MatrixXcd> lu_ii(a_ii);
  if (ni > 0 && !lu_ii.isInvertible())
    throw std::runtime_error("dense oracle: interior block is singular");
  Eigen::MatrixXcd schur = a_bb;
  if (ni > 0) schur -= a_bi * lu_ii.solve(a_ib);
  Eigen::MatrixXcd a_tilde = t.fullPivLu().solve(schur);
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(nb, nb);
  return (a_tilde - Cplx(0.0, 1.0) * id).fullPivLu().solve(a_tilde + Cplx(0.0, 1.0) * id);
}

std::optional<Eigen::MatrixXcd> dense_scattering_cayley(const Problem& problem) {
  BrokenBlocks blk = broken_blocks(problem);
  try {
    return dense_cayley_from_blocks(blk.a, blk.boundary_rows, blk.t);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
}

SquareFixture make_square_fixture(SkeletonPolicy policy) {
  SquareFixture f;
  f.mesh = make_rect_mesh(1.0, 1.0, 1, 1);
  f.partition = partition_strip(f.mesh, 2);
  f.edge_sets = build_edge_sets(f.mesh, f.partition);
  f.skeleton = build_thick_skeleton(f.edge_sets, f.mesh, policy);
  f.maps = build_index_maps(f.edge_sets, f.skeleton);
  return f;
}

ScalarToy make_scalar_toy(Cplx a, double t, Cplx f) {
  ScalarToy toy;
  toy.edge_sets.num_subdomains = 1;
  toy.edge_sets.edges_of = {{0}};
  toy.edge_sets.multiplicity = {1};
  toy.edge_sets.classes = {{0}};

  toy.skeleton.gamma = {0};
  toy.skeleton.gamma_of = {{0}};
  toy.skeleton.policy = SkeletonPolicy::thin();
  toy.skeleton.n_sys = 1;
  toy.skeleton.gamma_index = {0};
  toy.skeleton.block_offset = {0, 1};

  toy.maps = build_index_maps(toy.edge_sets, toy.skeleton);
  toy.inductance = std::make_unique<Inductance>(Inductance::explicit_blocks(
      toy.skeleton, {SparseMatrix::diagonal(CVec{Cplx(t, 0.0)})}));
  toy.projector = std::make_unique<Projector>(toy.skeleton, toy.edge_sets, *toy.inductance);
  std::vector<LinearSystem> locals;
  locals.push_back({SparseMatrix::diagonal(CVec{a}), CVec{f}});
  toy.scattering = std::make_unique<ScatteringOperator>(toy.skeleton, toy.maps,
                                                        std::move(locals), *toy.inductance);
  return toy;
}

std::unique_ptr<Problem> small_disk_problem(InductanceKind kind, int subdomains, double nlambda,
                                            double kappa, SkeletonPolicy policy,
                                            bool interface_decouple, const std::string& medium) {
  double h = 2.0 * M_PI / (kappa * nlambda);
  Mesh mesh = make_disk_mesh(1.0, h);
  Partition partition = partition_pie(mesh, subdomains);
  Medium med = Medium::preset(medium, mesh, kappa);
  return build_problem(std::move(mesh), std::move(partition), policy, std::move(med),
                       SourceSpec::incoming_plane_wave(), kind, interface_decouple);
}

}  // namespace skeldd::testing
