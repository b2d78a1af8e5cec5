// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "skeldd/scattering.hpp"
#include "support/oracles.hpp"

using namespace skeldd;
using testing::from_eigen;
using testing::random_cvec;
using testing::to_eigen;

namespace {

double rel_norm(const CVec& a, const CVec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("scalar toy: local solve is b / (a - i t)") {
  auto toy = testing::make_scalar_toy(Cplx(2.0, 0.0), 3.0);
  // (A - i B^T T B) u = B^T T p with A = [2], T = [3], p = 1:
  // u = 3i-free part -> u = T p / (a - i t) ... the solver takes (f, p).
  CVec u = toy.scattering->solver(0).solve(nullptr, CVec{Cplx(1.0, 0.0)});
  Cplx expected = Cplx(3.0, 0.0) / (Cplx(2.0, 0.0) - Cplx(0.0, 3.0));
  CHECK(std::abs(u[0] - expected) < 1e-14);

  CVec f{Cplx(1.0, 1.0)};
  CVec uf = toy.scattering->solver(0).solve(&f, {});
  CHECK(std::abs(uf[0] - f[0] / (Cplx(2.0, 0.0) - Cplx(0.0, 3.0))) < 1e-14);
}

TEST_CASE("scalar toys reproduce the Cayley values of S") {
  // a = 0, t = 1: S = (a + it)/(a - it) = -1.
  auto toy1 = testing::make_scalar_toy(Cplx(0.0, 0.0), 1.0);
  auto r1 = toy1.scattering->apply({CVec{Cplx(1.0, 0.0)}});
  CHECK(std::abs(r1.q.v[0] - Cplx(-1.0, 0.0)) < 1e-14);

  // a = t = 1: S = (1 + i)/(1 - i) = i.
  auto toy2 = testing::make_scalar_toy(Cplx(1.0, 0.0), 1.0);
  auto r2 = toy2.scattering->apply({CVec{Cplx(1.0, 0.0)}});
  CHECK(std::abs(r2.q.v[0] - Cplx(0.0, 1.0)) < 1e-14);

  // p = 0 maps to q = 0, v = 0.
  auto r0 = toy2.scattering->apply({CVec{Cplx(0.0, 0.0)}});
  CHECK(std::abs(r0.q.v[0]) == 0.0);
  CHECK(std::abs(r0.volume[0][0]) == 0.0);
}

TEST_CASE("energy conservation: scalar witness and random draws") {
  // a = -i, t = 1, p = 1: S p = 0, v = i/2, 4 P(v) = 1 = |p|_T^2.
  auto toy = testing::make_scalar_toy(Cplx(0.0, -1.0), 1.0);
  MultiTrace p{CVec{Cplx(1.0, 0.0)}};
  auto r = toy.scattering->apply(p);
  CHECK(std::abs(r.q.v[0]) < 1e-14);
  CHECK(std::abs(r.volume[0][0] - Cplx(0.0, 0.5)) < 1e-14);
  CHECK(toy.scattering->dissipation(r.volume) == doctest::Approx(0.25).epsilon(1e-14));

  for (InductanceKind kind : {InductanceKind::despres, InductanceKind::schur_subdomain}) {
    auto problem = testing::small_disk_problem(kind, 3);
    const auto& proj = problem->projector();
    const auto& scat = problem->scattering();
    for (int trial = 0; trial < 20; ++trial) {
      MultiTrace q{random_cvec(problem->skeleton.n_sys, 700 + trial)};
      auto sq = scat.apply(q);
      double np = proj.t_norm(q), nsp = proj.t_norm(sq.q);
      CHECK(nsp <= np * (1.0 + 1e-10));  // non-expansive
      double energy = nsp * nsp + 4.0 * scat.dissipation(sq.volume);
      CHECK(std::abs(energy - np * np) <= 1e-9 * np * np);
    }
  }
}

TEST_CASE("S is block diagonal across subdomains") {
  auto problem = testing::small_disk_problem(InductanceKind::despres, 3);
  const auto& skel = problem->skeleton;
  MultiTrace p{CVec(skel.n_sys, Cplx(0.0, 0.0))};
  // Support only in block 1.
  for (std::size_t i = skel.block_offset[1]; i < skel.block_offset[2]; ++i)
    p.v[i] = Cplx(1.0, -0.5);
  auto r = problem->scattering().apply(p);
  for (std::size_t i = 0; i < skel.block_offset[1]; ++i) CHECK(std::abs(r.q.v[i]) == 0.0);
  for (std::size_t i = skel.block_offset[2]; i < skel.n_sys; ++i)
    CHECK(std::abs(r.q.v[i]) == 0.0);
  bool middle_nonzero = false;
  for (std::size_t i = skel.block_offset[1]; i < skel.block_offset[2]; ++i)
    middle_nonzero = middle_nonzero || std::abs(r.q.v[i]) > 0.1;
  CHECK(middle_nonzero);
}

TEST_CASE("back-solve residual of the factored local systems") {
  for (InductanceKind kind : {InductanceKind::despres, InductanceKind::schur_subdomain,
                              InductanceKind::schur_interface}) {
    auto problem = testing::small_disk_problem(kind, 3);
    // Check (A - iB^T T B) u = B^T T p by reconstructing the matrix action.
    const auto& skel = problem->skeleton;
    for (int j = 0; j < 3; ++j) {
      const int ne = static_cast<int>(problem->edge_sets.edges_of[j].size());
      const int ng = skel.block_size(j);
      CVec pj = random_cvec(ng, 800 + j);
      CVec u = problem->scattering().solver(j).solve(nullptr, pj);
      REQUIRE(static_cast<int>(u.size()) == ne);
      // Residual: A u - i B^T T(B u) - B^T T p.
      CVec au = problem->scattering().local(j).matrix.multiply(u);
      const auto& bmap = problem->maps.trace[j];
      CVec bu = bmap.apply(u), tbu(ng), tp(ng);
      problem->inductance().apply(j, bu, tbu);
      problem->inductance().apply(j, pj, tp);
      CVec rhs(ne, Cplx(0.0, 0.0)), shift(ne, Cplx(0.0, 0.0));
      bmap.apply_transpose_add(tp, rhs);
      bmap.apply_transpose_add(tbu, shift);
      double num = 0.0, den = 0.0;
      for (int i = 0; i < ne; ++i) {
        Cplx res = au[i] - Cplx(0.0, 1.0) * shift[i] - rhs[i];
        num += std::norm(res);
        den += std::norm(rhs[i]);
      }
      CHECK(std::sqrt(num) <= 1e-10 * std::max(std::sqrt(den), 1.0));
    }
  }
}

TEST_CASE("augmented factorization agrees with the densified plain solve") {
  auto problem = testing::small_disk_problem(InductanceKind::schur_subdomain, 3, 5.0, 3.0);
  REQUIRE(problem->mesh.num_edges() <= 100);
  const auto& skel = problem->skeleton;
  // Densify T_j and factor the plain system with it, then compare.
  for (int j = 0; j < 3; ++j) {
    const int ng = skel.block_size(j);
    std::vector<Triplet> t_entries;
    CVec basis(ng), out(ng);
    for (int c = 0; c < ng; ++c) {
      std::fill(basis.begin(), basis.end(), Cplx(0.0, 0.0));
      basis[c] = Cplx(1.0, 0.0);
      problem->inductance().apply(j, basis, out);
      for (int r = 0; r < ng; ++r) t_entries.push_back({r, c, out[r]});
    }
    SparseMatrix tj = SparseMatrix::from_triplets(ng, ng, std::move(t_entries));

    const auto& a = problem->scattering().local(j).matrix;
    std::vector<Triplet> k_entries;
    a.for_each([&](int r, int c, Cplx v) { k_entries.push_back({r, c, v}); });
    const auto& bmap = problem->maps.trace[j];
    tj.for_each([&](int r, int c, Cplx v) {
      k_entries.push_back({bmap.targets[r], bmap.targets[c], Cplx(0.0, -1.0) * v});
    });
    SparseLU dense_t_solver(SparseMatrix::from_triplets(a.rows(), a.rows(), std::move(k_entries)));

    CVec pj = random_cvec(ng, 900 + j);
    CVec tp(ng);
    problem->inductance().apply(j, pj, tp);
    CVec rhs(a.rows(), Cplx(0.0, 0.0));
    bmap.apply_transpose_add(tp, rhs);
    CVec u_plain = dense_t_solver.solve(rhs);
    CVec u_aug = problem->scattering().solver(j).solve(nullptr, pj);
    CHECK(rel_norm(u_aug, u_plain) <= 1e-9);
  }
}

TEST_CASE("skeleton rhs vanishes for a zero source and matches the two-path formula") {
  // Zero source: g = 0.
  auto toy = testing::make_scalar_toy(Cplx(1.0, 0.0), 1.0, Cplx(0.0, 0.0));
  SkeletonRhs rhs0 = skeleton_rhs(*toy.scattering, *toy.projector);
  CHECK(std::abs(rhs0.g.v[0]) == 0.0);

  // Algorithm form b = 2iBu - 2Qv against the library's -2i Pi B u.
  auto problem = testing::small_disk_problem(InductanceKind::schur_subdomain, 3);
  const auto& skel = problem->skeleton;
  const auto& proj = problem->projector();
  const auto& scat = problem->scattering();
  SkeletonRhs rhs = skeleton_rhs(scat, proj);

  BrokenField u0 = scat.volume_solve(nullptr);
  MultiTrace bu = scat.trace_of(u0);
  MultiTrace two_i_bu{CVec(skel.n_sys)};
  for (std::size_t i = 0; i < skel.n_sys; ++i) two_i_bu.v[i] = Cplx(0.0, 2.0) * bu.v[i];
  SingleTrace v = proj.gram_solve(two_i_bu);
  MultiTrace qv = proj.lift(v);
  CVec b(skel.n_sys);
  for (std::size_t i = 0; i < skel.n_sys; ++i) b[i] = two_i_bu.v[i] - 2.0 * qv.v[i];
  CHECK(rel_norm(rhs.g.v, b) <= 1e-10);
}

TEST_CASE("rhs against a dense oracle on a one-subdomain boundary skeleton") {
  auto problem = testing::small_disk_problem(InductanceKind::despres, 1, 6.0, 4.0,
                                             SkeletonPolicy::with_external_boundary());
  const auto& skel = problem->skeleton;
  REQUIRE(skel.n_sys == skel.gamma.size());  // J = 1: multi-trace = single-trace
  SkeletonRhs rhs = skeleton_rhs(problem->scattering(), problem->projector());

  // Dense: g = -2i Pi B (A - iB^T T B)^{-1} f with Pi = Id here.
  Eigen::MatrixXcd a = testing::to_dense(problem->scattering().local(0).matrix);
  Eigen::MatrixXcd t =
      testing::dense_inductance(skel, problem->inductance());
  const auto& bmap = problem->maps.trace[0];
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(skel.n_sys, a.rows());
  for (int i = 0; i < bmap.codomain_size(); ++i) b(i, bmap.targets[i]) = 1.0;
  Eigen::MatrixXcd k = a - Cplx(0.0, 1.0) * b.transpose() * t * b;
  Eigen::VectorXcd u = k.fullPivLu().solve(to_eigen(problem->scattering().local(0).rhs));
  Eigen::VectorXcd g = Cplx(0.0, -2.0) * (b * u);
  CHECK(rel_norm(rhs.g.v, from_eigen(g)) <= 1e-9);
}

TEST_CASE("dissipation functional: zero field, real matrix, scalar toy") {
  auto toy = testing::make_scalar_toy(Cplx(0.0, -1.0), 1.0);
  BrokenField zero{CVec{Cplx(0.0, 0.0)}};
  CHECK(toy.scattering->dissipation(zero) == 0.0);

  // Real symmetric A: the quadratic form is real, so the functional vanishes.
  auto real_toy = testing::make_scalar_toy(Cplx(2.5, 0.0), 1.0);
  BrokenField v{CVec{Cplx(0.7, -0.3)}};
  CHECK(std::abs(real_toy.scattering->dissipation(v)) < 1e-15);

  // A = -i c with c = 1 and v = i/2: P(v) = c |v|^2 = 1/4.
  BrokenField w{CVec{Cplx(0.0, 0.5)}};
  CHECK(toy.scattering->dissipation(w) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("dense scattering oracle: Cayley form matches the operator") {
  for (InductanceKind kind : {InductanceKind::despres, InductanceKind::schur_subdomain}) {
    auto problem = testing::small_disk_problem(kind, 3);
    REQUIRE(problem->mesh.num_edges() <= 500);
    auto cayley = testing::dense_scattering_cayley(*problem);
    REQUIRE(cayley.has_value());
    Eigen::MatrixXcd direct = testing::dense_scattering_direct(*problem);
    CHECK((direct - *cayley).norm() <= 1e-9 * cayley->norm());

    MultiTrace p{random_cvec(problem->skeleton.n_sys, 1000)};
    auto sp = problem->scattering().apply(p);
    Eigen::VectorXcd ref = *cayley * to_eigen(p.v);
    CHECK(rel_norm(sp.q.v, from_eigen(ref)) <= 1e-9);
  }
}

TEST_CASE("dense oracle falls back when the interior block is singular") {
  // Synthetic: A = [[0, 1], [1, 0]] with the first unknown interior has
  // A_ii = [0], so the Cayley route must report failure.
  Eigen::MatrixXcd a(2, 2);
  a << Cplx(0.0, 0.0), Cplx(1.0, 0.0), Cplx(1.0, 0.0), Cplx(0.0, 0.0);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(1, 1);
  CHECK_THROWS_WITH(testing::dense_cayley_from_blocks(a, {1}, t),
                    doctest::Contains("singular"));
}

TEST_CASE("dissipation-free scattering is a T-isometry (dense SVD check)") {
  // Synthetic real symmetric A and real SPD T: S must be T-unitary.
  const int n = 6, nb = 3;
  Eigen::MatrixXd a_real = Eigen::MatrixXd::Random(n, n);
  Eigen::MatrixXcd a = (a_real + a_real.transpose()).cast<Cplx>();
  Eigen::MatrixXd t_real = Eigen::MatrixXd::Random(nb, nb);
  Eigen::MatrixXcd t =
      (t_real * t_real.transpose() + 5.0 * Eigen::MatrixXd::Identity(nb, nb)).cast<Cplx>();
  std::vector<int> boundary = {1, 3, 5};
  Eigen::MatrixXcd s = testing::dense_cayley_from_blocks(a, boundary, t);

  // Symmetrize with T^{1/2}: the singular values of T^{1/2} S T^{-1/2} are 1.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t);
  Eigen::MatrixXcd sqrt_t = es.operatorSqrt();
  Eigen::MatrixXcd sym = sqrt_t * s * sqrt_t.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sym);
  for (int i = 0; i < nb; ++i)
    CHECK(svd.singularValues()(i) == doctest::Approx(1.0).epsilon(1e-9));
}

}  // TEST_SUITE
