// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "skeldd/driver.hpp"
#include "skeldd/solvers.hpp"

// Dense linear-algebra oracles used only by the test suites. Everything here
// goes through Eigen so the checks stay independent of the library's sparse
// kernels and operator plumbing.
namespace skeldd::testing {

Eigen::MatrixXcd to_dense(const SparseMatrix& a);
Eigen::VectorXcd to_eigen(const CVec& v);
CVec from_eigen(const Eigen::VectorXcd& v);

CVec random_cvec(std::size_t n, unsigned seed);
RVec random_rvec(std::size_t n, unsigned seed);

// Dense T over the multi-trace space (applies the blocks to basis vectors).
Eigen::MatrixXcd dense_inductance(const Skeleton& skeleton, const Inductance& inductance);

// Dense lifting Q : V(gamma) -> V(gamma_+).
Eigen::MatrixXcd dense_q(const Skeleton& skeleton);

// Dense T-orthogonal projector P = Q (Q^T T Q)^{-1} Q^T T and Pi = 2P - Id.
Eigen::MatrixXcd dense_projector(const Skeleton& skeleton, const Inductance& inductance);
Eigen::MatrixXcd dense_communicator(const Skeleton& skeleton, const Inductance& inductance);

// Dense scattering matrix from the definition
// S = Id + 2i B (A - i B^T T B)^{-1} B^T T over the broken space.
Eigen::MatrixXcd dense_scattering_direct(const Problem& problem);

// Cayley/Schur expression S = (At - i I)^{-1} (At + i I) with
// At = T^{-1}(A_bb - A_bi A_ii^{-1} A_ib); empty when A_ii is singular.
// Both forms refuse meshes with more than 500 edges.
std::optional<Eigen::MatrixXcd> dense_scattering_cayley(const Problem& problem);

// Same Cayley construction from raw dense blocks (synthetic cases).
Eigen::MatrixXcd dense_cayley_from_blocks(const Eigen::MatrixXcd& a_full,
                                          const std::vector<int>& boundary_rows,
                                          const Eigen::MatrixXcd& t);

// Small ready-made fixtures.

// Unit square, two triangles, split across the diagonal: J=2, thin skeleton
// is the single diagonal edge (d_e = 2).
struct SquareFixture {
  Mesh mesh;
  Partition partition;
  EdgeSets edge_sets;
  Skeleton skeleton;
  SubdomainMaps maps;
};
SquareFixture make_square_fixture(SkeletonPolicy policy = SkeletonPolicy::thin());

// One-subdomain, one-edge synthetic setup for scalar toys: A = [a], T = [t],
// B = Id on a single skeleton edge.
struct ScalarToy {
  Skeleton skeleton;
  EdgeSets edge_sets;
  SubdomainMaps maps;
  std::unique_ptr<Inductance> inductance;
  std::unique_ptr<Projector> projector;
  std::unique_ptr<ScatteringOperator> scattering;
};
ScalarToy make_scalar_toy(Cplx a, double t, Cplx f = Cplx(0.0, 0.0));

std::unique_ptr<Problem> small_disk_problem(InductanceKind kind, int subdomains,
                                            double nlambda = 6.0, double kappa = 4.0,
                                            SkeletonPolicy policy = SkeletonPolicy::thin(),
                                            bool interface_decouple = false,
                                            const std::string& medium = "homogeneous");

}  // namespace skeldd::testing
