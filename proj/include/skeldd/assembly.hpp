// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "skeldd/medium.hpp"
#include "skeldd/mesh.hpp"
#include "skeldd/partition.hpp"
#include "skeldd/sparse.hpp"

namespace skeldd {

// Galerkin matrix and load vector of the impedance problem, over the global
// edge set or a subdomain edge set E_j. The matrix is complex symmetric.
struct LinearSystem {
  SparseMatrix matrix;
  CVec rhs;
};

LinearSystem assemble_global(const Mesh& mesh, const Medium& medium, const SourceSpec& source);

LinearSystem assemble_local(int j, const Mesh& mesh, const Partition& partition,
                            const EdgeSets& edge_sets, const Medium& medium,
                            const SourceSpec& source);

// Impedance-type inductance: boundary mass matrix of the tangential traces on
// gamma_j weighted by kappa / eta_bar. For lowest-order edge elements in 2D
// the tangential trace of a basis function is supported on its own edge, so
// the matrix comes out diagonal. The interface_decouple flag asserts the
// block-matching hypothesis used by the explicit projection formula; it does
// not change any entry in 2D.
SparseMatrix assemble_despres(int j, const Mesh& mesh, const Skeleton& skeleton,
                              const Medium& medium);

// Mean of Re sqrt(mu/eps) over the triangles adjacent to edge e.
double despres_eta_bar(const Mesh& mesh, const Medium& medium, int e);

struct OmegaPrimePolicy {
  enum class Kind { full, layers };
  Kind kind = Kind::full;
  int layer_count = 0;

  static OmegaPrimePolicy full() { return {Kind::full, 0}; }
  static OmegaPrimePolicy layers(int k) { return {Kind::layers, k}; }
};

// Real coercive auxiliary problem backing the Schur-complement inductance:
// real-part curl-curl + kappa^2 mass on Omega'_j plus a boundary mass term,
// with the trace map onto gamma_j.
struct AuxiliarySystem {
  SparseMatrix C;              // real SPD, stored complex, over E'_j
  IndexMap bprime;             // E'_j -> gamma_j
  std::vector<int> edges;      // E'_j as sorted global edge ids
  std::vector<int> triangles;  // Omega'_j
};

AuxiliarySystem assemble_auxiliary(int j, const Mesh& mesh, const Partition& partition,
                                   const EdgeSets& edge_sets, const Skeleton& skeleton,
                                   const Medium& medium,
                                   OmegaPrimePolicy policy = OmegaPrimePolicy::full());

// Gram matrix of the kappa-dependent energy norm |u|^2_{L2} + kappa^{-2} |curl u|^2_{L2}.
SparseMatrix assemble_energy_gram(const Mesh& mesh, double kappa);

// Edge-element interpolant of the incident plane wave (line integrals of the
// tangential component along every edge).
CVec interpolate_plane_wave(const Mesh& mesh, const PlaneWave& pw, double kappa);

}  // namespace skeldd
